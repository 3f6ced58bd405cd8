#include "polarlab/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "polarlab/common.hpp"

namespace polarlab {

namespace {

constexpr double kPhiBranchPoint = 10.0;

/// log of ga_phi; evaluated directly in the log domain so that the inverse
/// can be bracketed far beyond the range where phi itself underflows.
double ga_log_phi(double x) {
    if (x <= 0.0)
        return 0.0;
    if (x < kPhiBranchPoint)
        return -0.4527 * std::pow(x, 0.86) + 0.0218;
    return 0.5 * (std::log(3.14159265358979323846) - std::log(x)) - 0.25 * x +
           std::log1p(-10.0 / (7.0 * x));
}

/// Solves ga_log_phi(x) = target for x > 0 by bisection.
double solve_log_phi(double target) {
    if (target >= 0.0)
        return 0.0;
    double lo = 1e-14;
    if (ga_log_phi(lo) <= target)
        return lo;
    double hi = 1.0;
    int guard = 0;
    while (ga_log_phi(hi) > target) {
        hi *= 2.0;
        if (++guard > 4000)
            throw numerical_error("ga_phi_inv: failed to bracket target log-phi " +
                                  std::to_string(target));
    }
    for (int it = 0; it < 500; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ga_log_phi(mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-11 * hi)
            break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double ga_phi(double x) {
    if (x <= 0.0)
        return 1.0;
    return std::exp(ga_log_phi(x));
}

double ga_phi_inv(double y) {
    if (!(y > 0.0))
        throw numerical_error("ga_phi_inv: target must be positive, got " + std::to_string(y));
    if (y >= 1.0)
        return 0.0;
    return solve_log_phi(std::log(y));
}

ConstructionOps bhattacharyya_ops(double eps) {
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("bhattacharyya_ops: eps must lie in (0, 1)");
    ConstructionOps ops;
    ops.name = "bhattacharyya";
    ops.f_init = [eps](SnrDb, int, int) { return eps; };
    ops.f_left = [](double z) { return 2.0 * z - z * z; };
    ops.f_right = [](double z) { return z * z; };
    ops.f_post = [](double z) { return z; };
    return ops;
}

double bhattacharyya_param_from_snr(SnrDb gamma) {
    return std::exp(-gamma.linear());
}

ConstructionOps ga_ops(SnrDb, GaInitMode mode) {
    ConstructionOps ops;
    ops.name = "ga";
    ops.f_init = [mode](SnrDb g, int, int) {
        return mode == GaInitMode::kLinear ? 4.0 * g.linear() : 4.0 * g.db;
    };
    ops.f_left = [](double x) {
        if (x <= 0.0)
            return 0.0;
        // phi^-1(1 - (1 - phi(x))^2) via log-phi: the target is p*(2-p).
        const double lp = ga_log_phi(x);
        const double p = std::exp(lp);
        const double target = lp + std::log(2.0 - p);
        return solve_log_phi(target);
    };
    ops.f_right = [](double x) { return 2.0 * x; };
    ops.f_post = [](double x) { return -x; };
    return ops;
}

Construction run_abstract_construction(int N, int K, const ConstructionOps& ops, SnrDb gamma,
                                       StepStructureZ* z_out) {
    if (N < 2 || (N & (N - 1)) != 0)
        throw std::invalid_argument("run_abstract_construction: N must be a power of two >= 2");
    if (K < 1 || K > N)
        throw std::invalid_argument("run_abstract_construction: K must be in [1, N]");
    int n = 0;
    for (int v = N; v > 1; v >>= 1)
        ++n;

    StepStructureZ z;
    z.n = n;
    z.rows.resize(static_cast<std::size_t>(n) + 1);
    z.rows[0] = {ops.f_init(gamma, N, K)};
    for (int l = 0; l < n; ++l) {
        const std::vector<double>& cur = z.rows[static_cast<std::size_t>(l)];
        std::vector<double>& next = z.rows[static_cast<std::size_t>(l) + 1];
        next.resize(cur.size() * 2);
        for (std::size_t t = 0; t < cur.size(); ++t) {
            next[2 * t] = ops.f_left(cur[t]);
            next[2 * t + 1] = ops.f_right(cur[t]);
        }
    }

    std::vector<double> priority(static_cast<std::size_t>(N));
    for (int t = 0; t < N; ++t)
        priority[static_cast<std::size_t>(t)] = ops.f_post(z.final_row()[static_cast<std::size_t>(t)]);

    std::vector<int> order(static_cast<std::size_t>(N));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double za = priority[static_cast<std::size_t>(a)];
        const double zb = priority[static_cast<std::size_t>(b)];
        if (za != zb)
            return za > zb;
        return a < b;
    });
    std::vector<int> frozen(order.begin(), order.begin() + (N - K));

    if (z_out)
        *z_out = std::move(z);

    CodeSpec spec;
    spec.N = N;
    spec.K = K;
    spec.m = 0;
    return construction_from_frozen(spec, frozen);
}

} // namespace polarlab
