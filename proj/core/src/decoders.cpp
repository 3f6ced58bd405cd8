#include "polarlab/decoders.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "polarlab/polar.hpp"

namespace polarlab {

namespace {

inline double softplus(double x) {
    if (x > 36.0)
        return x;
    if (x < -36.0)
        return std::exp(x);
    return std::log1p(std::exp(x));
}

/// Exact boxplus: 2*atanh(tanh(a/2)*tanh(b/2)) in a saturation-free form.
/// The log corrections shrink the magnitude, so they apply before the sign.
inline double boxplus(double a, double b) {
    const double aa = std::fabs(a), ab = std::fabs(b);
    const double mag = std::min(aa, ab) + std::log1p(std::exp(-(aa + ab))) -
                       std::log1p(std::exp(-std::fabs(aa - ab)));
    return ((a < 0.0) != (b < 0.0)) ? -mag : mag;
}

inline double metric_increment(double llr, std::uint8_t bit) {
    return softplus(bit ? llr : -llr);
}

inline std::uint8_t hard_decision(double llr) { return llr >= 0.0 ? 0 : 1; }

} // namespace

ListDecoder::ListDecoder(Construction construction, int list_size)
    : construction_(std::move(construction)), L_(list_size) {
    construction_.validate();
    if (L_ < 1)
        throw std::invalid_argument("ListDecoder: list size must be >= 1");
    N_ = construction_.spec.N;
    n_ = construction_.spec.n();
    frozen_ = construction_.frozen_mask();
    // level lambda in [1, n] holds N >> lambda entries at level_off_[lambda]
    level_off_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int lambda = 1; lambda <= n_; ++lambda)
        level_off_[static_cast<std::size_t>(lambda)] = N_ - (N_ >> (lambda - 1));
    slots_.resize(static_cast<std::size_t>(L_));
    for (Path& p : slots_) {
        p.llr.assign(static_cast<std::size_t>(N_ - 1), 0.0);
        p.csums.assign(static_cast<std::size_t>(2 * (N_ - 1)), 0);
        p.u.assign(static_cast<std::size_t>(N_), 0);
    }
    active_.reserve(static_cast<std::size_t>(L_));
    forks_.reserve(static_cast<std::size_t>(2 * L_));
}

void ListDecoder::calc_llr(Path& p, int lambda, int phi) {
    if (lambda == 0)
        return;
    if ((phi & 1) == 0)
        calc_llr(p, lambda - 1, phi >> 1);
    const int half = N_ >> lambda;
    const double* src =
        (lambda == 1) ? channel_ : p.llr.data() + level_off_[static_cast<std::size_t>(lambda - 1)];
    double* dst = p.llr.data() + level_off_[static_cast<std::size_t>(lambda)];
    if ((phi & 1) == 0) {
        for (int i = 0; i < half; ++i)
            dst[i] = boxplus(src[i], src[i + half]);
    } else {
        const std::uint8_t* cs = p.csums.data() + 2 * level_off_[static_cast<std::size_t>(lambda)];
        for (int i = 0; i < half; ++i) {
            const double a = src[i];
            dst[i] = src[i + half] + (cs[2 * i] ? -a : a);
        }
    }
}

void ListDecoder::update_csums(Path& p, int lambda, int phi) {
    // phi is odd: fold this level's two half-codewords into the parent level.
    if (lambda <= 1)
        return;
    const int half = N_ >> lambda;
    const int psi = phi >> 1;
    const std::uint8_t* cs = p.csums.data() + 2 * level_off_[static_cast<std::size_t>(lambda)];
    std::uint8_t* up = p.csums.data() + 2 * level_off_[static_cast<std::size_t>(lambda - 1)];
    const int slot = psi & 1;
    for (int i = 0; i < half; ++i) {
        up[2 * i + slot] = cs[2 * i] ^ cs[2 * i + 1];
        up[2 * (i + half) + slot] = cs[2 * i + 1];
    }
    if (psi & 1)
        update_csums(p, lambda - 1, psi);
}

const std::vector<SclCandidate>& ListDecoder::decode(const LlrVector& llrs) {
    if (static_cast<int>(llrs.size()) != N_)
        throw std::invalid_argument("decode: LLR vector length must equal N");
    channel_ = llrs.data();
    active_.clear();
    active_.push_back(0);
    slots_[0].pm = 0.0;

    std::vector<int> next_active;
    std::vector<int> uses(static_cast<std::size_t>(L_));
    std::vector<std::uint8_t> free_slot(static_cast<std::size_t>(L_));

    for (int phi = 0; phi < N_; ++phi) {
        for (int slot : active_)
            calc_llr(slots_[static_cast<std::size_t>(slot)], n_, phi);

        const std::size_t leaf = static_cast<std::size_t>(level_off_[static_cast<std::size_t>(n_)]);
        if (frozen_[static_cast<std::size_t>(phi)]) {
            for (int slot : active_) {
                Path& p = slots_[static_cast<std::size_t>(slot)];
                const double lam = p.llr[leaf];
                p.pm += metric_increment(lam, 0);
                p.u[static_cast<std::size_t>(phi)] = 0;
                p.csums[2 * leaf + (phi & 1)] = 0;
                if (phi & 1)
                    update_csums(p, n_, phi);
            }
            continue;
        }

        forks_.clear();
        for (std::size_t pos = 0; pos < active_.size(); ++pos) {
            const Path& p = slots_[static_cast<std::size_t>(active_[pos])];
            const double lam = p.llr[leaf];
            forks_.push_back({p.pm + metric_increment(lam, 0), static_cast<int>(pos), 0});
            forks_.push_back({p.pm + metric_increment(lam, 1), static_cast<int>(pos), 1});
        }
        if (static_cast<int>(forks_.size()) > L_) {
            std::sort(forks_.begin(), forks_.end(), [](const Fork& a, const Fork& b) {
                if (a.pm != b.pm)
                    return a.pm < b.pm;
                if (a.parent_pos != b.parent_pos)
                    return a.parent_pos < b.parent_pos;
                return a.bit < b.bit;
            });
            forks_.resize(static_cast<std::size_t>(L_));
        }
        // Canonical order of the next generation: (parent position, bit).
        std::sort(forks_.begin(), forks_.end(), [](const Fork& a, const Fork& b) {
            if (a.parent_pos != b.parent_pos)
                return a.parent_pos < b.parent_pos;
            return a.bit < b.bit;
        });

        std::fill(uses.begin(), uses.end(), 0);
        for (const Fork& f : forks_)
            ++uses[static_cast<std::size_t>(f.parent_pos)];
        std::fill(free_slot.begin(), free_slot.end(), 1);
        for (std::size_t pos = 0; pos < active_.size(); ++pos)
            if (uses[pos] > 0)
                free_slot[static_cast<std::size_t>(active_[pos])] = 0;

        next_active.clear();
        std::size_t scan = 0;
        for (const Fork& f : forks_) {
            const int parent_slot = active_[static_cast<std::size_t>(f.parent_pos)];
            int slot;
            if (--uses[static_cast<std::size_t>(f.parent_pos)] == 0) {
                slot = parent_slot; // last user takes the parent in place
            } else {
                while (!free_slot[scan])
                    ++scan;
                slot = static_cast<int>(scan);
                free_slot[scan] = 0;
                Path& dst = slots_[static_cast<std::size_t>(slot)];
                const Path& srcp = slots_[static_cast<std::size_t>(parent_slot)];
                dst.llr = srcp.llr;
                dst.csums = srcp.csums;
                dst.u = srcp.u;
            }
            Path& p = slots_[static_cast<std::size_t>(slot)];
            p.pm = f.pm;
            p.u[static_cast<std::size_t>(phi)] = f.bit;
            p.csums[2 * leaf + (phi & 1)] = f.bit;
            if (phi & 1)
                update_csums(p, n_, phi);
            next_active.push_back(slot);
        }
        active_ = next_active;
    }

    std::vector<int> order(active_.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return slots_[static_cast<std::size_t>(active_[static_cast<std::size_t>(a)])].pm <
               slots_[static_cast<std::size_t>(active_[static_cast<std::size_t>(b)])].pm;
    });
    out_.resize(active_.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Path& p = slots_[static_cast<std::size_t>(active_[static_cast<std::size_t>(order[i])])];
        out_[i].u_hat = p.u;
        out_[i].path_metric = p.pm;
    }
    return out_;
}

namespace {

struct ScScratch {
    std::vector<std::vector<double>> alpha; // per depth working LLRs
    std::vector<std::vector<std::uint8_t>> beta;
};

void sc_rec(const Construction& c, const double* alpha, int len, int base, int depth,
            ScScratch& ws, std::uint8_t* beta, BitVector& u, double& pm) {
    if (len == 1) {
        std::uint8_t bit = 0;
        const bool frozen = std::binary_search(c.frozen_set.begin(), c.frozen_set.end(), base);
        if (!frozen)
            bit = hard_decision(alpha[0]);
        pm += metric_increment(alpha[0], bit);
        u[static_cast<std::size_t>(base)] = bit;
        beta[0] = bit;
        return;
    }
    const int half = len / 2;
    std::vector<double>& a = ws.alpha[static_cast<std::size_t>(depth)];
    std::vector<std::uint8_t>& bl = ws.beta[static_cast<std::size_t>(depth)];
    for (int i = 0; i < half; ++i)
        a[static_cast<std::size_t>(i)] = boxplus(alpha[i], alpha[i + half]);
    sc_rec(c, a.data(), half, base, depth + 1, ws, bl.data(), u, pm);
    for (int i = 0; i < half; ++i)
        a[static_cast<std::size_t>(i)] =
            alpha[i + half] + (bl[static_cast<std::size_t>(i)] ? -alpha[i] : alpha[i]);
    std::uint8_t* br = bl.data() + half;
    sc_rec(c, a.data(), half, base + half, depth + 1, ws, br, u, pm);
    for (int i = 0; i < half; ++i) {
        beta[i] = bl[static_cast<std::size_t>(i)] ^ br[i];
        beta[i + half] = br[i];
    }
}

DecodeResult finish_result(const Construction& c, BitVector u, double pm) {
    DecodeResult r;
    r.u_hat = std::move(u);
    BitVector nonfrozen = extract_nonfrozen(c, r.u_hat);
    if (c.spec.m > 0) {
        r.crc_pass = crc_check(nonfrozen, *c.spec.crc_poly);
        nonfrozen.resize(static_cast<std::size_t>(c.spec.info_bits()));
    } else {
        r.crc_pass = true;
    }
    r.info_hat = std::move(nonfrozen);
    r.path_metric = pm;
    return r;
}

} // namespace

DecodeResult sc_decode(const LlrVector& llrs, const Construction& c) {
    const int N = c.spec.N;
    if (static_cast<int>(llrs.size()) != N)
        throw std::invalid_argument("sc_decode: LLR vector length must equal N");
    ScScratch ws;
    const int n = c.spec.n();
    ws.alpha.resize(static_cast<std::size_t>(n));
    ws.beta.resize(static_cast<std::size_t>(n));
    for (int d = 0; d < n; ++d) {
        ws.alpha[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(N >> (d + 1)), 0.0);
        ws.beta[static_cast<std::size_t>(d)].assign(static_cast<std::size_t>(N >> d), 0);
    }
    BitVector u(static_cast<std::size_t>(N), 0);
    BitVector cw(static_cast<std::size_t>(N), 0);
    double pm = 0.0;
    if (N == 1) {
        throw std::invalid_argument("sc_decode: N must be >= 2");
    }
    sc_rec(c, llrs.data(), N, 0, 0, ws, cw.data(), u, pm);
    return finish_result(c, std::move(u), pm);
}

std::vector<SclCandidate> scl_decode(const LlrVector& llrs, const Construction& c, int list_size) {
    ListDecoder dec(c, list_size);
    return dec.decode(llrs);
}

DecodeResult cascl_select(const std::vector<SclCandidate>& candidates, const Construction& c) {
    if (candidates.empty())
        throw std::invalid_argument("cascl_select: empty candidate list");
    if (c.spec.m > 0) {
        for (const SclCandidate& cand : candidates) {
            BitVector nonfrozen = extract_nonfrozen(c, cand.u_hat);
            if (crc_check(nonfrozen, *c.spec.crc_poly))
                return finish_result(c, cand.u_hat, cand.path_metric);
        }
    }
    return finish_result(c, candidates.front().u_hat, candidates.front().path_metric);
}

DecodeResult cascl_decode(const LlrVector& llrs, const Construction& c, int list_size) {
    ListDecoder dec(c, list_size);
    return cascl_select(dec.decode(llrs), c);
}

} // namespace polarlab
