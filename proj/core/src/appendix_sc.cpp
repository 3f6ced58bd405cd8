#include "polarlab/appendix_sc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polarlab/pccmp.hpp"

namespace polarlab {

namespace {

/// Fill maps: slot k receives F_left of slot k/2 when k is even, F_right of
/// slot (k-1)/2 when k is odd (k >= 2). Matches the reliability table's
/// prefix-doubling placement Z[l+1, 2t] / Z[l+1, 2t+1] from Z[l, t].
inline int left_source(int k) { return (k >= 2 && (k & 1) == 0) ? k / 2 : -1; }
inline int right_source(int k) { return (k >= 3 && (k & 1) == 1) ? (k - 1) / 2 : -1; }

void maxpool_into(ExtendedEmbedding& acc, const ExtendedEmbedding& other) {
    for (std::size_t k = 0; k < acc.size(); ++k)
        acc[k] = ext_max(acc[k], other[k]);
}

ExtendedEmbedding apply_fill(const ExtendedEmbedding& pooled, const ExtReal& own_slot0,
                             const std::function<double(double)>& f, bool left) {
    ExtendedEmbedding out(pooled.size());
    out[0] = own_slot0;
    for (int k = 1; k < static_cast<int>(pooled.size()); ++k) {
        if (!pooled[static_cast<std::size_t>(k)].finite) {
            const int src = left ? left_source(k) : right_source(k);
            if (src >= 1 && pooled[static_cast<std::size_t>(src)].finite) {
                out[static_cast<std::size_t>(k)] =
                    ExtReal::of(f(pooled[static_cast<std::size_t>(src)].value));
                continue;
            }
            // F_left(-inf) = F_right(-inf) = -inf on the extended domain.
            out[static_cast<std::size_t>(k)] = ExtReal::neg_inf();
        } else {
            out[static_cast<std::size_t>(k)] = pooled[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

} // namespace

AppendixMpState imp_sc_message_passing(int N, const ConstructionOps& ops, SnrDb gamma,
                                       int iterations, const AppendixObserver& observer) {
    if (iterations < 0)
        throw std::invalid_argument("imp_sc_message_passing: iterations must be >= 0");
    auto structure = build_pccmp_structure(N);
    const int slots = 2 * N;

    AppendixMpState st;
    st.N = N;
    st.h_vars.assign(static_cast<std::size_t>(N), ExtendedEmbedding(static_cast<std::size_t>(slots)));
    st.h_checks.assign(static_cast<std::size_t>(N),
                       ExtendedEmbedding(static_cast<std::size_t>(slots)));
    const double f_init = ops.f_init(gamma, N, /*K=*/0);
    for (int j = 0; j < N; ++j) {
        st.h_vars[static_cast<std::size_t>(j)][0] = ExtReal::of(gamma.db);
        st.h_vars[static_cast<std::size_t>(j)][1] = ExtReal::of(f_init); // slot of Z[0,0]
        st.h_checks[static_cast<std::size_t>(j)][0] = ExtReal::of(static_cast<double>(j));
    }

    AppendixMpState next = st;
    for (int it = 0; it < iterations; ++it) {
        // Check nodes: one left-branch fill per incoming message type (v2c,
        // c2c), then the local max-pool of the per-type updates.
        std::vector<ExtendedEmbedding> check_prefix_max(static_cast<std::size_t>(N + 1));
        check_prefix_max[0].assign(static_cast<std::size_t>(slots), ExtReal::neg_inf());
        for (int j = 0; j < N; ++j) {
            check_prefix_max[static_cast<std::size_t>(j + 1)] =
                check_prefix_max[static_cast<std::size_t>(j)];
            maxpool_into(check_prefix_max[static_cast<std::size_t>(j + 1)],
                         st.h_checks[static_cast<std::size_t>(j)]);
        }
        for (int j = 0; j < N; ++j) {
            const ExtendedEmbedding& self = st.h_checks[static_cast<std::size_t>(j)];
            ExtendedEmbedding pooled_v2c = self;
            for (int i : structure->c_in_vars[static_cast<std::size_t>(j)])
                maxpool_into(pooled_v2c, st.h_vars[static_cast<std::size_t>(i)]);
            ExtendedEmbedding upd = apply_fill(pooled_v2c, self[0], ops.f_left, /*left=*/true);
            if (j > 0) {
                ExtendedEmbedding pooled_c2c = self;
                maxpool_into(pooled_c2c, check_prefix_max[static_cast<std::size_t>(j)]);
                ExtendedEmbedding upd2 = apply_fill(pooled_c2c, self[0], ops.f_left, /*left=*/true);
                maxpool_into(upd, upd2);
            }
            next.h_checks[static_cast<std::size_t>(j)] = std::move(upd);
        }
        for (int i = 0; i < N; ++i) {
            const ExtendedEmbedding& self = st.h_vars[static_cast<std::size_t>(i)];
            ExtendedEmbedding pooled = self;
            for (int j : structure->v_in_checks[static_cast<std::size_t>(i)])
                maxpool_into(pooled, st.h_checks[static_cast<std::size_t>(j)]);
            next.h_vars[static_cast<std::size_t>(i)] =
                apply_fill(pooled, self[0], ops.f_right, /*left=*/false);
        }
        std::swap(st.h_vars, next.h_vars);
        std::swap(st.h_checks, next.h_checks);
        if (observer)
            observer(it + 1, st);
    }
    return st;
}

std::vector<double> appendix_priorities(const AppendixMpState& state, const ConstructionOps& ops) {
    const int N = state.N;
    std::vector<double> z(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const ExtendedEmbedding& h = state.h_checks[static_cast<std::size_t>(j)];
        const int slot = N + static_cast<int>(h[0].value); // N + j
        if (!h[static_cast<std::size_t>(slot)].finite)
            throw incomplete_fill_error(j, slot,
                                        "appendix_priorities: check node " + std::to_string(j) +
                                            " slot " + std::to_string(slot) +
                                            " is still unfilled; run more iterations");
        z[static_cast<std::size_t>(j)] = ops.f_post(h[static_cast<std::size_t>(slot)].value);
    }
    return z;
}

Construction imp_sc_construct(int N, int K, const ConstructionOps& ops, SnrDb gamma,
                              int iterations, bool check_step_invariance) {
    if (K < 1 || K > N)
        throw std::invalid_argument("imp_sc_construct: K must be in [1, N]");
    const int M = iterations < 0 ? 2 * N + 1 : iterations;
    AppendixMpState state = imp_sc_message_passing(N, ops, gamma, M);
    const std::vector<double> z = appendix_priorities(state, ops);

    std::vector<std::uint8_t> frozen(static_cast<std::size_t>(N), 0);
    std::vector<int> frozen_list;
    for (int step = 0; step < N - K; ++step) {
        if (check_step_invariance && step > 0) {
            // These operators ignore node types, so the metric vector must be
            // bitwise identical when recomputed after a freeze.
            AppendixMpState re = imp_sc_message_passing(N, ops, gamma, M);
            if (appendix_priorities(re, ops) != z)
                throw std::logic_error("imp_sc_construct: priority metrics changed across steps");
        }
        int best = -1;
        for (int j = 0; j < N; ++j) {
            if (frozen[static_cast<std::size_t>(j)])
                continue;
            if (best < 0 || z[static_cast<std::size_t>(j)] > z[static_cast<std::size_t>(best)])
                best = j;
        }
        frozen[static_cast<std::size_t>(best)] = 1;
        frozen_list.push_back(best);
    }

    CodeSpec spec;
    spec.N = N;
    spec.K = K;
    spec.m = 0;
    return construction_from_frozen(spec, frozen_list);
}

Claim1Report verify_claim1(int N, int K, const ConstructionOps& ops, SnrDb gamma, double rel_tol) {
    Claim1Report report;
    StepStructureZ table;
    Construction classical = run_abstract_construction(N, K, ops, gamma, &table);

    // Flattened table: h_star[2^l + t] = Z[l, t].
    std::vector<double> h_star(static_cast<std::size_t>(2 * N), 0.0);
    for (int l = 0; l <= table.n; ++l)
        for (int t = 0; t < (1 << l); ++t)
            h_star[static_cast<std::size_t>((1 << l) + t)] = table.at(l, t);

    auto matches = [&](double got, double want) {
        if (got == want)
            return true;
        if (rel_tol <= 0.0)
            return false;
        return std::fabs(got - want) <= rel_tol * std::max(std::fabs(want), 1e-300);
    };

    std::string failure;
    auto check_state = [&](int iter, const AppendixMpState& st) {
        if (!failure.empty())
            return;
        auto scan = [&](const char* kind, const std::vector<ExtendedEmbedding>& nodes) {
            for (int u = 0; u < N && failure.empty(); ++u) {
                const ExtendedEmbedding& h = nodes[static_cast<std::size_t>(u)];
                for (int k = 1; k < 2 * N; ++k) {
                    const ExtReal& slot = h[static_cast<std::size_t>(k)];
                    if (slot.finite && !matches(slot.value, h_star[static_cast<std::size_t>(k)])) {
                        failure = "iteration " + std::to_string(iter) + ": " + kind + " node " +
                                  std::to_string(u) + " slot " + std::to_string(k) + " expected " +
                                  std::to_string(h_star[static_cast<std::size_t>(k)]) + " got " +
                                  std::to_string(slot.value);
                        return;
                    }
                }
            }
        };
        scan("variable", st.h_vars);
        scan("check", st.h_checks);
    };

    AppendixMpState final_state =
        imp_sc_message_passing(N, ops, gamma, 2 * N + 1, check_state);
    if (!failure.empty()) {
        report.diagnostics = failure;
        return report;
    }

    // (a) every slot of every node must now be filled with the table value
    for (int u = 0; u < 2 * N; ++u) {
        const bool is_check = u >= N;
        const ExtendedEmbedding& h = is_check
                                         ? final_state.h_checks[static_cast<std::size_t>(u - N)]
                                         : final_state.h_vars[static_cast<std::size_t>(u)];
        for (int k = 1; k < 2 * N; ++k) {
            const ExtReal& slot = h[static_cast<std::size_t>(k)];
            if (!slot.finite) {
                report.diagnostics = std::string(is_check ? "check" : "variable") + " node " +
                                     std::to_string(is_check ? u - N : u) + " slot " +
                                     std::to_string(k) + " never filled";
                return report;
            }
            if (!matches(slot.value, h_star[static_cast<std::size_t>(k)])) {
                report.diagnostics = std::string(is_check ? "check" : "variable") + " node " +
                                     std::to_string(is_check ? u - N : u) + " slot " +
                                     std::to_string(k) + " expected " +
                                     std::to_string(h_star[static_cast<std::size_t>(k)]) + " got " +
                                     std::to_string(slot.value);
                return report;
            }
        }
    }

    // (b) identical frozen sets
    Construction mp = imp_sc_construct(N, K, ops, gamma, 2 * N + 1,
                                       /*check_step_invariance=*/false);
    if (mp.frozen_set != classical.frozen_set) {
        report.diagnostics = "frozen sets differ";
        return report;
    }
    report.ok = true;
    report.diagnostics = "all " + std::to_string(2 * N) + " nodes reproduce the " +
                         std::to_string(2 * N - 1) + "-slot table; frozen sets match";
    return report;
}

} // namespace polarlab
