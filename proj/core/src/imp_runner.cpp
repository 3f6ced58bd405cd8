#include "polarlab/imp_runner.hpp"

#include <cmath>
#include <stdexcept>

namespace polarlab {

Construction construct_imp(const CodeSpec& spec, SnrDb gamma, const ImpParams& params,
                           ConstructTrace* trace) {
    spec.validate();
    if (spec.K >= spec.N)
        throw std::invalid_argument("construct_imp: K must be < N");
    if (spec.K <= spec.m)
        throw std::invalid_argument("construct_imp: K must exceed the CRC length m");
    const int N = spec.N;
    const int steps = N - spec.K;

    PccmpGraph graph = build_pccmp(N, gamma);
    double theta = 1.0;
    if (trace) {
        trace->theta_used.clear();
        trace->freeze_order.clear();
    }
    for (int t = 0; t < steps; ++t) {
        PriorityVector pv = imp_score(graph, params, theta);
        int best = -1;
        for (int j = 0; j < N; ++j) {
            if (graph.is_frozen(j))
                continue;
            if (best < 0 || pv.z(j) > pv.z(best))
                best = j;
        }
        graph.freeze(best);
        if (trace) {
            trace->theta_used.push_back(theta);
            trace->freeze_order.push_back(best);
        }
        theta -= 1.0 / static_cast<double>(steps);
    }

    std::vector<int> info;
    info.reserve(static_cast<std::size_t>(spec.K));
    for (int j = 0; j < N; ++j)
        if (!graph.is_frozen(j))
            info.push_back(j);
    return make_construction(spec, std::move(info));
}

NsResult neighborhood_search(const CodeSpec& spec, SnrDb gamma_eval, const ImpParams& params,
                             const std::vector<double>& offsets_db, int list_size,
                             const StopRule& rule, std::uint64_t seed, int workers) {
    if (offsets_db.empty())
        throw std::invalid_argument("neighborhood_search: offsets must be non-empty");

    NsResult result;
    result.candidates.reserve(offsets_db.size());
    for (double off : offsets_db) {
        NsCandidate cand;
        cand.offset_db = off;
        cand.construction = construct_imp(spec, SnrDb{gamma_eval.db + off}, params);
        for (const NsCandidate& prev : result.candidates)
            if (!prev.duplicate && prev.construction.info_set == cand.construction.info_set) {
                cand.duplicate = true;
                break;
            }
        result.candidates.push_back(std::move(cand));
    }

    std::uint64_t unique_idx = 0;
    int best = -1;
    for (std::size_t i = 0; i < result.candidates.size(); ++i) {
        NsCandidate& cand = result.candidates[i];
        if (cand.duplicate)
            continue;
        cand.fer = estimate_fer(cand.construction, list_size, gamma_eval, rule,
                                derive_stream(seed, unique_idx++), workers);
        cand.has_fer = true;
        if (best < 0)
            best = static_cast<int>(i);
        else {
            const NsCandidate& b = result.candidates[static_cast<std::size_t>(best)];
            const double fa = cand.fer.fer, fb = b.fer.fer;
            if (fa < fb || (fa == fb && std::fabs(cand.offset_db) < std::fabs(b.offset_db)))
                best = static_cast<int>(i);
        }
    }
    const NsCandidate& winner = result.candidates[static_cast<std::size_t>(best)];
    result.best = winner.construction;
    result.best_fer = winner.fer;
    result.best_offset_db = winner.offset_db;
    return result;
}

} // namespace polarlab
