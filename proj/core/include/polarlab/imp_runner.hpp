#pragma once

#include <cstdint>
#include <vector>

#include "polarlab/fer.hpp"
#include "polarlab/imp_model.hpp"

namespace polarlab {

/// Per-step record of a greedy construction run (used by tests and the
/// construct CLI's provenance block).
struct ConstructTrace {
    std::vector<double> theta_used;
    std::vector<int> freeze_order;
};

/// Greedy construction: starting from an all-non-frozen graph with theta = 1,
/// score all check nodes, freeze the non-frozen argmax (ties toward the lower
/// index), decrement theta by 1/(N-K), repeat N-K times.
Construction construct_imp(const CodeSpec& spec, SnrDb gamma, const ImpParams& params,
                           ConstructTrace* trace = nullptr);

struct NsCandidate {
    double offset_db = 0.0;
    Construction construction;
    bool duplicate = false;   // identical frozen set already produced by an earlier offset
    bool has_fer = false;
    FerEstimate fer;
};

struct NsResult {
    Construction best;
    FerEstimate best_fer;
    double best_offset_db = 0.0;
    std::vector<NsCandidate> candidates;
};

/// Neighborhood search over model input SNRs: one candidate construction per
/// gamma_eval + offset, FER-evaluated at gamma_eval after deduplicating
/// identical frozen sets; the lowest-FER candidate wins, ties preferring the
/// smaller |offset|.
NsResult neighborhood_search(const CodeSpec& spec, SnrDb gamma_eval, const ImpParams& params,
                             const std::vector<double>& offsets_db, int list_size,
                             const StopRule& rule, std::uint64_t seed, int workers = 1);

} // namespace polarlab
