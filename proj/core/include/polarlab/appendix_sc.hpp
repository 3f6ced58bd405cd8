#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarlab/classical.hpp"

namespace polarlab {

/// Real number extended with a distinguished "minus infinity" sentinel so
/// that the max-pooling and the fill/copy case splits are exact and
/// branch-testable (no floating-point infinities involved).
struct ExtReal {
    bool finite = false;
    double value = 0.0;

    static ExtReal neg_inf() { return {}; }
    static ExtReal of(double v) { return {true, v}; }
    bool operator==(const ExtReal&) const = default;
};

inline ExtReal ext_max(const ExtReal& a, const ExtReal& b) {
    if (!a.finite)
        return b;
    if (!b.finite)
        return a;
    return a.value >= b.value ? a : b;
}

/// Per-node embedding of length 2N: slot 0 carries the node identity (j for
/// check j, gamma for variables), slot 2^l + t mirrors reliability-table
/// entry Z[l, t].
using ExtendedEmbedding = std::vector<ExtReal>;

struct incomplete_fill_error : std::runtime_error {
    incomplete_fill_error(int node, int slot, const std::string& what)
        : std::runtime_error(what), node(node), slot(slot) {}
    int node;
    int slot;
};

/// Final state of the hand-specified max-pooling message-passing run.
struct AppendixMpState {
    int N = 0;
    std::vector<ExtendedEmbedding> h_vars;   // N variable-node embeddings
    std::vector<ExtendedEmbedding> h_checks; // N check-node embeddings
};

/// Observer invoked after every iteration with (iteration index, state).
using AppendixObserver = std::function<void(int, const AppendixMpState&)>;

/// Runs `iterations` synchronous max-pooling iterations with the update
/// operators built from `ops` (checks apply the left-branch fill, variables
/// the right-branch fill) on the construction graph of blocklength N.
AppendixMpState imp_sc_message_passing(int N, const ConstructionOps& ops, SnrDb gamma,
                                       int iterations, const AppendixObserver& observer = nullptr);

/// Priority metrics f_post(h_{c_j}[N + j]); throws incomplete_fill_error
/// naming the first unfilled slot if some needed entry is still -inf.
std::vector<double> appendix_priorities(const AppendixMpState& state, const ConstructionOps& ops);

/// Full special-case construction: one message-passing phase (default
/// M = 2N+1 iterations, enough to fill every slot), then N-K greedy freezes
/// by descending priority, ties freezing the lower index. The priorities are
/// recomputed after every freeze and checked to be identical, since this
/// operator set ignores node types.
Construction imp_sc_construct(int N, int K, const ConstructionOps& ops, SnrDb gamma,
                              int iterations = -1, bool check_step_invariance = true);

struct Claim1Report {
    bool ok = false;
    std::string diagnostics;
};

/// Executable equivalence check: the max-pooling run must reproduce the
/// abstract recursion's reliability table at every node slot-by-slot (within
/// rel_tol; 0 demands bit-exact equality) and pick the same frozen set.
/// Every iteration is also checked for the invariant that finite slots only
/// ever hold the final table value.
Claim1Report verify_claim1(int N, int K, const ConstructionOps& ops, SnrDb gamma,
                           double rel_tol = 0.0);

} // namespace polarlab
