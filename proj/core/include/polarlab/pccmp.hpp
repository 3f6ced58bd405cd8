#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "polarlab/channel.hpp"

namespace polarlab {

enum class NodeType : std::uint8_t { V = 0, I = 1, F = 2 };

/// Connectivity of the construction message-passing graph for blocklength N.
/// Determined by N alone: N variable nodes, N check nodes, a bipartite edge
/// pair (v_i, c_j) / (c_j, v_i) wherever generator entry (i, j) is one, and a
/// directed check-to-check edge (c_j1, c_j2) for every j1 < j2. Shared
/// read-only between graph instances.
struct PccmpStructure {
    int N = 0;
    int n = 0;
    std::vector<std::vector<int>> v_in_checks;  // per variable node: c2v sources, ascending
    std::vector<std::vector<int>> c_in_vars;    // per check node: v2c sources, ascending
    // c2c in-neighbors of c_j are implicitly {0, ..., j-1}

    std::size_t bipartite_edge_pairs() const;
    std::size_t c2c_edge_count() const { return static_cast<std::size_t>(N) * (N - 1) / 2; }
};

std::shared_ptr<const PccmpStructure> build_pccmp_structure(int N);

/// Structure plus the mutable construction state: check-node types and the
/// design SNR carried as the variable nodes' initial message. freeze() is the
/// only mutation; everything else is read-only and shareable across threads.
class PccmpGraph {
public:
    PccmpGraph(std::shared_ptr<const PccmpStructure> structure, SnrDb gamma);

    int N() const { return structure_->N; }
    const PccmpStructure& structure() const { return *structure_; }

    SnrDb gamma() const { return gamma_; }
    void set_gamma(SnrDb gamma) { gamma_ = gamma; }

    NodeType check_type(int j) const { return types_[static_cast<std::size_t>(j)]; }
    const std::vector<NodeType>& check_types() const { return types_; }
    bool is_frozen(int j) const { return types_[static_cast<std::size_t>(j)] == NodeType::F; }
    int frozen_count() const;

    /// Marks check node j frozen. Throws std::logic_error if already frozen.
    void freeze(int j);

    /// Resets check types from a frozen mask (1 = frozen), e.g. when replaying
    /// a stored environment state onto a shared structure.
    void set_types_from_frozen_mask(const std::vector<std::uint8_t>& mask);

    /// Initial node messages: gamma at every variable node, j/N at check j.
    double x_variable(int) const { return gamma_.db; }
    double x_check(int j) const { return static_cast<double>(j) / structure_->N; }

private:
    std::shared_ptr<const PccmpStructure> structure_;
    SnrDb gamma_;
    std::vector<NodeType> types_;
};

/// Fresh graph for blocklength N at design SNR gamma, all check nodes
/// non-frozen. Structures are cached per N.
PccmpGraph build_pccmp(int N, SnrDb gamma);

} // namespace polarlab
