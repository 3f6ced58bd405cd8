#include "polarlab/pccmp.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace polarlab {

std::size_t PccmpStructure::bipartite_edge_pairs() const {
    std::size_t total = 0;
    for (const auto& lst : v_in_checks)
        total += lst.size();
    return total;
}

std::shared_ptr<const PccmpStructure> build_pccmp_structure(int N) {
    if (N < 2 || (N & (N - 1)) != 0)
        throw std::invalid_argument("PCCMP graph: N must be a power of two >= 2, got " +
                                    std::to_string(N));
    auto s = std::make_shared<PccmpStructure>();
    s->N = N;
    for (int v = N; v > 1; v >>= 1)
        ++s->n;
    s->v_in_checks.resize(static_cast<std::size_t>(N));
    s->c_in_vars.resize(static_cast<std::size_t>(N));
    // Generator entry (i, j) is one iff bits(j) subset of bits(i); adjacency
    // lists come out ascending by construction.
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j)
            if ((j & ~i) == 0) {
                s->v_in_checks[static_cast<std::size_t>(i)].push_back(j);
                s->c_in_vars[static_cast<std::size_t>(j)].push_back(i);
            }
    return s;
}

namespace {
std::shared_ptr<const PccmpStructure> cached_structure(int N) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const PccmpStructure>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(N);
    if (it != cache.end())
        return it->second;
    auto s = build_pccmp_structure(N);
    cache.emplace(N, s);
    return s;
}
} // namespace

PccmpGraph::PccmpGraph(std::shared_ptr<const PccmpStructure> structure, SnrDb gamma)
    : structure_(std::move(structure)), gamma_(gamma) {
    types_.assign(static_cast<std::size_t>(structure_->N), NodeType::I);
}

int PccmpGraph::frozen_count() const {
    int cnt = 0;
    for (NodeType t : types_)
        cnt += (t == NodeType::F);
    return cnt;
}

void PccmpGraph::freeze(int j) {
    if (j < 0 || j >= structure_->N)
        throw std::invalid_argument("freeze: index out of range");
    if (types_[static_cast<std::size_t>(j)] == NodeType::F)
        throw std::logic_error("freeze: check node " + std::to_string(j) + " is already frozen");
    types_[static_cast<std::size_t>(j)] = NodeType::F;
}

void PccmpGraph::set_types_from_frozen_mask(const std::vector<std::uint8_t>& mask) {
    if (static_cast<int>(mask.size()) != structure_->N)
        throw std::invalid_argument("set_types_from_frozen_mask: mask length mismatch");
    for (std::size_t j = 0; j < mask.size(); ++j)
        types_[j] = mask[j] ? NodeType::F : NodeType::I;
}

PccmpGraph build_pccmp(int N, SnrDb gamma) { return PccmpGraph(cached_structure(N), gamma); }

} // namespace polarlab
