#pragma once

#include <cstdint>
#include <vector>

#include "polarlab/code_spec.hpp"

namespace polarlab {

/// Dense GF(2) matrix, row-major.
struct BitMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> a;

    std::uint8_t at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
    std::uint8_t& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
};

/// n-th Kronecker power of the polarization kernel [[1,0],[1,1]].
/// Natural index order throughout; the matrix is lower triangular with unit
/// diagonal and entry (i,j) is 1 iff the bits of j are a subset of the bits
/// of i. Used as the reference for the fast transform and by the graph
/// builder; n = 0 gives [[1]].
BitMatrix kronecker_generator(int n);

/// In-place transform x <- x^T G^{(x)n} over GF(2). Self-inverse.
void polar_transform(BitVector& x);

/// Builds the source vector u: information bits, then CRC bits, placed at
/// the info_set positions in ascending order; zeros at frozen positions.
BitVector build_source_vector(const Construction& c, const BitVector& info_bits);

/// Full encoder: u = build_source_vector, c = u^T G.
BitVector encode(const Construction& c, const BitVector& info_bits);

/// The K non-frozen entries of a length-N source vector, ascending position.
BitVector extract_nonfrozen(const Construction& c, const BitVector& u);

} // namespace polarlab
