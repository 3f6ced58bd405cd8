#include "polarlab/polar.hpp"

#include <stdexcept>
#include <string>

namespace polarlab {

BitMatrix kronecker_generator(int n) {
    if (n < 0)
        throw std::invalid_argument("kronecker_generator: n must be >= 0");
    if (n >= 16)
        throw std::length_error("kronecker_generator: 2^" + std::to_string(n) +
                                " rows exceeds the supported dense-matrix size");
    const int N = 1 << n;
    BitMatrix g;
    g.rows = g.cols = N;
    g.a.assign(static_cast<std::size_t>(N) * N, 0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j)
            g.at(i, j) = static_cast<std::uint8_t>((j & ~i) == 0);
    return g;
}

void polar_transform(BitVector& x) {
    const std::size_t N = x.size();
    if (N == 0 || (N & (N - 1)) != 0)
        throw std::invalid_argument("polar_transform: length must be a power of two");
    for (std::size_t half = N >> 1; half >= 1; half >>= 1)
        for (std::size_t base = 0; base < N; base += 2 * half)
            for (std::size_t i = base; i < base + half; ++i)
                x[i] ^= x[i + half];
}

BitVector build_source_vector(const Construction& c, const BitVector& info_bits) {
    const CodeSpec& s = c.spec;
    if (static_cast<int>(info_bits.size()) != s.info_bits())
        throw std::invalid_argument("encode: expected " + std::to_string(s.info_bits()) +
                                    " information bits, got " + std::to_string(info_bits.size()));
    BitVector payload = info_bits;
    if (s.m > 0) {
        BitVector crc = crc_compute(info_bits, *s.crc_poly);
        payload.insert(payload.end(), crc.begin(), crc.end());
    }
    BitVector u(static_cast<std::size_t>(s.N), 0);
    for (std::size_t k = 0; k < c.info_set.size(); ++k)
        u[static_cast<std::size_t>(c.info_set[k])] = payload[k];
    return u;
}

BitVector encode(const Construction& c, const BitVector& info_bits) {
    BitVector u = build_source_vector(c, info_bits);
    polar_transform(u);
    return u;
}

BitVector extract_nonfrozen(const Construction& c, const BitVector& u) {
    BitVector out;
    out.reserve(c.info_set.size());
    for (int i : c.info_set)
        out.push_back(u[static_cast<std::size_t>(i)]);
    return out;
}

} // namespace polarlab
