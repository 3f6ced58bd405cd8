#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polarlab {

using BitVector = std::vector<std::uint8_t>;

/// CRC generator polynomial in the compact hexadecimal convention: the
/// coefficients below the (always-one) highest-order term, written MSB first.
/// Example: x^4 + x + 1 with degree 4 has low coefficients 0011b, i.e. "0x3".
struct CrcPoly {
    std::uint64_t coeffs = 0; // coefficients of x^{degree-1} .. x^0
    int degree = 0;
};

/// Parses the hexadecimal convention, e.g. "0x3" or "0x04C11DB7".
/// The degree comes from the code parameter m, not from the string.
CrcPoly parse_crc_poly(const std::string& hex, int degree);

std::string crc_poly_to_string(const CrcPoly& poly);

/// Remainder of message*x^degree divided by the generator polynomial,
/// MSB first. Register starts at zero, no final XOR.
BitVector crc_compute(const BitVector& message, const CrcPoly& poly);

/// True iff the last `degree` bits of `bits` equal the CRC of the prefix.
bool crc_check(const BitVector& bits, const CrcPoly& poly);

} // namespace polarlab
