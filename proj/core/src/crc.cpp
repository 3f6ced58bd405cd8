#include "polarlab/crc.hpp"

#include <stdexcept>

namespace polarlab {

CrcPoly parse_crc_poly(const std::string& hex, int degree) {
    if (degree < 1 || degree > 63)
        throw std::invalid_argument("CRC degree must be in [1, 63], got " + std::to_string(degree));
    std::string s = hex;
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0)
        s = s.substr(2);
    if (s.empty())
        throw std::invalid_argument("empty CRC polynomial string");
    std::uint64_t v = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = 10 + (c - 'a');
        else if (c >= 'A' && c <= 'F') d = 10 + (c - 'A');
        else throw std::invalid_argument("bad character in CRC polynomial: " + hex);
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    if (degree < 64 && v >= (1ull << degree))
        throw std::invalid_argument("CRC polynomial " + hex + " does not fit degree " + std::to_string(degree));
    return CrcPoly{v, degree};
}

std::string crc_poly_to_string(const CrcPoly& poly) {
    static const char* digits = "0123456789ABCDEF";
    if (poly.coeffs == 0)
        return "0x0";
    std::string s;
    for (std::uint64_t v = poly.coeffs; v != 0; v >>= 4)
        s.insert(s.begin(), digits[v & 0xf]);
    return "0x" + s;
}

BitVector crc_compute(const BitVector& message, const CrcPoly& poly) {
    if (poly.degree < 1)
        throw std::invalid_argument("crc_compute: degree must be >= 1");
    const std::uint64_t top = 1ull << (poly.degree - 1);
    const std::uint64_t mask = (top << 1) - 1;
    // MSB-first division; feeding each message bit at the register top is the
    // shift-register equivalent of dividing message*x^degree.
    std::uint64_t reg = 0;
    for (std::uint8_t bit : message) {
        const int fb = static_cast<int>((reg & top) != 0) ^ static_cast<int>(bit & 1);
        reg = (reg << 1) & mask;
        if (fb)
            reg ^= poly.coeffs;
    }
    BitVector out(static_cast<std::size_t>(poly.degree));
    for (int i = 0; i < poly.degree; ++i)
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((reg >> (poly.degree - 1 - i)) & 1);
    return out;
}

bool crc_check(const BitVector& bits, const CrcPoly& poly) {
    if (bits.size() <= static_cast<std::size_t>(poly.degree))
        throw std::invalid_argument("crc_check: frame shorter than CRC length");
    const std::size_t split = bits.size() - static_cast<std::size_t>(poly.degree);
    BitVector message(bits.begin(), bits.begin() + static_cast<std::ptrdiff_t>(split));
    BitVector expect = crc_compute(message, poly);
    for (std::size_t i = 0; i < expect.size(); ++i)
        if (expect[i] != bits[split + i])
            return false;
    return true;
}

} // namespace polarlab
