#pragma once

#include <vector>

#include "polarlab/crc.hpp"
#include "polarlab/rng.hpp"

namespace polarlab {

/// SNR in decibels, gamma = 10*log10(Es/N0).
struct SnrDb {
    double db = 0.0;
    double linear() const; // Es/N0 as a ratio
};

/// Per-code-bit log-likelihood ratios, LLR_i = log P(c_i=0|y) / P(c_i=1|y).
using LlrVector = std::vector<double>;

/// LLRs are clamped to this magnitude so path metrics stay finite.
inline constexpr double kLlrClamp = 60.0;

/// Symbol energy; fixed at 1 so gamma alone sets the operating point.
inline constexpr double kSymbolEnergy = 1.0;

/// Per-dimension noise standard deviation sqrt(N0/2) with N0 = es*10^(-gamma/10).
double snr_to_noise_sigma(SnrDb snr, double es = kSymbolEnergy);

/// Gray-mapped QPSK over AWGN: bit pairs go to I/Q with per-dimension
/// amplitude sqrt(Es/2), each dimension gets independent N(0, N0/2) noise,
/// and LLR_i = 4*sqrt(Es/2)*y_i/N0 for the matching dimension. Deterministic
/// given the rng state. Codeword length must be even.
LlrVector transmit(const BitVector& codeword, SnrDb snr, Rng& rng);

} // namespace polarlab
