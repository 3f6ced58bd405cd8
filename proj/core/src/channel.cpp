#include "polarlab/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polarlab {

double SnrDb::linear() const { return std::pow(10.0, db / 10.0); }

double snr_to_noise_sigma(SnrDb snr, double es) {
    if (es <= 0.0)
        throw std::invalid_argument("snr_to_noise_sigma: es must be positive");
    const double n0 = es / snr.linear();
    return std::sqrt(n0 / 2.0);
}

LlrVector transmit(const BitVector& codeword, SnrDb snr, Rng& rng) {
    if (codeword.size() % 2 != 0)
        throw std::invalid_argument("transmit: QPSK needs an even number of bits");
    const double n0 = kSymbolEnergy / snr.linear();
    const double amp = std::sqrt(kSymbolEnergy / 2.0);
    const double sigma = std::sqrt(n0 / 2.0);
    const double scale = 4.0 * amp / n0;
    LlrVector llrs(codeword.size());
    for (std::size_t i = 0; i < codeword.size(); ++i) {
        const double tx = codeword[i] ? -amp : amp;
        const double y = tx + sigma * rng.gaussian();
        llrs[i] = std::clamp(scale * y, -kLlrClamp, kLlrClamp);
    }
    return llrs;
}

} // namespace polarlab
