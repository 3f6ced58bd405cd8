#pragma once

#include <cmath>
#include <cstdint>

namespace polarlab {

/// SplitMix64 pseudo-random generator.
///
/// Chosen for its splittable-stream property: `derive_stream(seed, k)` maps a
/// master seed and a stream index to an independent generator, which is how
/// Monte Carlo frame blocks, training episodes, and sweep rows each get their
/// own substream. Results are therefore a function of (seed, stream, draw
/// index) alone, never of thread scheduling or worker count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    int bit() { return static_cast<int>(next_u64() >> 63); }

    /// Standard normal via Box-Muller; the second deviate of each pair is
    /// cached, so the draw sequence is deterministic.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
} // namespace detail

/// Derives the seed of substream `stream` from a master seed. Nested calls
/// (e.g. per-episode, then per-step) give independent hierarchies.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    return detail::mix64(detail::mix64(seed + 0x9e3779b97f4a7c15ull) ^
                         detail::mix64(stream + 0xd6e8feb86659fd93ull));
}

} // namespace polarlab
