#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace polarlab {

inline constexpr std::string_view kToolName = "polarlab";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Thrown when an iterative numerical procedure fails to converge or a
/// training loop produces non-finite values. The CLI maps it to exit code 3.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// FNV-1a 64-bit hash, used for provenance fingerprints and for deriving
/// RNG substream identifiers from string labels.
inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s.data(), s.size()); }

} // namespace polarlab
