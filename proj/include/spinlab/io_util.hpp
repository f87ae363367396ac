#ifndef SPINLAB_IO_UTIL_HPP
#define SPINLAB_IO_UTIL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace spinlab {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a 64-bit, used to fingerprint the canonical config string of a run.
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct RunMeta {
    std::uint64_t seed = 0;
    std::uint64_t config_digest = 0;

    // comment lines for text outputs, e.g. "seed=42 version=0.1.0 config=..."
    std::vector<std::string> header_lines() const;
};

std::string format_double(double v); // shortest round-trip-exact decimal

} // namespace spinlab

#endif
