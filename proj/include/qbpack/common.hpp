#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace qbpack {

// CSV output precision. 12 significant digits round-trips well enough for
// plotting and diffing while keeping files byte-stable across runs.
inline std::string format_sig(double x, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, x);
    return buf;
}

// Full-precision form used for canonical serialization and hashing: 17
// significant digits reproduce the exact double on read-back.
inline std::string format_exact(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace qbpack
