#pragma once

#include <charconv>
#include <cstddef>
#include <span>
#include <string>
#include <system_error>
#include <vector>

namespace fairpost {

// Pairwise (cascade) summation. Error grows with log2(n) instead of n,
// which keeps mean-based post-processing contracts inside 1e-12 at n <= 1e5.
double pairwise_sum(std::span<const double> values);

double mean(std::span<const double> values);

inline double clamp01(double x) {
    if (x < 0.0) return 0.0;
    if (x > 1.0) return 1.0;
    return x;
}

// Shortest decimal representation that round-trips through a double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Strict full-token parse; returns false on trailing garbage or empty input.
inline bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

}  // namespace fairpost
