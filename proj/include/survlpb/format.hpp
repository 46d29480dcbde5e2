#pragma once

#include <charconv>
#include <string>

namespace survlpb {

// Shortest round-trip decimal form; locale-free and deterministic, so CSV
// output is byte-identical across runs and thread counts.
inline std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace survlpb
