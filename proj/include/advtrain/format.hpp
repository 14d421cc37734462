#pragma once

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace advtrain {

// 17 significant digits: enough for binary64 values to round-trip exactly.
inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Strict, locale-independent parse of a whole token as a double.
inline double parse_double(const std::string& s, const std::string& context) {
    const char* b = s.data();
    const char* e = s.data() + s.size();
    while (b < e && (*b == ' ' || *b == '\t')) ++b;
    const char* e2 = e;
    while (e2 > b && (e2[-1] == ' ' || e2[-1] == '\t' || e2[-1] == '\r')) --e2;
    double v = 0.0;
    auto [p, ec] = std::from_chars(b, e2, v);
    if (ec != std::errc() || p != e2)
        throw std::runtime_error(context + ": not a number: '" + s + "'");
    return v;
}

}  // namespace advtrain
