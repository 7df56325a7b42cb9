#pragma once

// Internal text helpers shared by the parsers and table writers.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gppsm/errors.hpp"

namespace gppsm::detail {

inline std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline std::vector<std::string_view> split_tabs(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find('\t', start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

inline bool parse_double(std::string_view s, double& out) {
    // std::from_chars<double> is incomplete in some standard libraries,
    // so go through strtod on a NUL-terminated copy.
    if (s.empty()) return false;
    std::string buf(s);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size();
}

inline bool parse_long(std::string_view s, long& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

inline std::string format_double(double v, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

/// 6 significant digits, the feature-table float format.
inline std::string format_g6(double v) { return format_double(v, "%.6g"); }

/// 17 significant digits: value round-trips through parsing exactly.
inline std::string format_exact(double v) { return format_double(v, "%.17g"); }

/// Shortest decimal form that still parses back to the same double.
inline std::string format_shortest(double v) {
    // Shortest string over all precisions: %g may pick scientific notation
    // at low precision ("5e+01") where a higher one is shorter ("50").
    std::string best;
    for (int prec = 1; prec <= 17; ++prec) {
        char fmt[8];
        std::snprintf(fmt, sizeof fmt, "%%.%dg", prec);
        std::string s = format_double(v, fmt);
        double back = 0.0;
        if (parse_double(s, back) && back == v && (best.empty() || s.size() < best.size()))
            best = std::move(s);
    }
    return best.empty() ? format_exact(v) : best;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open input file: " + path);
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open output file: " + path);
    return out;
}

} // namespace gppsm::detail
