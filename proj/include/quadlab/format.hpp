#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "quadlab/errors.hpp"

namespace quadlab {

// All floating-point values destined for files go through this one formatter.
// %.17g round-trips every double exactly and is locale-independent under the
// default "C" locale, which is what makes reruns and thread-count sweeps
// byte-identical. Do not print doubles into artifacts any other way.
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << body;
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failed: " + path);
    return ss.str();
}

inline bool file_exists(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return static_cast<bool>(in);
}

// Strict double parse for cache/config round-trips.
inline double parse_double(const std::string& s, const char* key) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw config_error(std::string(key) + ": not a number: '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s, const char* key) {
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0')
        throw config_error(std::string(key) + ": not an integer: '" + s + "'");
    return v;
}

} // namespace quadlab
