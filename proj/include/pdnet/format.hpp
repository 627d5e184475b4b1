#pragma once

#include <cstdio>
#include <string>

namespace pdnet {

/// Shortest-safe round-trip representation (17 significant digits).
inline std::string fmt_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace pdnet
