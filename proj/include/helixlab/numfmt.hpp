#pragma once

#include <cstdio>
#include <string>

namespace helixlab {

/// 17 significant digits: round-trips every double and keeps report and
/// CSV output byte-identical across runs.
inline std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace helixlab
