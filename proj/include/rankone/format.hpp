#pragma once

#include <cstdio>
#include <string>

namespace rankone {

/// 17 significant digits, '.' separator, locale independent for the "C" locale.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace rankone
