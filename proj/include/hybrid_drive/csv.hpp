#pragma once

#include <cstdio>
#include <string>

namespace hybrid_drive {

/// CSV float rendering: 9 significant digits, no negative zero.
inline std::string csv_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v + 0.0);
    return buf;
}

} // namespace hybrid_drive
