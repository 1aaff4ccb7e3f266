#pragma once

#include <cmath>
#include <cstdint>

namespace specsim {

// Simulation time in integer microseconds since simulation start. Integer
// time keeps event ordering platform-independent; externally reported
// durations are milliseconds (value / 1000).
using SimTime = std::int64_t;

inline constexpr SimTime kSimTimeMax = INT64_MAX;

inline SimTime ms_to_us(double ms) {
    return static_cast<SimTime>(std::llround(ms * 1000.0));
}

inline double us_to_ms(SimTime us) {
    return static_cast<double>(us) / 1000.0;
}

}  // namespace specsim
