#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace hybrid_drive {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One (steering, acceleration) pair, both normalized to [-1, 1].
/// Positive steering turns left; negative acceleration brakes.
struct Command
{
    double steer = 0.0;
    double accel = 0.0;

    friend bool operator==(const Command&, const Command&) = default;
};

/// Child seed for stream `counter` of `master` (one splitmix64 round).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter)
{
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

inline Command clamp_unit(Command c) { return {clamp_unit(c.steer), clamp_unit(c.accel)}; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
    double r = std::remainder(a, kTwoPi);
    if (r <= -kPi) r += kTwoPi;
    return r;
}

/// Wraps an angle into [0, 2pi).
inline double wrap_angle_positive(double a)
{
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

} // namespace hybrid_drive
