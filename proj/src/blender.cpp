#include "hybrid_drive/blender.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace hybrid_drive {

void validate_weights(const BlendWeights& w)
{
    if (!(w.alpha >= 0.0) || !(w.beta >= 0.0) || !(w.gamma >= 0.0))
        throw std::invalid_argument("blend weights must be non-negative");
    const double sum = w.alpha + w.beta + w.gamma;
    if (!(std::abs(sum - 1.0) <= kWeightSumTolerance)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "blend weights must sum to 1 (sum=%.17g)", sum);
        throw std::invalid_argument(buf);
    }
}

namespace {

// Rounding can push a weighted sum an ulp outside the inputs' hull; pin it back.
double mix(double learn, double apf, double track, const BlendWeights& w)
{
    const double v = w.alpha * learn + w.beta * apf + w.gamma * track;
    return std::clamp(v, std::min({learn, apf, track}), std::max({learn, apf, track}));
}

} // namespace

Command blend(const MethodCommands& c, const BlendWeights& w)
{
    return {mix(c.learn.steer, c.apf.steer, c.track.steer, w),
            mix(c.learn.accel, c.apf.accel, c.track.accel, w)};
}

} // namespace hybrid_drive
