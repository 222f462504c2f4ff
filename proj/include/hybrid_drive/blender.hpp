#pragma once

#include "hybrid_drive/common.hpp"

namespace hybrid_drive {

/// Convex weights of the learned policy, the potential field and the path tracker.
/// The same three weights apply to steering and acceleration.
struct BlendWeights
{
    double alpha = 0.4;
    double beta = 0.3;
    double gamma = 0.3;
};

struct MethodCommands
{
    Command learn;
    Command apf;
    Command track;
};

inline constexpr double kWeightSumTolerance = 1e-12;

/// Throws std::invalid_argument unless every weight is non-negative and
/// they sum to 1 within 1e-12; the message reports the offending sum.
void validate_weights(const BlendWeights& w);

Command blend(const MethodCommands& cmds, const BlendWeights& w);

} // namespace hybrid_drive
