#pragma once

#include <vector>

#include "trajadv/core/types.hpp"

namespace trajadv::core {

// Per-step motion quantities derived from positions. speed[k] and heading[k]
// describe the step from state k to k+1 (size n-1). accel is the finite
// difference of speed: central in the interior, one-sided at the ends
// (size n-1, empty when fewer than two speed samples exist).
struct Kinematics {
    std::vector<double> speed;
    std::vector<double> heading;
    std::vector<double> accel;

    double max_abs_accel() const;
};

// Throws ValidationError for trajectories shorter than 2 states.
// Stationary steps reuse the previous defined heading (0 if none).
Kinematics derive_kinematics(const Trajectory& traj);

}  // namespace trajadv::core
