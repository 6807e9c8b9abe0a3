#include "trajadv/core/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace trajadv::core {

double Kinematics::max_abs_accel() const {
    double m = 0.0;
    for (double a : accel) m = std::max(m, std::abs(a));
    return m;
}

Kinematics derive_kinematics(const Trajectory& traj) {
    const std::size_t n = traj.size();
    if (n < 2) throw ValidationError("trajectory too short for kinematics (need >= 2 states)");
    if (traj.dt <= 0.0) throw ValidationError("trajectory dt must be positive");

    Kinematics k;
    const std::size_t m = n - 1;
    k.speed.resize(m);
    k.heading.resize(m);

    double last_heading = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 d = traj.point(i + 1) - traj.point(i);
        k.speed[i] = d.norm() / traj.dt;
        if (d.x == 0.0 && d.y == 0.0) {
            k.heading[i] = last_heading;  // stationary step keeps prior heading
        } else {
            k.heading[i] = std::atan2(d.y, d.x);
            last_heading = k.heading[i];
        }
    }

    if (m >= 2) {
        k.accel.resize(m);
        k.accel[0] = (k.speed[1] - k.speed[0]) / traj.dt;
        k.accel[m - 1] = (k.speed[m - 1] - k.speed[m - 2]) / traj.dt;
        for (std::size_t i = 1; i + 1 < m; ++i) {
            k.accel[i] = (k.speed[i + 1] - k.speed[i - 1]) / (2.0 * traj.dt);
        }
    }
    return k;
}

}  // namespace trajadv::core
