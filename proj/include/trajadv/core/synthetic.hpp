#pragma once

#include <cstdint>
#include <vector>

#include "trajadv/core/types.hpp"

namespace trajadv::core {

// Desk-scale scenario generator. Three motion families; every emitted agent
// follows a lane centerline with bounded noise, so ground truth is on-road
// by construction.
struct GeneratorConfig {
    int straight_count{0};
    int turn_count{0};
    int lane_change_count{0};

    double speed_min{2.0};
    double speed_max{20.0};
    int agents_min{2};
    int agents_max{4};

    int history_len{4};
    int future_len{12};
    double dt{0.5};
    // States emitted before the history window (0 = history starts at t=0).
    int extra_leading_states{0};

    double lane_width{3.5};
    // Per-point displacement bound, must stay < 0.1 to keep agents on-road.
    double position_noise{0.03};
    // Lateral acceleration cap used to pick turn radii compatible with speed.
    // A pure-pursuit tracker with lookahead proportional to speed cuts every
    // corner by roughly curvature * lookahead^2 / 8, independent of speed, so
    // this constant directly bounds how far a tracked vehicle can drift from
    // its lane on turns.
    double max_lateral_accel{1.0};

    int total() const { return straight_count + turn_count + lane_change_count; }
};

// Deterministic in (config, seed). Throws ValidationError on infeasible
// configs (empty speed range, negative counts).
std::vector<Scenario> generate_synthetic_scenarios(const GeneratorConfig& config,
                                                   std::uint64_t seed);

}  // namespace trajadv::core
