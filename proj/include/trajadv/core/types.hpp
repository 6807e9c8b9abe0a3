#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajadv/core/vec2.hpp"

namespace trajadv::core {

// Thrown when an input file cannot be read or decoded.
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Thrown when decoded or constructed data violates a domain invariant.
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct AgentState {
    double x{0.0};
    double y{0.0};
    int t_index{0};

    Vec2 position() const { return {x, y}; }
};

// Ordered 2D states at a fixed sampling interval.
struct Trajectory {
    std::vector<AgentState> states;
    double dt{0.5};

    std::size_t size() const { return states.size(); }
    bool empty() const { return states.empty(); }
    Vec2 point(std::size_t i) const { return states[i].position(); }
    std::vector<Vec2> points() const {
        std::vector<Vec2> p;
        p.reserve(states.size());
        for (const auto& s : states) p.push_back(s.position());
        return p;
    }
};

struct LaneSegment {
    std::vector<Vec2> centerline;
    double width{3.5};
};

struct Agent {
    std::string id;
    std::string semantic_class{"car"};
    Trajectory trajectory;
};

bool is_vehicle_class(const std::string& semantic_class);

// One traffic scene: full-horizon trajectories for every agent, lane
// geometry, and the history/future split lengths. The current timestep is
// implicit: the last history_len states before the trailing future_len
// states form the observation window.
struct Scenario {
    std::vector<Agent> agents;
    std::string adversary_id;
    int history_len{4};
    int future_len{12};
    std::vector<LaneSegment> lanes;
    double dt{0.5};

    int agent_index(const std::string& id) const;
    int adversary_index() const { return agent_index(adversary_id); }

    std::size_t horizon(int agent_idx) const { return agents[agent_idx].trajectory.size(); }
    // Index of the first history state within the agent's full trajectory.
    std::size_t history_start(int agent_idx) const {
        return horizon(agent_idx) - static_cast<std::size_t>(history_len + future_len);
    }

    std::vector<AgentState> history_of(int agent_idx) const;
    std::vector<AgentState> future_of(int agent_idx) const;
    // The state immediately preceding the history window, when one exists.
    std::optional<AgentState> state_before_history(int agent_idx) const;
};

// Throws ValidationError on the first violated invariant.
void validate(const Trajectory& traj);
void validate(const LaneSegment& lane);
void validate(const Scenario& scenario);

// Vehicle pose used by the continuous-curvature model: position, heading,
// and instantaneous curvature.
struct Configuration {
    double x{0.0};
    double y{0.0};
    double psi{0.0};
    double c0{0.0};

    Vec2 position() const { return {x, y}; }
};

// One clothoid segment: curvature changes linearly at rate c1 over length.
struct ClothoidArc {
    double c1{0.0};
    double length{0.0};
};

void validate(const Configuration& config, double c0_max);
void validate(const ClothoidArc& arc, double c1_max);

}  // namespace trajadv::core
