#include "trajadv/core/types.hpp"

#include <array>
#include <cmath>
#include <string>

namespace trajadv::core {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite(double v) { return std::isfinite(v); }

}  // namespace

bool is_vehicle_class(const std::string& semantic_class) {
    static const std::array<const char*, 7> vehicle_classes = {
        "car", "truck", "bus", "van", "vehicle", "motorcycle", "emergency"};
    for (const char* c : vehicle_classes) {
        if (semantic_class == c) return true;
    }
    return false;
}

int Scenario::agent_index(const std::string& id) const {
    for (std::size_t i = 0; i < agents.size(); ++i) {
        if (agents[i].id == id) return static_cast<int>(i);
    }
    return -1;
}

std::vector<AgentState> Scenario::history_of(int agent_idx) const {
    const auto& states = agents[agent_idx].trajectory.states;
    const std::size_t start = history_start(agent_idx);
    return {states.begin() + static_cast<std::ptrdiff_t>(start),
            states.begin() + static_cast<std::ptrdiff_t>(start) + history_len};
}

std::vector<AgentState> Scenario::future_of(int agent_idx) const {
    const auto& states = agents[agent_idx].trajectory.states;
    const std::size_t start = history_start(agent_idx) + static_cast<std::size_t>(history_len);
    return {states.begin() + static_cast<std::ptrdiff_t>(start),
            states.begin() + static_cast<std::ptrdiff_t>(start) + future_len};
}

std::optional<AgentState> Scenario::state_before_history(int agent_idx) const {
    const std::size_t start = history_start(agent_idx);
    if (start == 0) return std::nullopt;
    return agents[agent_idx].trajectory.states[start - 1];
}

void validate(const Trajectory& traj) {
    if (traj.dt <= 0.0) throw ValidationError("trajectory dt must be positive");
    int prev_t = -1;
    for (const auto& s : traj.states) {
        if (!finite(s.x) || !finite(s.y)) throw ValidationError("non-finite state coordinate");
        if (s.t_index < 0) throw ValidationError("negative t_index");
        if (s.t_index <= prev_t) throw ValidationError("t_index not strictly increasing");
        prev_t = s.t_index;
    }
}

void validate(const LaneSegment& lane) {
    if (lane.width <= 0.0) throw ValidationError("lane width must be positive");
    if (lane.centerline.size() < 2) throw ValidationError("lane centerline needs >= 2 points");
    for (const auto& p : lane.centerline) {
        if (!finite(p.x) || !finite(p.y)) throw ValidationError("non-finite lane point");
    }
    for (std::size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
        if (lane.centerline[i] == lane.centerline[i + 1]) {
            throw ValidationError("consecutive lane centerline points coincide");
        }
    }
}

void validate(const Scenario& scenario) {
    if (scenario.dt <= 0.0) throw ValidationError("scenario dt must be positive");
    if (scenario.history_len < 1) throw ValidationError("history_len must be >= 1");
    if (scenario.future_len < 1) throw ValidationError("future_len must be >= 1");
    if (scenario.agents.empty()) throw ValidationError("scenario has no agents");

    const std::size_t min_len =
        static_cast<std::size_t>(scenario.history_len) + static_cast<std::size_t>(scenario.future_len);
    for (const auto& agent : scenario.agents) {
        if (agent.id.empty()) throw ValidationError("agent id empty");
        validate(agent.trajectory);
        if (agent.trajectory.size() < min_len) {
            throw ValidationError("agent '" + agent.id + "' trajectory shorter than history+future horizon");
        }
        if (agent.trajectory.dt != scenario.dt) {
            throw ValidationError("agent '" + agent.id + "' dt differs from scenario dt");
        }
    }

    const int adv = scenario.adversary_index();
    if (adv < 0) throw ValidationError("adversary_id '" + scenario.adversary_id + "' not among agents");
    if (!is_vehicle_class(scenario.agents[adv].semantic_class)) {
        throw ValidationError("adversary class '" + scenario.agents[adv].semantic_class +
                              "' is not a vehicle class");
    }

    for (const auto& lane : scenario.lanes) validate(lane);
}

void validate(const Configuration& config, double c0_max) {
    if (!finite(config.x) || !finite(config.y) || !finite(config.psi) || !finite(config.c0)) {
        throw ValidationError("non-finite configuration");
    }
    if (config.psi <= -kPi || config.psi > kPi) {
        throw ValidationError("heading not normalized to (-pi, pi]");
    }
    if (std::abs(config.c0) > c0_max) throw ValidationError("curvature exceeds c0_max");
}

void validate(const ClothoidArc& arc, double c1_max) {
    if (!(arc.length > 0.0)) throw ValidationError("arc length must be positive");
    if (!finite(arc.c1) || std::abs(arc.c1) > c1_max) {
        throw ValidationError("curvature rate exceeds c1_max");
    }
}

}  // namespace trajadv::core
