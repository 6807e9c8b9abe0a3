#include "trajadv/core/synthetic.hpp"

#include "trajadv/core/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace trajadv::core {

namespace {

constexpr double kLaneMargin = 15.0;        // centerline extension past trajectory ends [m]
constexpr double kLaneChangeOffset = 3.0;   // lateral gap between source and target lane [m]
constexpr double kMaxTurnAngle = 2.4;       // cap on swept angle so arcs stay lane-like [rad]

int total_states(const GeneratorConfig& cfg) {
    return cfg.extra_leading_states + cfg.history_len + cfg.future_len;
}

Vec2 heading_dir(double psi) { return {std::cos(psi), std::sin(psi)}; }
Vec2 heading_normal(double psi) { return {-std::sin(psi), std::cos(psi)}; }

Vec2 disk_noise(std::mt19937_64& rng, double radius) {
    const double r = radius * std::sqrt(uniform01(rng));
    const double ang = uniform(rng, -std::numbers::pi, std::numbers::pi);
    return {r * std::cos(ang), r * std::sin(ang)};
}

LaneSegment straight_lane(Vec2 origin, double psi, double s_begin, double s_end, double width) {
    LaneSegment lane;
    lane.width = width;
    const Vec2 dir = heading_dir(psi);
    const double step = 5.0;
    for (double s = s_begin; s < s_end; s += step) lane.centerline.push_back(origin + dir * s);
    lane.centerline.push_back(origin + heading_dir(psi) * s_end);
    return lane;
}

LaneSegment arc_lane(Vec2 origin, double psi, double radius, double sign, double s_begin,
                     double s_end, double width) {
    LaneSegment lane;
    lane.width = width;
    const Vec2 center = origin + heading_normal(psi) * (sign * radius);
    auto at = [&](double s) {
        return center - heading_normal(psi + sign * s / radius) * (sign * radius);
    };
    const double step = 1.0;
    for (double s = s_begin; s < s_end; s += step) lane.centerline.push_back(at(s));
    lane.centerline.push_back(at(s_end));
    return lane;
}

struct ScenarioDraw {
    double speed;
    double psi;
    Vec2 origin;
    int agent_count;
};

ScenarioDraw draw_common(std::mt19937_64& rng, const GeneratorConfig& cfg) {
    ScenarioDraw d;
    d.speed = uniform(rng, cfg.speed_min, cfg.speed_max);
    d.psi = uniform(rng, -std::numbers::pi, std::numbers::pi);
    d.origin = {uniform(rng, -50.0, 50.0), uniform(rng, -50.0, 50.0)};
    d.agent_count = uniform_int(rng, cfg.agents_min, cfg.agents_max);
    return d;
}

void add_neighbors(Scenario& s, std::mt19937_64& rng, const GeneratorConfig& cfg,
                   const ScenarioDraw& d, int n_states) {
    const Vec2 dir = heading_dir(d.psi);
    const Vec2 nrm = heading_normal(d.psi);
    for (int j = 1; j < d.agent_count; ++j) {
        const double side = (j % 2 == 1) ? 1.0 : -1.0;
        const double lateral = side * (8.0 + 4.0 * ((j - 1) / 2));
        const double stagger = uniform(rng, -10.0, 10.0);
        const double speed = uniform(rng, cfg.speed_min, cfg.speed_max);
        const Vec2 start = d.origin + nrm * lateral + dir * stagger;

        Agent agent;
        agent.id = "a" + std::to_string(j);
        agent.semantic_class = "car";
        agent.trajectory.dt = cfg.dt;
        for (int i = 0; i < n_states; ++i) {
            const Vec2 p = start + dir * (speed * cfg.dt * i) + disk_noise(rng, cfg.position_noise);
            agent.trajectory.states.push_back({p.x, p.y, i});
        }
        s.agents.push_back(std::move(agent));

        const double run = speed * cfg.dt * (n_states - 1);
        s.lanes.push_back(straight_lane(start, d.psi, -kLaneMargin, run + kLaneMargin, cfg.lane_width));
    }
}

Scenario scenario_shell(const GeneratorConfig& cfg) {
    Scenario s;
    s.dt = cfg.dt;
    s.history_len = cfg.history_len;
    s.future_len = cfg.future_len;
    s.adversary_id = "a0";
    return s;
}

Agent adversary_shell(const GeneratorConfig& cfg) {
    Agent agent;
    agent.id = "a0";
    agent.semantic_class = "car";
    agent.trajectory.dt = cfg.dt;
    return agent;
}

Scenario make_straight(std::mt19937_64& rng, const GeneratorConfig& cfg) {
    const int n = total_states(cfg);
    Scenario s = scenario_shell(cfg);
    const ScenarioDraw d = draw_common(rng, cfg);
    const Vec2 dir = heading_dir(d.psi);

    Agent adv = adversary_shell(cfg);
    for (int i = 0; i < n; ++i) {
        const Vec2 p = d.origin + dir * (d.speed * cfg.dt * i) + disk_noise(rng, cfg.position_noise);
        adv.trajectory.states.push_back({p.x, p.y, i});
    }
    s.agents.push_back(std::move(adv));
    const double run = d.speed * cfg.dt * (n - 1);
    s.lanes.push_back(straight_lane(d.origin, d.psi, -kLaneMargin, run + kLaneMargin, cfg.lane_width));

    add_neighbors(s, rng, cfg, d, n);
    validate(s);
    return s;
}

Scenario make_turn(std::mt19937_64& rng, const GeneratorConfig& cfg) {
    const int n = total_states(cfg);
    Scenario s = scenario_shell(cfg);
    const ScenarioDraw d = draw_common(rng, cfg);

    const double run = d.speed * cfg.dt * (n - 1);
    // Radius respects the lateral-acceleration cap and keeps the total swept
    // angle (including lane margins) below kMaxTurnAngle so the arc never loops.
    const double r_accel = d.speed * d.speed / cfg.max_lateral_accel;
    const double r_sweep = (run + 2.0 * kLaneMargin) / kMaxTurnAngle;
    const double r_min = std::max(r_accel, r_sweep);
    const double radius = uniform(rng, r_min, r_min + 30.0);
    const double sign = uniform01(rng) < 0.5 ? 1.0 : -1.0;

    const Vec2 center = d.origin + heading_normal(d.psi) * (sign * radius);
    auto at = [&](double arc) {
        return center - heading_normal(d.psi + sign * arc / radius) * (sign * radius);
    };

    Agent adv = adversary_shell(cfg);
    for (int i = 0; i < n; ++i) {
        const Vec2 p = at(d.speed * cfg.dt * i) + disk_noise(rng, cfg.position_noise);
        adv.trajectory.states.push_back({p.x, p.y, i});
    }
    s.agents.push_back(std::move(adv));
    s.lanes.push_back(
        arc_lane(d.origin, d.psi, radius, sign, -kLaneMargin, run + kLaneMargin, cfg.lane_width));

    add_neighbors(s, rng, cfg, d, n);
    validate(s);
    return s;
}

Scenario make_lane_change(std::mt19937_64& rng, const GeneratorConfig& cfg) {
    const int n = total_states(cfg);
    Scenario s = scenario_shell(cfg);
    const ScenarioDraw d = draw_common(rng, cfg);
    const Vec2 dir = heading_dir(d.psi);
    const Vec2 nrm = heading_normal(d.psi);
    const double side = uniform01(rng) < 0.5 ? 1.0 : -1.0;
    const double duration = cfg.dt * (n - 1);

    Agent adv = adversary_shell(cfg);
    for (int i = 0; i < n; ++i) {
        const double t = cfg.dt * i;
        // Cosine ramp spanning the whole horizon: starts and ends with zero
        // lateral velocity, peak lateral offset midway between the two lanes.
        const double lateral =
            side * 0.5 * kLaneChangeOffset * (1.0 - std::cos(std::numbers::pi * t / duration));
        const Vec2 p =
            d.origin + dir * (d.speed * t) + nrm * lateral + disk_noise(rng, cfg.position_noise);
        adv.trajectory.states.push_back({p.x, p.y, i});
    }
    s.agents.push_back(std::move(adv));

    const double run = d.speed * duration;
    s.lanes.push_back(straight_lane(d.origin, d.psi, -kLaneMargin, run + kLaneMargin, cfg.lane_width));
    s.lanes.push_back(straight_lane(d.origin + nrm * (side * kLaneChangeOffset), d.psi, -kLaneMargin,
                                    run + kLaneMargin, cfg.lane_width));

    add_neighbors(s, rng, cfg, d, n);
    validate(s);
    return s;
}

}  // namespace

std::vector<Scenario> generate_synthetic_scenarios(const GeneratorConfig& config,
                                                   std::uint64_t seed) {
    if (config.straight_count < 0 || config.turn_count < 0 || config.lane_change_count < 0)
        throw ValidationError("scenario counts must be non-negative");
    if (!(config.speed_min > 0.0) || !(config.speed_max >= config.speed_min))
        throw ValidationError("need 0 < speed_min <= speed_max");
    if (config.agents_min < 1 || config.agents_max < config.agents_min)
        throw ValidationError("need 1 <= agents_min <= agents_max");
    if (config.history_len < 1 || config.future_len < 1 || config.extra_leading_states < 0)
        throw ValidationError("need history_len, future_len >= 1 and extra_leading_states >= 0");
    if (!(config.dt > 0.0)) throw ValidationError("dt must be positive");
    if (!(config.position_noise >= 0.0) || config.position_noise >= 0.1)
        throw ValidationError("position_noise must lie in [0, 0.1)");
    if (!(config.max_lateral_accel > 0.0))
        throw ValidationError("max_lateral_accel must be positive");

    std::mt19937_64 rng(mix_seed(seed, 0x737963'67656eULL));
    std::vector<Scenario> out;
    out.reserve(static_cast<std::size_t>(config.total()));
    for (int i = 0; i < config.straight_count; ++i) out.push_back(make_straight(rng, config));
    for (int i = 0; i < config.turn_count; ++i) out.push_back(make_turn(rng, config));
    for (int i = 0; i < config.lane_change_count; ++i) out.push_back(make_lane_change(rng, config));
    return out;
}

}  // namespace trajadv::core
