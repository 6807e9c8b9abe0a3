#include "trajadv/pursuit/pursuit.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "trajadv/clothoid/clothoid.hpp"
#include "trajadv/core/geometry.hpp"

namespace trajadv::pursuit {

void validate(const PursuitConfig& config) {
    if (!(config.alpha >= 1.0)) throw core::ValidationError("pursuit alpha must be >= 1");
    if (!(config.step_length > 0.0)) throw core::ValidationError("step_length must be positive");
    if (!(config.c0_max > 0.0) || !(config.c1_max_base > 0.0))
        throw core::ValidationError("curvature bounds must be positive");
    if (!(config.goal_tolerance > 0.0))
        throw core::ValidationError("goal_tolerance must be positive");
    if (config.max_steps < 0) throw core::ValidationError("max_steps must be >= 0");
}

double average_speed(const core::Scenario& scenario) {
    core::validate(scenario);
    if (scenario.history_len < 2)
        throw core::ValidationError("average_speed needs an observation window of >= 2 states");
    const auto history = scenario.history_of(scenario.adversary_index());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < history.size(); ++i)
        sum += (history[i + 1].position() - history[i].position()).norm();
    const double v = sum / (static_cast<double>(history.size() - 1) * scenario.dt);
    if (v == 0.0)
        throw core::ValidationError("adversary window is stationary; no tracking speed exists");
    return v;
}

LookaheadResult lookahead_target(const std::vector<Vec2>& reference, const Configuration& pose,
                                 double p_v) {
    if (reference.size() < 2)
        throw core::ValidationError("lookahead needs a reference of >= 2 points");
    if (!(p_v > 0.0)) throw core::ValidationError("lookahead distance must be positive");

    const core::Polyline poly(reference);
    const Vec2 c = pose.position();
    const auto proj = poly.project(c);

    LookaheadResult out;
    bool found = false;
    if ((proj.point - c).norm() >= p_v) {
        // Pose has drifted farther than the lookahead radius; steer back
        // toward the closest path point.
        out.target = proj.point;
        found = true;
    } else {
        for (std::size_t i = proj.segment; i + 1 < reference.size() && !found; ++i) {
            const Vec2 a = i == proj.segment ? proj.point : reference[i];
            const Vec2 d = reference[i + 1] - a;
            const Vec2 f = a - c;
            const double qa = d.norm_sq();
            if (qa == 0.0) continue;
            const double qb = 2.0 * f.dot(d);
            const double qc = f.norm_sq() - p_v * p_v;
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc < 0.0) continue;
            // Larger root: where the path exits the circle going forward.
            const double t = (-qb + std::sqrt(disc)) / (2.0 * qa);
            if (t >= 0.0 && t <= 1.0) {
                out.target = a + d * t;
                found = true;
            }
        }
        if (!found) out.target = reference.back();  // remaining path inside the circle
    }

    const Vec2 rel = out.target - c;
    out.theta = -std::sin(pose.psi) * rel.x + std::cos(pose.psi) * rel.y;
    return out;
}

double desired_curvature(double theta, double p_v) {
    if (!(p_v > 0.0)) throw core::ValidationError("lookahead distance must be positive");
    return 2.0 * theta / (p_v * p_v);
}

double feasible_curvature_rate(double c0_now, double c0_desired, double v,
                               const PursuitConfig& config) {
    validate(config);
    if (!(v > 0.0)) throw core::ValidationError("speed must be positive");

    const double c1_max = config.c1_max_base / std::max(v, 1.0);
    double c1 = std::clamp((c0_desired - c0_now) / config.step_length, -c1_max, c1_max);

    const double c_end = c0_now + c1 * config.step_length;
    if (c_end > config.c0_max) c1 = (config.c0_max - c0_now) / config.step_length;
    if (c_end < -config.c0_max) c1 = (-config.c0_max - c0_now) / config.step_length;
    return c1;
}

ReconstructionTrace reconstruct(const std::vector<Vec2>& reference, double v,
                                const PursuitConfig& config) {
    validate(config);
    if (!(v > 0.0)) throw core::ValidationError("reconstruction speed must be positive");
    if (reference.size() < 2)
        throw core::ValidationError("reference needs >= 2 points");

    std::size_t j = 1;
    while (j < reference.size() && (reference[j] - reference[0]).norm() == 0.0) ++j;
    if (j == reference.size())
        throw core::ValidationError("reference is degenerate (all points coincide)");
    const Vec2 d0 = reference[j] - reference[0];

    const double p_v = config.alpha * v;
    const double ref_length = core::Polyline(reference).length();
    const int max_steps =
        config.max_steps > 0
            ? config.max_steps
            : std::max(1, static_cast<int>(std::ceil(10.0 * ref_length / config.step_length)));

    ReconstructionTrace trace;
    Configuration pose;
    pose.x = reference[0].x;
    pose.y = reference[0].y;
    pose.psi = std::atan2(d0.y, d0.x);
    pose.c0 = 0.0;
    trace.configs.push_back(pose);

    const Vec2 goal = reference.back();
    while (true) {
        if (core::distance(pose.position(), goal) <= config.goal_tolerance) {
            trace.reached_goal = true;
            break;
        }
        if (static_cast<int>(trace.arcs.size()) >= max_steps) break;

        const LookaheadResult la = lookahead_target(reference, pose, p_v);
        // The steering law's distance is the distance to the chosen target
        // point; the nominal perceptual distance only applies while the path
        // ahead is long enough to supply a target that far away. Once the
        // target collapses onto the truncated end of the reference, using the
        // shrinking chord keeps the commanded circle passing through it —
        // otherwise steering authority fades near the goal and the tracker
        // stalls in a permanent near-miss orbit.
        const double chord = core::distance(la.target, pose.position());
        const double d_eff = std::clamp(chord, config.step_length, p_v);
        const double c_des =
            std::clamp(desired_curvature(la.theta, d_eff), -config.c0_max, config.c0_max);
        const double c1 = feasible_curvature_rate(pose.c0, c_des, v, config);
        const ClothoidArc arc{c1, config.step_length};
        pose = clothoid::propagate(pose, arc);
        trace.arcs.push_back(arc);
        trace.configs.push_back(pose);
        trace.lookahead_log.push_back({la.target, la.theta, c_des, c1});
    }
    return trace;
}

ResampleResult resample(const ReconstructionTrace& trace, double v, double dt, int count) {
    if (!(v > 0.0) || !(dt > 0.0)) throw core::ValidationError("resample needs v > 0 and dt > 0");
    if (count < 1) throw core::ValidationError("resample count must be >= 1");
    if (trace.configs.empty() || trace.configs.size() != trace.arcs.size() + 1)
        throw core::ValidationError("malformed reconstruction trace");

    std::vector<double> cum(trace.arcs.size() + 1, 0.0);
    for (std::size_t i = 0; i < trace.arcs.size(); ++i)
        cum[i + 1] = cum[i] + trace.arcs[i].length;
    const double total = cum.back();
    const double spacing = v * dt;
    const double eps = 1e-9 * std::max(1.0, total);

    ResampleResult rs;
    rs.requested = count;
    rs.trajectory.dt = dt;
    for (int i = 0; i < count; ++i) {
        const double s = spacing * static_cast<double>(i);
        if (s > total + eps) break;
        const double sc = std::min(s, total);
        const auto it = std::upper_bound(cum.begin(), cum.end(), sc);
        const std::size_t a =
            it == cum.begin() ? 0 : static_cast<std::size_t>(it - cum.begin()) - 1;
        Vec2 pos;
        if (a >= trace.arcs.size()) {
            pos = trace.configs.back().position();
        } else {
            const Configuration c =
                clothoid::propagate(trace.configs[a], {trace.arcs[a].c1, sc - cum[a]});
            pos = c.position();
        }
        rs.trajectory.states.push_back({pos.x, pos.y, i});
    }
    rs.achieved = static_cast<int>(rs.trajectory.size());
    rs.complete = rs.achieved == rs.requested;
    return rs;
}

AttackArtifacts sa_attack(const pred::Predictor& model, const core::Scenario& scenario,
                          const attack::SearchConfig& search_config,
                          const PursuitConfig& pursuit_config) {
    validate(pursuit_config);

    AttackArtifacts art;
    art.reference = attack::generate_reference(model, scenario, search_config);
    art.v = average_speed(scenario);
    art.p_v = pursuit_config.alpha * art.v;
    art.trace = reconstruct(art.reference.reference.points, art.v, pursuit_config);
    art.reconstruction_complete = art.trace.reached_goal;

    // With a pre-window junction state the first resampled point realizes
    // that state, not the window start, so one extra sample is taken and the
    // leading one dropped from the emitted window.
    const bool leading = art.reference.reference.has_leading_state;
    const int window = scenario.history_len;
    art.resampled = resample(art.trace, art.v, scenario.dt, leading ? window + 1 : window);

    std::vector<Vec2> pts;
    for (std::size_t i = leading ? 1 : 0; i < art.resampled.trajectory.size(); ++i)
        pts.push_back(art.resampled.trajectory.point(i));

    if (static_cast<int>(pts.size()) < window) {
        // Trace ran short (incomplete reconstruction): continue straight at
        // the tracking speed so the window keeps its length and spacing.
        art.padded = true;
        const double spacing = art.v * scenario.dt;
        Vec2 anchor;
        Vec2 dir;
        if (pts.size() >= 2) {
            anchor = pts.back();
            dir = pts[pts.size() - 1] - pts[pts.size() - 2];
            dir = dir * (spacing / dir.norm());
        } else {
            const Configuration& end = art.trace.configs.back();
            anchor = pts.empty() ? art.resampled.trajectory.point(0) : pts.back();
            dir = Vec2{std::cos(end.psi), std::sin(end.psi)} * spacing;
        }
        while (static_cast<int>(pts.size()) < window) {
            anchor += dir;
            pts.push_back(anchor);
        }
    }

    const int adv = scenario.adversary_index();
    const int start = static_cast<int>(scenario.history_start(adv));
    art.adversarial_history.dt = scenario.dt;
    for (int k = 0; k < window; ++k)
        art.adversarial_history.states.push_back({pts[k].x, pts[k].y, start + k});
    return art;
}

void write_trace_jsonl(const std::filesystem::path& path, const ReconstructionTrace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw core::ParseError("cannot open file for writing: " + path.string());
    for (std::size_t i = 0; i < trace.configs.size(); ++i) {
        nlohmann::ordered_json row;
        row["step"] = i;
        const Configuration& c = trace.configs[i];
        row["config"] = {{"x", c.x}, {"y", c.y}, {"psi", c.psi}, {"c0", c.c0}};
        if (i < trace.arcs.size()) {
            row["arc"] = {{"c1", trace.arcs[i].c1}, {"length", trace.arcs[i].length}};
            if (i < trace.lookahead_log.size()) {
                const LookaheadStep& la = trace.lookahead_log[i];
                row["lookahead"] = {{"target", {la.target.x, la.target.y}},
                                    {"theta", la.theta},
                                    {"c0_desired", la.c0_desired},
                                    {"c1_limited", la.c1_limited}};
            }
        }
        out << row.dump() << "\n";
    }
}

}  // namespace trajadv::pursuit
