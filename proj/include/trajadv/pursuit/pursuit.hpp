#pragma once

#include <filesystem>
#include <vector>

#include "trajadv/attack/search.hpp"
#include "trajadv/core/types.hpp"
#include "trajadv/pred/predictor.hpp"

namespace trajadv::pursuit {

using core::ClothoidArc;
using core::Configuration;
using core::Vec2;

struct PursuitConfig {
    double alpha{2.0};         // lookahead distance = alpha * average speed
    double step_length{0.2};   // clothoid arc length, meters
    double c0_max{0.2};        // curvature bound, 1/m
    double c1_max_base{0.5};   // curvature-rate bound at v <= 1, 1/m^2
    double goal_tolerance{0.5};
    int max_steps{0};          // 0: auto, 10 * (reference length / step_length)
};

void validate(const PursuitConfig& config);

struct LookaheadStep {
    Vec2 target;
    double theta{0.0};       // signed lateral offset of target, left positive
    double c0_desired{0.0};
    double c1_limited{0.0};
};

struct ReconstructionTrace {
    std::vector<Configuration> configs;  // p0..pn, |configs| = |arcs| + 1
    std::vector<ClothoidArc> arcs;
    std::vector<LookaheadStep> lookahead_log;  // one entry per arc
    bool reached_goal{false};
};

// Mean step displacement of the adversary's true observation window divided
// by dt. Throws ValidationError on an all-stationary window.
double average_speed(const core::Scenario& scenario);

struct LookaheadResult {
    Vec2 target;
    double theta{0.0};
};

// The reference point at travel distance p_v from the pose: first
// inside-to-outside crossing of the radius-p_v circle, searched forward of
// the pose's closest projection onto the polyline. Falls back to the final
// reference point when the remaining path stays inside the circle, and to
// the projection itself when the pose sits farther than p_v from the path.
LookaheadResult lookahead_target(const std::vector<Vec2>& reference, const Configuration& pose,
                                 double p_v);

// 2 * theta / p_v^2: the curvature of the circle through the pose tangent to
// its heading that passes through the target.
double desired_curvature(double theta, double p_v);

// Curvature rate toward c0_desired over one step, clamped to
// +-c1_max_base / max(v, 1), then shrunk so the end-of-arc curvature stays
// inside [-c0_max, c0_max].
double feasible_curvature_rate(double c0_now, double c0_desired, double v,
                               const PursuitConfig& config);

// Pure-pursuit tracking of the reference with clothoid arcs of step_length
// until the position is within goal_tolerance of the final reference point.
// p0 sits on the first reference point, heading along the first segment,
// curvature 0. A trace that hits the step limit is returned partial with
// reached_goal = false.
ReconstructionTrace reconstruct(const std::vector<Vec2>& reference, double v,
                                const PursuitConfig& config);

struct ResampleResult {
    core::Trajectory trajectory;  // t_index 0..achieved-1, dt as given
    int requested{0};
    int achieved{0};
    bool complete{false};
};

// count waypoints at arc-length spacing v*dt from the trace start. Positions
// come from exact propagation to each arc offset, not from chord walking.
// When the trace is shorter than (count-1)*v*dt the result stops at the
// trace end with achieved < requested.
ResampleResult resample(const ReconstructionTrace& trace, double v, double dt, int count);

// Stage 1 + Stage 2: reference search, reconstruction at the window's
// average speed, resampling to exactly history_len adversarial input points.
struct AttackArtifacts {
    core::Trajectory adversarial_history;  // t_index matches the window it replaces
    attack::ReferenceResult reference;
    ReconstructionTrace trace;
    ResampleResult resampled;
    double v{0.0};    // average window speed used for reconstruction
    double p_v{0.0};  // lookahead distance
    bool reconstruction_complete{false};
    bool padded{false};  // resample shortfall filled by straight continuation
};

AttackArtifacts sa_attack(const pred::Predictor& model, const core::Scenario& scenario,
                          const attack::SearchConfig& search_config,
                          const PursuitConfig& pursuit_config);

// One JSON object per line: step, config (x, y, psi, c0), arc (c1, length),
// lookahead fields. The final line carries the end configuration only.
void write_trace_jsonl(const std::filesystem::path& path, const ReconstructionTrace& trace);

}  // namespace trajadv::pursuit
