#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "trajadv/core/rng.hpp"
#include "trajadv/core/types.hpp"
#include "trajadv/pred/predictor.hpp"

namespace trajadv::attack {

using core::Vec2;

// Per-step displacement of the adversary's observation window.
struct Perturbation {
    std::vector<Vec2> deltas;  // one per history step
};

struct SearchConfig {
    int restarts{20};
    int iterations{50};
    double learning_rate{0.01};
    double bound{1.0};  // max Euclidean norm of each delta, meters
    std::uint64_t seed{0};
    pred::GradientMode gradient_mode{pred::GradientMode::exact};
};

void validate(const SearchConfig& config);

// Waypoint list handed to the reconstruction stage: the real state preceding
// the observation window (when one exists), the perturbed window, and the
// first future state. Junction points are copied bitwise from the scenario.
struct ReferenceTrajectory {
    std::vector<Vec2> points;
    bool has_leading_state{false};  // true: |points| = L_I + 2, else L_I + 1
};

struct IterateRecord {
    int restart{0};
    int iteration{0};  // 0 is the projected initial point
    double rmse{0.0};
    Perturbation perturbation;
};

struct OptimizeResult {
    Perturbation perturbation;  // best iterate, not necessarily the last
    double achieved_rmse{0.0};
    std::vector<IterateRecord> iterates;
};

struct ReferenceResult {
    ReferenceTrajectory reference;
    Perturbation best_perturbation;
    double achieved_rmse{0.0};
    double unattacked_rmse{0.0};
    int best_restart{0};
    std::vector<IterateRecord> iterates;  // all restarts, restart-major order
};

struct BaselineResult {
    std::vector<Vec2> history;  // perturbed window, used directly as input
    Perturbation perturbation;
    double achieved_rmse{0.0};
    double unattacked_rmse{0.0};
    std::vector<IterateRecord> iterates;
};

// Draws one perturbation with each delta uniform in the radius-bound disk.
Perturbation draw_perturbation(int history_len, double bound, std::mt19937_64& rng);

// config.restarts perturbations drawn sequentially from rng.
std::vector<Perturbation> init_perturbations(const SearchConfig& config, int history_len,
                                             std::mt19937_64& rng);

// Rescales any delta with norm > bound onto the bound sphere; idempotent.
Perturbation project(const Perturbation& pert, double bound);

// Projected Adam ascent on loss_rmse(predicted adversary future, true
// future) over the window displacements. Runs config.iterations steps from
// pert0 and returns the best iterate seen (iterate 0 included, so
// achieved_rmse >= rmse at the projected pert0). When pin_first_delta is
// set, the first window point is held fixed — used when that point doubles
// as the reference trajectory's initial junction state and could not be
// moved by the reconstruction stage anyway.
OptimizeResult optimize_perturbation(const pred::Predictor& model, const core::Scenario& scenario,
                                     const Perturbation& pert0, const SearchConfig& config,
                                     bool pin_first_delta = false, int restart_label = 0);

// Stage 1: all restarts (restart r seeded config.seed + r), best achieved
// RMSE wins, ties to the lowest restart index; junction states are
// concatenated around the winning perturbed window.
ReferenceResult generate_reference(const pred::Predictor& model, const core::Scenario& scenario,
                                   const SearchConfig& config);

// Comparison baseline: the same multi-restart projected search, but the
// perturbed window is the attack output itself (no junctions, no
// reconstruction, no kinematic feasibility).
BaselineResult baseline_search_attack(const pred::Predictor& model,
                                      const core::Scenario& scenario,
                                      const SearchConfig& config);

// One JSON object per line: restart, iteration, rmse, deltas.
void write_iterates_jsonl(const std::filesystem::path& path,
                          const std::vector<IterateRecord>& iterates);

}  // namespace trajadv::attack
