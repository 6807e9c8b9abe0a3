#pragma once

#include <memory>
#include <string>
#include <vector>

#include "trajadv/core/types.hpp"

namespace trajadv::pred {

using core::LaneSegment;
using core::Scenario;
using core::Vec2;

// Model input: fixed-length position histories for every agent in the scene.
// Histories hold bare coordinates (not AgentStates) because attacks perturb
// exactly these values and nothing else.
struct PredictionRequest {
    double dt{0.5};
    int history_len{0};
    int future_len{0};
    std::vector<std::string> agent_ids;
    std::vector<std::vector<Vec2>> histories;  // [agent][step], step count == history_len
    std::size_t adversary{0};                  // index into agent_ids / histories
    std::vector<LaneSegment> lanes;
};

// Point-estimate forecast, one future per agent.
struct Prediction {
    std::vector<std::vector<Vec2>> futures;  // [agent][step], step count == future_len
};

void validate(const PredictionRequest& req);

// Builds the request for a scenario's observation window (the last
// history_len states before the future horizon, for every agent).
PredictionRequest make_request(const Scenario& scenario);

// sqrt(mean_k |pred_k - truth_k|^2)
double loss_rmse(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth);

// d(loss_rmse)/d(pred_k) = (pred_k - truth_k) / (n * rmse); zero at rmse = 0
// (the loss is non-differentiable there; zero is the subgradient choice).
std::vector<Vec2> loss_rmse_grad(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth);

class Predictor {
public:
    virtual ~Predictor() = default;

    virtual std::string name() const = 0;

    // Deterministic for fixed parameters and input.
    virtual Prediction predict(const PredictionRequest& req) const = 0;

    virtual bool has_exact_gradient() const { return false; }

    // Pull d(loss)/d(adversary future) back to d(loss)/d(adversary history).
    // Only implemented when has_exact_gradient(); the base throws.
    virtual std::vector<Vec2> backprop_adversary(const PredictionRequest& req,
                                                 const std::vector<Vec2>& dloss_dfuture) const;
};

enum class GradientMode {
    exact,              // analytic backprop; requires has_exact_gradient()
    finite_difference,  // central differences, step 1e-4 m, works on any model
};

// Gradient of loss_rmse(predicted adversary future, truth) with respect to
// the adversary's history coordinates. `truth` must hold future_len points.
std::vector<Vec2> grad_adversary_history(const Predictor& model, const PredictionRequest& req,
                                         const std::vector<Vec2>& truth,
                                         GradientMode mode = GradientMode::exact);

}  // namespace trajadv::pred
