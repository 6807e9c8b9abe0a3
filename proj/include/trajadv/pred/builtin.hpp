#pragma once

#include "trajadv/pred/predictor.hpp"

namespace trajadv::pred {

// Extrapolates each agent at the mean velocity of its observation window:
//   v = (last - first) / ((history_len - 1) * dt)
//   future_k = last + v * dt * (k + 1)
// A single-state history extrapolates at zero velocity.
class ConstantVelocityPredictor final : public Predictor {
public:
    std::string name() const override { return "constant_velocity"; }
    Prediction predict(const PredictionRequest& req) const override;
    bool has_exact_gradient() const override { return true; }
    std::vector<Vec2> backprop_adversary(const PredictionRequest& req,
                                         const std::vector<Vec2>& dloss_dfuture) const override;
};

// Fits x(t) and y(t) with a least-squares polynomial over the observation
// window and evaluates it at the future timesteps. The whole map is a single
// matrix M (future_len x history_len) applied per coordinate; M's rows sum
// to 1, so the predictor is exactly translation-equivariant.
class PolynomialPredictor final : public Predictor {
public:
    // degree is capped at history_len - 1.
    explicit PolynomialPredictor(int degree = 2) : degree_(degree) {}

    std::string name() const override { return "polynomial"; }
    Prediction predict(const PredictionRequest& req) const override;
    bool has_exact_gradient() const override { return true; }
    std::vector<Vec2> backprop_adversary(const PredictionRequest& req,
                                         const std::vector<Vec2>& dloss_dfuture) const override;

    // The extrapolation matrix for a given window shape, row-major
    // future_len x history_len. Exposed for direct inspection in tests.
    std::vector<double> extrapolation_matrix(int history_len, int future_len) const;

private:
    int degree_;
};

}  // namespace trajadv::pred
