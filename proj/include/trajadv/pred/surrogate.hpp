#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "trajadv/pred/predictor.hpp"

namespace trajadv::pred {

struct SurrogateHyperparams {
    int hidden{64};
    int epochs{12000};
    double learning_rate{1e-3};
    int neighbor_count{4};
    // Radius (m) of uniform disk noise added to every history point of each
    // training example, fresh per epoch. Off by default: smoothing the net
    // this way also flattens the input sensitivity that makes it a usable
    // victim model.
    double input_noise{0.0};
};

struct TrainingReport {
    int epochs_run{0};
    double final_mse{0.0};   // mean squared displacement per future step
    bool diverged{false};    // loss went non-finite; training stopped there
};

// One-hidden-layer residual predictor. For a target agent the output is the
// constant-velocity extrapolation of its window plus a learned correction:
//
//   future_k = cv_k + net(features)[k]
//   net(f)   = W2 tanh(W1 f + b1) + b2
//
// Features: the window's step vectors (scaled by 1/10) and the relative
// positions of the nearest other agents at the current timestep (scaled by
// 1/50, zero-padded to neighbor_count slots). Backpropagation is manual.
class NeuralSurrogate final : public Predictor {
public:
    NeuralSurrogate(int history_len, int future_len, int hidden, int neighbor_count,
                    std::uint64_t seed);

    std::string name() const override { return "neural_surrogate"; }
    Prediction predict(const PredictionRequest& req) const override;
    bool has_exact_gradient() const override { return true; }
    std::vector<Vec2> backprop_adversary(const PredictionRequest& req,
                                         const std::vector<Vec2>& dloss_dfuture) const override;

    int history_len() const { return history_len_; }
    int future_len() const { return future_len_; }
    int hidden() const { return hidden_; }
    int neighbor_count() const { return neighbor_count_; }
    int feature_dim() const { return 2 * (history_len_ - 1) + 2 * neighbor_count_; }

    // JSON parameter dump with a shape header; loading validates shapes.
    void save_params(const std::filesystem::path& path) const;
    static NeuralSurrogate load_params(const std::filesystem::path& path);

private:
    friend NeuralSurrogate train_tiny_surrogate(const std::vector<core::Scenario>&,
                                                const SurrogateHyperparams&, std::uint64_t,
                                                TrainingReport*);

    struct Forward {
        std::vector<double> features;
        std::vector<double> hidden;  // tanh activations
        std::vector<double> output;  // 2 * future_len residuals
        std::vector<Vec2> base;      // constant-velocity extrapolation
        std::vector<std::size_t> neighbor_agents;  // agents filling the slots, in slot order
    };
    Forward forward_target(const PredictionRequest& req, std::size_t target) const;

    int history_len_;
    int future_len_;
    int hidden_;
    int neighbor_count_;
    std::vector<double> w1_;  // hidden x feature_dim, row-major
    std::vector<double> b1_;
    std::vector<double> w2_;  // (2*future_len) x hidden, row-major
    std::vector<double> b2_;
};

// Fits a NeuralSurrogate on every (scenario, agent) window in the dataset
// with per-example Adam on mean squared displacement. Deterministic in seed;
// epochs = 0 returns the freshly initialized model.
NeuralSurrogate train_tiny_surrogate(const std::vector<core::Scenario>& dataset,
                                     const SurrogateHyperparams& hyperparams, std::uint64_t seed,
                                     TrainingReport* report = nullptr);

}  // namespace trajadv::pred
