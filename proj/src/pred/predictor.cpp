#include "trajadv/pred/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace trajadv::pred {

void validate(const PredictionRequest& req) {
    if (!(req.dt > 0.0)) throw core::ValidationError("request dt must be positive");
    if (req.history_len < 1 || req.future_len < 1)
        throw core::ValidationError("request horizons must be >= 1");
    if (req.agent_ids.size() != req.histories.size())
        throw core::ValidationError("agent_ids and histories must align");
    if (req.histories.empty()) throw core::ValidationError("request needs at least one agent");
    if (req.adversary >= req.histories.size())
        throw core::ValidationError("adversary index out of range");
    for (const auto& h : req.histories) {
        if (static_cast<int>(h.size()) != req.history_len)
            throw core::ValidationError("every history must have exactly history_len states");
        for (const auto& p : h) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw core::ValidationError("history coordinates must be finite");
        }
    }
}

PredictionRequest make_request(const Scenario& scenario) {
    core::validate(scenario);
    PredictionRequest req;
    req.dt = scenario.dt;
    req.history_len = scenario.history_len;
    req.future_len = scenario.future_len;
    req.lanes = scenario.lanes;
    req.adversary = static_cast<std::size_t>(scenario.adversary_index());
    for (int a = 0; a < static_cast<int>(scenario.agents.size()); ++a) {
        req.agent_ids.push_back(scenario.agents[a].id);
        std::vector<Vec2> h;
        for (const auto& st : scenario.history_of(a)) h.push_back(st.position());
        req.histories.push_back(std::move(h));
    }
    validate(req);
    return req;
}

double loss_rmse(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth) {
    if (pred.size() != truth.size() || pred.empty())
        throw core::ValidationError("loss_rmse: horizon mismatch");
    double sum = 0.0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const Vec2 d = pred[k] - truth[k];
        sum += d.norm_sq();
    }
    return std::sqrt(sum / static_cast<double>(pred.size()));
}

std::vector<Vec2> loss_rmse_grad(const std::vector<Vec2>& pred, const std::vector<Vec2>& truth) {
    const double rmse = loss_rmse(pred, truth);
    std::vector<Vec2> grad(pred.size(), Vec2{0.0, 0.0});
    if (rmse == 0.0) return grad;
    const double scale = 1.0 / (static_cast<double>(pred.size()) * rmse);
    for (std::size_t k = 0; k < pred.size(); ++k) grad[k] = (pred[k] - truth[k]) * scale;
    return grad;
}

std::vector<Vec2> Predictor::backprop_adversary(const PredictionRequest&,
                                                const std::vector<Vec2>&) const {
    throw core::ValidationError("predictor '" + name() +
                                "' has no exact gradient; use GradientMode::finite_difference");
}

namespace {

std::vector<Vec2> finite_difference_gradient(const Predictor& model, const PredictionRequest& req,
                                             const std::vector<Vec2>& truth) {
    constexpr double h = 1e-4;
    PredictionRequest probe = req;
    auto& hist = probe.histories[probe.adversary];
    std::vector<Vec2> grad(hist.size(), Vec2{0.0, 0.0});
    auto eval = [&]() { return loss_rmse(model.predict(probe).futures[probe.adversary], truth); };
    for (std::size_t k = 0; k < hist.size(); ++k) {
        for (int axis = 0; axis < 2; ++axis) {
            double& coord = axis == 0 ? hist[k].x : hist[k].y;
            const double saved = coord;
            coord = saved + h;
            const double up = eval();
            coord = saved - h;
            const double down = eval();
            coord = saved;
            (axis == 0 ? grad[k].x : grad[k].y) = (up - down) / (2.0 * h);
        }
    }
    return grad;
}

}  // namespace

std::vector<Vec2> grad_adversary_history(const Predictor& model, const PredictionRequest& req,
                                         const std::vector<Vec2>& truth, GradientMode mode) {
    validate(req);
    if (static_cast<int>(truth.size()) != req.future_len)
        throw core::ValidationError("truth horizon does not match request future_len");

    if (mode == GradientMode::finite_difference)
        return finite_difference_gradient(model, req, truth);

    if (!model.has_exact_gradient()) {
        throw core::ValidationError("predictor '" + model.name() +
                                    "' has no exact gradient; use finite_difference");
    }
    const Prediction pred = model.predict(req);
    const auto dloss = loss_rmse_grad(pred.futures[req.adversary], truth);
    return model.backprop_adversary(req, dloss);
}

}  // namespace trajadv::pred
