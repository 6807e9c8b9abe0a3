#include "trajadv/pred/surrogate.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <sstream>

#include "trajadv/core/rng.hpp"
#include "trajadv/optim/adam.hpp"

namespace trajadv::pred {

namespace {

constexpr double kStepScale = 0.1;       // step vectors enter as (p1-p0)/10
constexpr double kNeighborScale = 0.02;  // neighbor offsets enter as rel/50

Vec2 window_velocity(const std::vector<Vec2>& history, double dt) {
    if (history.size() < 2) return {0.0, 0.0};
    return (history.back() - history.front()) /
           (static_cast<double>(history.size() - 1) * dt);
}

}  // namespace

NeuralSurrogate::NeuralSurrogate(int history_len, int future_len, int hidden, int neighbor_count,
                                 std::uint64_t seed)
    : history_len_(history_len),
      future_len_(future_len),
      hidden_(hidden),
      neighbor_count_(neighbor_count) {
    if (history_len_ < 2 || future_len_ < 1 || hidden_ < 1 || neighbor_count_ < 0)
        throw core::ValidationError("surrogate shape parameters out of range");

    const int f = feature_dim();
    const int out = 2 * future_len_;
    w1_.resize(static_cast<std::size_t>(hidden_) * f);
    b1_.assign(static_cast<std::size_t>(hidden_), 0.0);
    w2_.resize(static_cast<std::size_t>(out) * hidden_);
    b2_.assign(static_cast<std::size_t>(out), 0.0);

    std::mt19937_64 rng(core::mix_seed(seed, 0x6e6574'696e6974ULL));
    const double r1 = 1.0 / std::sqrt(static_cast<double>(f));
    for (auto& w : w1_) w = core::uniform(rng, -r1, r1);
    const double r2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
    for (auto& w : w2_) w = core::uniform(rng, -r2, r2);
}

NeuralSurrogate::Forward NeuralSurrogate::forward_target(const PredictionRequest& req,
                                                         std::size_t target) const {
    const auto& hist = req.histories[target];
    Forward fw;

    fw.features.assign(static_cast<std::size_t>(feature_dim()), 0.0);
    for (int j = 0; j + 1 < history_len_; ++j) {
        const Vec2 step = (hist[j + 1] - hist[j]) * kStepScale;
        fw.features[2 * j] = step.x;
        fw.features[2 * j + 1] = step.y;
    }
    // Nearest other agents by current-position distance; ties break on agent
    // index so slot assignment is deterministic.
    std::vector<std::pair<double, std::size_t>> others;
    for (std::size_t a = 0; a < req.histories.size(); ++a) {
        if (a == target) continue;
        others.emplace_back((req.histories[a].back() - hist.back()).norm(), a);
    }
    std::sort(others.begin(), others.end());
    const int filled = std::min<int>(neighbor_count_, static_cast<int>(others.size()));
    const int base_off = 2 * (history_len_ - 1);
    for (int m = 0; m < filled; ++m) {
        const Vec2 rel = (req.histories[others[m].second].back() - hist.back()) * kNeighborScale;
        fw.features[base_off + 2 * m] = rel.x;
        fw.features[base_off + 2 * m + 1] = rel.y;
        fw.neighbor_agents.push_back(others[m].second);
    }

    const int f = feature_dim();
    fw.hidden.resize(static_cast<std::size_t>(hidden_));
    for (int h = 0; h < hidden_; ++h) {
        double z = b1_[h];
        for (int i = 0; i < f; ++i) z += w1_[static_cast<std::size_t>(h) * f + i] * fw.features[i];
        fw.hidden[h] = std::tanh(z);
    }
    const int out = 2 * future_len_;
    fw.output.resize(static_cast<std::size_t>(out));
    for (int o = 0; o < out; ++o) {
        double z = b2_[o];
        for (int h = 0; h < hidden_; ++h)
            z += w2_[static_cast<std::size_t>(o) * hidden_ + h] * fw.hidden[h];
        fw.output[o] = z;
    }

    const Vec2 v = window_velocity(hist, req.dt);
    fw.base.reserve(static_cast<std::size_t>(future_len_));
    for (int k = 1; k <= future_len_; ++k) fw.base.push_back(hist.back() + v * (req.dt * k));
    return fw;
}

Prediction NeuralSurrogate::predict(const PredictionRequest& req) const {
    validate(req);
    if (req.history_len != history_len_ || req.future_len != future_len_)
        throw core::ValidationError("request horizons do not match surrogate shape");

    Prediction out;
    out.futures.reserve(req.histories.size());
    for (std::size_t a = 0; a < req.histories.size(); ++a) {
        const Forward fw = forward_target(req, a);
        std::vector<Vec2> fut(static_cast<std::size_t>(future_len_));
        for (int k = 0; k < future_len_; ++k) {
            fut[k] = fw.base[k] + Vec2{fw.output[2 * k], fw.output[2 * k + 1]};
        }
        out.futures.push_back(std::move(fut));
    }
    return out;
}

std::vector<Vec2> NeuralSurrogate::backprop_adversary(
    const PredictionRequest& req, const std::vector<Vec2>& dloss_dfuture) const {
    validate(req);
    if (req.history_len != history_len_ || req.future_len != future_len_)
        throw core::ValidationError("request horizons do not match surrogate shape");
    if (static_cast<int>(dloss_dfuture.size()) != future_len_)
        throw core::ValidationError("upstream gradient horizon mismatch");

    const std::size_t target = req.adversary;
    const Forward fw = forward_target(req, target);
    const int f = feature_dim();
    const int out = 2 * future_len_;
    const std::size_t n = req.histories[target].size();

    std::vector<double> g_out(static_cast<std::size_t>(out));
    for (int k = 0; k < future_len_; ++k) {
        g_out[2 * k] = dloss_dfuture[k].x;
        g_out[2 * k + 1] = dloss_dfuture[k].y;
    }
    std::vector<double> g_hidden(static_cast<std::size_t>(hidden_), 0.0);
    for (int o = 0; o < out; ++o) {
        for (int h = 0; h < hidden_; ++h)
            g_hidden[h] += w2_[static_cast<std::size_t>(o) * hidden_ + h] * g_out[o];
    }
    std::vector<double> g_feat(static_cast<std::size_t>(f), 0.0);
    for (int h = 0; h < hidden_; ++h) {
        const double gz = g_hidden[h] * (1.0 - fw.hidden[h] * fw.hidden[h]);
        for (int i = 0; i < f; ++i) g_feat[i] += w1_[static_cast<std::size_t>(h) * f + i] * gz;
    }

    std::vector<Vec2> grad(n, Vec2{0.0, 0.0});
    for (int j = 0; j + 1 < history_len_; ++j) {
        const Vec2 gs{g_feat[2 * j], g_feat[2 * j + 1]};
        grad[j + 1] += gs * kStepScale;
        grad[j] -= gs * kStepScale;
    }
    const int base_off = 2 * (history_len_ - 1);
    for (std::size_t m = 0; m < fw.neighbor_agents.size(); ++m) {
        // rel = (neighbor - own last) * scale: only the own-last term
        // matters for the adversary's gradient.
        const Vec2 gr{g_feat[base_off + 2 * m], g_feat[base_off + 2 * m + 1]};
        grad[n - 1] -= gr * kNeighborScale;
    }
    // Constant-velocity base, same endpoint structure as the bare predictor.
    for (int k = 1; k <= future_len_; ++k) {
        const Vec2& g = dloss_dfuture[k - 1];
        if (n == 1) {
            grad[0] += g;
            continue;
        }
        const double ratio = static_cast<double>(k) / static_cast<double>(n - 1);
        grad[0] += g * (-ratio);
        grad[n - 1] += g * (1.0 + ratio);
    }
    return grad;
}

void NeuralSurrogate::save_params(const std::filesystem::path& path) const {
    nlohmann::ordered_json doc;
    doc["format"] = "tiny-surrogate";
    doc["version"] = 1;
    doc["history_len"] = history_len_;
    doc["future_len"] = future_len_;
    doc["hidden"] = hidden_;
    doc["neighbor_count"] = neighbor_count_;
    doc["w1"] = w1_;
    doc["b1"] = b1_;
    doc["w2"] = w2_;
    doc["b2"] = b2_;
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw core::ParseError("cannot open file for writing: " + path.string());
    outf << doc.dump(2) << "\n";
}

NeuralSurrogate NeuralSurrogate::load_params(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw core::ParseError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw core::ParseError(std::string("surrogate params malformed: ") + e.what());
    }
    try {
        if (doc.at("format").get<std::string>() != "tiny-surrogate" ||
            doc.at("version").get<int>() != 1) {
            throw core::ParseError("unsupported surrogate parameter format");
        }
        NeuralSurrogate model(doc.at("history_len").get<int>(), doc.at("future_len").get<int>(),
                              doc.at("hidden").get<int>(), doc.at("neighbor_count").get<int>(), 0);
        const auto w1 = doc.at("w1").get<std::vector<double>>();
        const auto b1 = doc.at("b1").get<std::vector<double>>();
        const auto w2 = doc.at("w2").get<std::vector<double>>();
        const auto b2 = doc.at("b2").get<std::vector<double>>();
        if (w1.size() != model.w1_.size() || b1.size() != model.b1_.size() ||
            w2.size() != model.w2_.size() || b2.size() != model.b2_.size()) {
            throw core::ParseError("surrogate parameter arrays do not match the shape header");
        }
        model.w1_ = w1;
        model.b1_ = b1;
        model.w2_ = w2;
        model.b2_ = b2;
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw core::ParseError(std::string("surrogate params missing or mistyped field: ") +
                               e.what());
    }
}

NeuralSurrogate train_tiny_surrogate(const std::vector<core::Scenario>& dataset,
                                     const SurrogateHyperparams& hyperparams, std::uint64_t seed,
                                     TrainingReport* report) {
    if (dataset.empty()) throw core::ValidationError("training dataset is empty");
    if (hyperparams.epochs < 0 || hyperparams.hidden < 1 || !(hyperparams.learning_rate > 0.0) ||
        hyperparams.input_noise < 0.0)
        throw core::ValidationError("bad surrogate hyperparameters");

    const core::Scenario& first = dataset.front();
    NeuralSurrogate model(first.history_len, first.future_len, hyperparams.hidden,
                          hyperparams.neighbor_count, seed);

    // Every (scenario, agent) window is an example: the agent plays the
    // target role, everyone else supplies neighbor features.
    struct Example {
        PredictionRequest req;
        std::size_t target;
        std::vector<Vec2> truth;
    };
    std::vector<Example> examples;
    for (const auto& scenario : dataset) {
        if (scenario.history_len != first.history_len || scenario.future_len != first.future_len)
            throw core::ValidationError("dataset mixes horizon shapes");
        const PredictionRequest req = make_request(scenario);
        for (std::size_t a = 0; a < req.histories.size(); ++a) {
            Example ex;
            ex.req = req;
            ex.target = a;
            for (const auto& st : scenario.future_of(static_cast<int>(a)))
                ex.truth.push_back(st.position());
            examples.push_back(std::move(ex));
        }
    }

    const int f = model.feature_dim();
    const int out = 2 * model.future_len_;
    const std::size_t n_w1 = model.w1_.size();
    const std::size_t n_b1 = model.b1_.size();
    const std::size_t n_w2 = model.w2_.size();
    const std::size_t n_params = n_w1 + n_b1 + n_w2 + model.b2_.size();

    std::vector<double> params(n_params);
    auto pack = [&]() {
        auto it = std::copy(model.w1_.begin(), model.w1_.end(), params.begin());
        it = std::copy(model.b1_.begin(), model.b1_.end(), it);
        it = std::copy(model.w2_.begin(), model.w2_.end(), it);
        std::copy(model.b2_.begin(), model.b2_.end(), it);
    };
    auto unpack = [&]() {
        auto it = params.begin();
        std::copy(it, it + n_w1, model.w1_.begin());
        it += n_w1;
        std::copy(it, it + n_b1, model.b1_.begin());
        it += n_b1;
        std::copy(it, it + n_w2, model.w2_.begin());
        it += n_w2;
        std::copy(it, params.end(), model.b2_.begin());
    };
    pack();

    optim::Adam opt(n_params, {.learning_rate = hyperparams.learning_rate});
    std::vector<double> grad(n_params);
    std::mt19937_64 noise_rng(core::mix_seed(seed, 0x747261'696eULL));
    auto jitter = [&](PredictionRequest req) {
        for (auto& hist : req.histories)
            for (auto& p : hist) {
                const double r = hyperparams.input_noise * std::sqrt(core::uniform01(noise_rng));
                const double phi = core::uniform(noise_rng, 0.0, 2.0 * std::numbers::pi);
                p += Vec2{r * std::cos(phi), r * std::sin(phi)};
            }
        return req;
    };

    TrainingReport rep;
    double last_mse = 0.0;
    for (int epoch = 0; epoch < hyperparams.epochs && !rep.diverged; ++epoch) {
        double epoch_sum = 0.0;
        for (const auto& ex : examples) {
            const PredictionRequest noisy =
                hyperparams.input_noise > 0.0 ? jitter(ex.req) : ex.req;
            const auto fw = model.forward_target(noisy, ex.target);

            // loss = mean_k |base_k + out_k - truth_k|^2
            std::vector<double> g_out(static_cast<std::size_t>(out));
            double loss = 0.0;
            for (int k = 0; k < model.future_len_; ++k) {
                const Vec2 err =
                    fw.base[k] + Vec2{fw.output[2 * k], fw.output[2 * k + 1]} - ex.truth[k];
                loss += err.norm_sq();
                const double s = 2.0 / static_cast<double>(model.future_len_);
                g_out[2 * k] = s * err.x;
                g_out[2 * k + 1] = s * err.y;
            }
            loss /= static_cast<double>(model.future_len_);
            if (!std::isfinite(loss)) {
                rep.diverged = true;
                break;
            }
            epoch_sum += loss;

            std::fill(grad.begin(), grad.end(), 0.0);
            double* g_w1 = grad.data();
            double* g_b1 = g_w1 + n_w1;
            double* g_w2 = g_b1 + n_b1;
            double* g_b2 = g_w2 + n_w2;
            std::vector<double> g_hidden(static_cast<std::size_t>(model.hidden_), 0.0);
            for (int o = 0; o < out; ++o) {
                g_b2[o] = g_out[o];
                for (int h = 0; h < model.hidden_; ++h) {
                    g_w2[static_cast<std::size_t>(o) * model.hidden_ + h] =
                        g_out[o] * fw.hidden[h];
                    g_hidden[h] +=
                        model.w2_[static_cast<std::size_t>(o) * model.hidden_ + h] * g_out[o];
                }
            }
            for (int h = 0; h < model.hidden_; ++h) {
                const double gz = g_hidden[h] * (1.0 - fw.hidden[h] * fw.hidden[h]);
                g_b1[h] = gz;
                for (int i = 0; i < f; ++i)
                    g_w1[static_cast<std::size_t>(h) * f + i] = gz * fw.features[i];
            }

            opt.step(params, grad);
            unpack();
        }
        if (!rep.diverged) {
            last_mse = epoch_sum / static_cast<double>(examples.size());
            rep.epochs_run = epoch + 1;
        }
    }
    rep.final_mse = last_mse;
    if (report) *report = rep;
    return model;
}

}  // namespace trajadv::pred
