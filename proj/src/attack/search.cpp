#include "trajadv/attack/search.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>

#include "trajadv/optim/adam.hpp"

namespace trajadv::attack {

namespace {

std::vector<Vec2> adversary_truth(const core::Scenario& scenario) {
    std::vector<Vec2> truth;
    for (const auto& st : scenario.future_of(scenario.adversary_index()))
        truth.push_back(st.position());
    return truth;
}

std::vector<double> flatten(const Perturbation& pert) {
    std::vector<double> flat;
    flat.reserve(pert.deltas.size() * 2);
    for (const auto& d : pert.deltas) {
        flat.push_back(d.x);
        flat.push_back(d.y);
    }
    return flat;
}

Perturbation unflatten(const std::vector<double>& flat) {
    Perturbation pert;
    pert.deltas.reserve(flat.size() / 2);
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2) pert.deltas.push_back({flat[i], flat[i + 1]});
    return pert;
}

}  // namespace

void validate(const SearchConfig& config) {
    if (config.restarts < 1 || config.iterations < 0)
        throw core::ValidationError("search needs restarts >= 1 and iterations >= 0");
    if (!(config.learning_rate > 0.0))
        throw core::ValidationError("search learning_rate must be positive");
    if (!(config.bound >= 0.0)) throw core::ValidationError("search bound must be >= 0");
}

Perturbation draw_perturbation(int history_len, double bound, std::mt19937_64& rng) {
    Perturbation pert;
    pert.deltas.reserve(static_cast<std::size_t>(history_len));
    for (int k = 0; k < history_len; ++k) {
        const double r = bound * std::sqrt(core::uniform01(rng));
        const double ang = core::uniform(rng, -std::numbers::pi, std::numbers::pi);
        pert.deltas.push_back({r * std::cos(ang), r * std::sin(ang)});
    }
    return pert;
}

std::vector<Perturbation> init_perturbations(const SearchConfig& config, int history_len,
                                             std::mt19937_64& rng) {
    validate(config);
    std::vector<Perturbation> out;
    out.reserve(static_cast<std::size_t>(config.restarts));
    for (int r = 0; r < config.restarts; ++r)
        out.push_back(draw_perturbation(history_len, config.bound, rng));
    return out;
}

Perturbation project(const Perturbation& pert, double bound) {
    Perturbation out = pert;
    for (auto& d : out.deltas) {
        const double n = d.norm();
        if (n > bound) d = bound == 0.0 ? Vec2{0.0, 0.0} : d * (bound / n);
    }
    return out;
}

OptimizeResult optimize_perturbation(const pred::Predictor& model, const core::Scenario& scenario,
                                     const Perturbation& pert0, const SearchConfig& config,
                                     bool pin_first_delta, int restart_label) {
    validate(config);
    core::validate(scenario);
    if (static_cast<int>(pert0.deltas.size()) != scenario.history_len)
        throw core::ValidationError("perturbation length must equal history_len");

    const pred::PredictionRequest clean = pred::make_request(scenario);
    const std::vector<Vec2> truth = adversary_truth(scenario);
    const std::vector<Vec2> base_history = clean.histories[clean.adversary];

    pred::PredictionRequest probe = clean;
    auto apply = [&](const Perturbation& p) {
        auto& hist = probe.histories[probe.adversary];
        for (std::size_t k = 0; k < hist.size(); ++k) hist[k] = base_history[k] + p.deltas[k];
    };
    auto rmse_of = [&](const Perturbation& p) {
        apply(p);
        return pred::loss_rmse(model.predict(probe).futures[probe.adversary], truth);
    };

    Perturbation pert = project(pert0, config.bound);
    if (pin_first_delta && !pert.deltas.empty()) pert.deltas[0] = {0.0, 0.0};

    OptimizeResult result;
    result.perturbation = pert;
    result.achieved_rmse = rmse_of(pert);
    result.iterates.push_back({restart_label, 0, result.achieved_rmse, pert});

    std::vector<double> params = flatten(pert);
    optim::Adam opt(params.size(), {.learning_rate = config.learning_rate});

    for (int it = 1; it <= config.iterations; ++it) {
        apply(pert);
        std::vector<Vec2> grad =
            pred::grad_adversary_history(model, probe, truth, config.gradient_mode);
        if (pin_first_delta && !grad.empty()) grad[0] = {0.0, 0.0};
        opt.step_ascent(params, flatten(Perturbation{grad}));

        pert = project(unflatten(params), config.bound);
        if (pin_first_delta && !pert.deltas.empty()) pert.deltas[0] = {0.0, 0.0};
        params = flatten(pert);  // keep the optimizer on the projected point

        const double rmse = rmse_of(pert);
        result.iterates.push_back({restart_label, it, rmse, pert});
        if (rmse > result.achieved_rmse) {
            result.achieved_rmse = rmse;
            result.perturbation = pert;
        }
    }
    return result;
}

namespace {

struct MultiRestart {
    Perturbation best;
    double best_rmse{0.0};
    double unattacked_rmse{0.0};
    int best_restart{0};
    std::vector<IterateRecord> iterates;
};

MultiRestart run_restarts(const pred::Predictor& model, const core::Scenario& scenario,
                          const SearchConfig& config, bool pin_first_delta) {
    validate(config);
    core::validate(scenario);

    const pred::PredictionRequest clean = pred::make_request(scenario);
    const std::vector<Vec2> truth = adversary_truth(scenario);

    MultiRestart mr;
    mr.unattacked_rmse =
        pred::loss_rmse(model.predict(clean).futures[clean.adversary], truth);

    bool have_best = false;
    for (int r = 0; r < config.restarts; ++r) {
        std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(r));
        const Perturbation pert0 =
            draw_perturbation(scenario.history_len, config.bound, rng);
        OptimizeResult res =
            optimize_perturbation(model, scenario, pert0, config, pin_first_delta, r);
        mr.iterates.insert(mr.iterates.end(), res.iterates.begin(), res.iterates.end());
        if (!have_best || res.achieved_rmse > mr.best_rmse) {
            have_best = true;
            mr.best_rmse = res.achieved_rmse;
            mr.best = res.perturbation;
            mr.best_restart = r;
        }
    }
    return mr;
}

}  // namespace

ReferenceResult generate_reference(const pred::Predictor& model, const core::Scenario& scenario,
                                   const SearchConfig& config) {
    const int adv = scenario.adversary_index();
    const auto leading = scenario.state_before_history(adv);
    const MultiRestart mr = run_restarts(model, scenario, config, !leading.has_value());

    ReferenceResult result;
    result.best_perturbation = mr.best;
    result.achieved_rmse = mr.best_rmse;
    result.unattacked_rmse = mr.unattacked_rmse;
    result.best_restart = mr.best_restart;
    result.iterates = std::move(mr.iterates);

    ReferenceTrajectory& ref = result.reference;
    ref.has_leading_state = leading.has_value();
    const auto history = scenario.history_of(adv);
    if (leading) {
        ref.points.push_back(leading->position());
        for (std::size_t k = 0; k < history.size(); ++k)
            ref.points.push_back(history[k].position() + mr.best.deltas[k]);
    } else {
        // The first window point doubles as the initial junction state: it
        // stays real (its delta was pinned to zero during the search).
        ref.points.push_back(history[0].position());
        for (std::size_t k = 1; k < history.size(); ++k)
            ref.points.push_back(history[k].position() + mr.best.deltas[k]);
    }
    ref.points.push_back(scenario.future_of(adv).front().position());
    return result;
}

BaselineResult baseline_search_attack(const pred::Predictor& model,
                                      const core::Scenario& scenario,
                                      const SearchConfig& config) {
    const MultiRestart mr = run_restarts(model, scenario, config, false);

    BaselineResult result;
    result.perturbation = mr.best;
    result.achieved_rmse = mr.best_rmse;
    result.unattacked_rmse = mr.unattacked_rmse;
    result.iterates = std::move(mr.iterates);

    const auto history = scenario.history_of(scenario.adversary_index());
    for (std::size_t k = 0; k < history.size(); ++k)
        result.history.push_back(history[k].position() + mr.best.deltas[k]);
    return result;
}

void write_iterates_jsonl(const std::filesystem::path& path,
                          const std::vector<IterateRecord>& iterates) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw core::ParseError("cannot open file for writing: " + path.string());
    for (const auto& rec : iterates) {
        nlohmann::ordered_json row;
        row["restart"] = rec.restart;
        row["iteration"] = rec.iteration;
        row["rmse"] = rec.rmse;
        auto deltas = nlohmann::ordered_json::array();
        for (const auto& d : rec.perturbation.deltas) deltas.push_back({d.x, d.y});
        row["deltas"] = std::move(deltas);
        out << row.dump() << "\n";
    }
}

}  // namespace trajadv::attack
