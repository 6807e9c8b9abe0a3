#include "trajadv/cli/commands.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "trajadv/core/scenario_io.hpp"
#include "trajadv/metrics/metrics.hpp"
#include "trajadv/pred/builtin.hpp"

namespace trajadv::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw core::ParseError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string zero_pad(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

// Fixed worker pool pulling indices from an atomic counter. Results must be
// stored by index so reductions stay deterministic regardless of schedule.
void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
    if (jobs <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    const int threads = std::min(jobs, n);
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

json points_json(const std::vector<core::Vec2>& pts) {
    auto arr = json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y});
    return arr;
}

}  // namespace

void atomic_write(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw core::ParseError("cannot open file for writing: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

std::vector<fs::path> manifest_files(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
        throw core::ParseError("manifest malformed at " + manifest_path.string() + ": " +
                               e.what());
    }
    std::vector<fs::path> files;
    for (const auto& name : manifest.at("files")) files.push_back(dir / name.get<std::string>());
    return files;
}

std::unique_ptr<pred::Predictor> make_model(const std::string& name, const fs::path& params) {
    if (name == "constant_velocity") return std::make_unique<pred::ConstantVelocityPredictor>();
    if (name == "polynomial") return std::make_unique<pred::PolynomialPredictor>(2);
    if (name == "surrogate") {
        if (params.empty())
            throw core::ValidationError("model 'surrogate' needs --params <parameter file>");
        return std::make_unique<pred::NeuralSurrogate>(pred::NeuralSurrogate::load_params(params));
    }
    throw core::ValidationError("unknown model '" + name +
                                "' (expected surrogate, constant_velocity, or polynomial)");
}

int run_gen(const GenOptions& opt) {
    core::GeneratorConfig cfg;
    cfg.straight_count = (opt.count + 2) / 3;
    cfg.turn_count = (opt.count + 1) / 3;
    cfg.lane_change_count = opt.count / 3;
    cfg.history_len = opt.history_len;
    cfg.future_len = opt.future_len;
    cfg.dt = opt.dt;
    cfg.speed_min = opt.speed_min;
    cfg.speed_max = opt.speed_max;
    cfg.extra_leading_states = opt.extra_leading_states;

    const auto scenarios = core::generate_synthetic_scenarios(cfg, opt.seed);
    fs::create_directories(opt.out_dir);

    json manifest;
    manifest["command"] = "gen";
    manifest["seed"] = opt.seed;
    manifest["count"] = static_cast<int>(scenarios.size());
    manifest["families"] = {{"straight", cfg.straight_count},
                            {"turn", cfg.turn_count},
                            {"lane_change", cfg.lane_change_count}};
    manifest["history_len"] = cfg.history_len;
    manifest["future_len"] = cfg.future_len;
    manifest["dt"] = cfg.dt;
    manifest["speed_min"] = cfg.speed_min;
    manifest["speed_max"] = cfg.speed_max;
    manifest["extra_leading_states"] = cfg.extra_leading_states;
    manifest["files"] = json::array();
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const std::string name = "scenario_" + zero_pad(static_cast<int>(i), 4) + ".json";
        atomic_write(opt.out_dir / name, core::serialize_scenario(scenarios[i]));
        manifest["files"].push_back(name);
    }
    atomic_write(opt.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return 0;
}

int run_train(const TrainOptions& opt) {
    const auto files = manifest_files(opt.scenario_dir);
    if (files.empty()) throw core::ValidationError("no scenarios to train on");

    // Every fifth scenario is held out for validation; with fewer than five
    // scenarios validation falls back to the training set itself.
    std::vector<core::Scenario> train, holdout;
    for (std::size_t i = 0; i < files.size(); ++i) {
        core::Scenario s = core::load_scenario(files[i]);
        if (files.size() >= 5 && i % 5 == 0) {
            holdout.push_back(std::move(s));
        } else {
            train.push_back(std::move(s));
        }
    }
    const std::vector<core::Scenario>& val = holdout.empty() ? train : holdout;

    pred::TrainingReport report;
    const pred::NeuralSurrogate model =
        pred::train_tiny_surrogate(train, opt.hyperparams, opt.seed, &report);

    // Mean ADE over every (scenario, agent) pair of the validation set.
    double val_ade = 0.0;
    int val_n = 0;
    for (const auto& s : val) {
        const auto req = pred::make_request(s);
        const auto prediction = model.predict(req);
        for (std::size_t a = 0; a < req.histories.size(); ++a) {
            std::vector<core::Vec2> truth;
            for (const auto& st : s.future_of(static_cast<int>(a))) truth.push_back(st.position());
            val_ade += metrics::ade(prediction.futures[a], truth);
            ++val_n;
        }
    }
    val_ade /= static_cast<double>(val_n);

    fs::create_directories(opt.out_dir);
    const fs::path params_path = opt.out_dir / "surrogate.json";
    const fs::path tmp = params_path.string() + ".tmp";
    model.save_params(tmp);
    fs::rename(tmp, params_path);

    json rep;
    rep["command"] = "train";
    rep["seed"] = opt.seed;
    rep["hidden"] = opt.hyperparams.hidden;
    rep["epochs"] = opt.hyperparams.epochs;
    rep["learning_rate"] = opt.hyperparams.learning_rate;
    rep["neighbor_count"] = opt.hyperparams.neighbor_count;
    rep["input_noise"] = opt.hyperparams.input_noise;
    rep["epochs_run"] = report.epochs_run;
    rep["final_mse"] = report.final_mse;
    rep["diverged"] = report.diverged;
    rep["validation_ade"] = val_ade;
    rep["train_scenarios"] = static_cast<int>(train.size());
    rep["holdout_scenarios"] = static_cast<int>(holdout.size());
    rep["params_file"] = params_path.filename().string();
    atomic_write(opt.out_dir / "training_report.json", rep.dump(2) + "\n");
    return report.diverged ? 1 : 0;
}

int run_attack(const AttackOptions& opt) {
    if (opt.method != "sa" && opt.method != "search")
        throw core::ValidationError("unknown method '" + opt.method + "' (expected sa or search)");
    attack::validate(opt.search);
    pursuit::validate(opt.pursuit);

    const auto files = manifest_files(opt.scenario_dir);
    const auto model = make_model(opt.model, opt.params);
    fs::create_directories(opt.out_dir);

    const int n = static_cast<int>(files.size());
    std::vector<std::string> status(static_cast<std::size_t>(n), "ok");

    parallel_for(n, opt.jobs, [&](int i) {
        try {
            const core::Scenario scenario = core::load_scenario(files[i]);
            const std::string stem = files[i].stem().string();

            attack::SearchConfig sc = opt.search;
            // Per-scenario seed derived from (base seed, index) so scenarios
            // stay independent and the whole run is schedule-invariant.
            sc.seed = core::mix_seed(opt.search.seed, static_cast<std::uint64_t>(i));
            sc.gradient_mode = opt.finite_difference ? pred::GradientMode::finite_difference
                                                     : pred::GradientMode::exact;

            json art;
            art["scenario"] = stem;
            art["method"] = opt.method;
            art["adversary_id"] = scenario.adversary_id;
            art["seed"] = sc.seed;
            art["t_start"] =
                static_cast<int>(scenario.history_start(scenario.adversary_index()));

            if (opt.method == "sa") {
                const pursuit::AttackArtifacts out =
                    pursuit::sa_attack(*model, scenario, sc, opt.pursuit);
                art["history"] = points_json(out.adversarial_history.points());
                art["achieved_rmse"] = out.reference.achieved_rmse;
                art["unattacked_rmse"] = out.reference.unattacked_rmse;
                art["best_restart"] = out.reference.best_restart;
                art["v"] = out.v;
                art["p_v"] = out.p_v;
                art["reconstruction_complete"] = out.reconstruction_complete;
                art["padded"] = out.padded;
                art["reference"] = points_json(out.reference.reference.points);
                pursuit::write_trace_jsonl(opt.out_dir / (stem + "_trace.jsonl"), out.trace);
                attack::write_iterates_jsonl(opt.out_dir / (stem + "_iterates.jsonl"),
                                             out.reference.iterates);
                if (!out.reconstruction_complete)
                    status[i] = "partial: reference unreachable within step budget";
            } else {
                const attack::BaselineResult out =
                    attack::baseline_search_attack(*model, scenario, sc);
                art["history"] = points_json(out.history);
                art["achieved_rmse"] = out.achieved_rmse;
                art["unattacked_rmse"] = out.unattacked_rmse;
                attack::write_iterates_jsonl(opt.out_dir / (stem + "_iterates.jsonl"),
                                             out.iterates);
            }
            atomic_write(opt.out_dir / (stem + "_attack.json"), art.dump(2) + "\n");
        } catch (const std::exception& e) {
            status[i] = std::string("failed: ") + e.what();
        }
    });

    json manifest;
    manifest["command"] = "attack";
    manifest["method"] = opt.method;
    manifest["model"] = opt.model;
    manifest["seed"] = opt.search.seed;
    manifest["bound"] = opt.search.bound;
    manifest["restarts"] = opt.search.restarts;
    manifest["iterations"] = opt.search.iterations;
    manifest["learning_rate"] = opt.search.learning_rate;
    manifest["gradient"] = opt.finite_difference ? "finite_difference" : "exact";
    if (opt.method == "sa") {
        manifest["alpha"] = opt.pursuit.alpha;
        manifest["step_length"] = opt.pursuit.step_length;
        manifest["c0_max"] = opt.pursuit.c0_max;
        manifest["c1_max_base"] = opt.pursuit.c1_max_base;
        manifest["goal_tolerance"] = opt.pursuit.goal_tolerance;
    }
    manifest["scenarios"] = json::array();
    bool all_ok = true;
    for (int i = 0; i < n; ++i) {
        manifest["scenarios"].push_back(
            {{"scenario", files[i].stem().string()}, {"status", status[i]}});
        if (status[i] != "ok") all_ok = false;
    }
    atomic_write(opt.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return all_ok ? 0 : 1;
}

int run_eval(const EvalOptions& opt) {
    const auto files = manifest_files(opt.scenario_dir);
    const auto model = make_model(opt.model, opt.params);
    fs::create_directories(opt.out_dir);

    const int n = static_cast<int>(files.size());
    std::vector<std::string> status(static_cast<std::size_t>(n), "ok");
    std::vector<std::pair<std::string, metrics::ReportPair>> rows(static_cast<std::size_t>(n));
    std::vector<bool> valid(static_cast<std::size_t>(n), false);

    parallel_for(n, opt.jobs, [&](int i) {
        const std::string stem = files[i].stem().string();
        rows[i].first = stem;
        try {
            const core::Scenario scenario = core::load_scenario(files[i]);
            const fs::path attack_path = opt.attack_dir / (stem + "_attack.json");
            if (!fs::exists(attack_path))
                throw core::ParseError("missing attack artifact: " + attack_path.string());
            const json art = json::parse(read_file(attack_path));

            core::Trajectory attacked;
            attacked.dt = scenario.dt;
            const int t_start = art.at("t_start").get<int>();
            int k = 0;
            for (const auto& row : art.at("history")) {
                attacked.states.push_back(
                    {row[0].get<double>(), row[1].get<double>(), t_start + k});
                ++k;
            }

            const metrics::ReportPair pair =
                metrics::evaluate_attack(*model, scenario, attacked, opt.miss_threshold);
            rows[i].second = pair;
            valid[i] = true;
            atomic_write(opt.out_dir / (stem + "_report.json"), metrics::report_to_json(pair));

            // Polyline dump for external plotting.
            const auto clean_req = pred::make_request(scenario);
            auto attacked_req = clean_req;
            attacked_req.histories[attacked_req.adversary] = attacked.points();
            const auto pred_normal = model->predict(clean_req);
            const auto pred_attacked = model->predict(attacked_req);
            const int adv = scenario.adversary_index();

            std::ostringstream csv;
            csv.precision(17);
            csv << "kind,step,x,y\n";
            auto dump = [&csv](const std::string& kind, const std::vector<core::Vec2>& pts) {
                for (std::size_t s = 0; s < pts.size(); ++s)
                    csv << kind << ',' << s << ',' << pts[s].x << ',' << pts[s].y << '\n';
            };
            dump("history_clean", clean_req.histories[clean_req.adversary]);
            dump("history_attacked", attacked.points());
            std::vector<core::Vec2> truth;
            for (const auto& st : scenario.future_of(adv)) truth.push_back(st.position());
            dump("future_true", truth);
            dump("future_pred_normal", pred_normal.futures[clean_req.adversary]);
            dump("future_pred_attacked", pred_attacked.futures[clean_req.adversary]);
            atomic_write(opt.out_dir / (stem + "_polylines.csv"), csv.str());
        } catch (const std::exception& e) {
            status[i] = std::string("failed: ") + e.what();
        }
    });

    std::vector<std::pair<std::string, metrics::ReportPair>> ok_rows;
    std::vector<metrics::ReportPair> ok_reports;
    for (int i = 0; i < n; ++i) {
        if (valid[i]) {
            ok_rows.push_back(rows[i]);
            ok_reports.push_back(rows[i].second);
        }
    }
    if (!ok_rows.empty()) {
        metrics::write_suite_csv(opt.out_dir / "suite.csv", ok_rows);
        const metrics::SuiteSummary summary = metrics::aggregate(ok_reports);
        metrics::write_accel_histogram_csv(opt.out_dir / "accel_histogram.csv",
                                           summary.attacked_accel);
        json sj;
        auto agg_json = [](const metrics::SuiteAggregate& a) {
            return json{{"count", a.count},
                        {"mean_ade", a.mean_ade},
                        {"mean_fde", a.mean_fde},
                        {"miss_rate", a.miss_rate},
                        {"offroad_traj_rate", a.offroad_traj_rate},
                        {"mean_offroad_point_rate", a.mean_offroad_point_rate}};
        };
        sj["command"] = "eval";
        sj["normal"] = agg_json(summary.normal);
        sj["attacked"] = agg_json(summary.attacked);
        atomic_write(opt.out_dir / "suite_summary.json", sj.dump(2) + "\n");
    }

    json manifest;
    manifest["command"] = "eval";
    manifest["model"] = opt.model;
    manifest["miss_threshold"] = opt.miss_threshold;
    manifest["scenarios"] = json::array();
    bool all_ok = true;
    for (int i = 0; i < n; ++i) {
        manifest["scenarios"].push_back(
            {{"scenario", files[i].stem().string()}, {"status", status[i]}});
        if (status[i] != "ok") all_ok = false;
    }
    atomic_write(opt.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return all_ok ? 0 : 1;
}

}  // namespace trajadv::cli
