#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "trajadv/attack/search.hpp"
#include "trajadv/core/synthetic.hpp"
#include "trajadv/pred/surrogate.hpp"
#include "trajadv/pursuit/pursuit.hpp"

namespace trajadv::cli {

// Subcommand option structs mirror the library configs; every run writes a
// manifest.json (no timestamps, so reruns are byte-identical) and returns a
// process exit code. Per-scenario failures are recorded in the manifest and
// turn the exit code nonzero; the run itself continues.

struct GenOptions {
    std::filesystem::path out_dir;
    int count{100};  // split across the three motion families
    std::uint64_t seed{0};
    int history_len{4};
    int future_len{12};
    double dt{0.5};
    double speed_min{2.0};
    double speed_max{20.0};
    int extra_leading_states{0};
};

struct TrainOptions {
    std::filesystem::path scenario_dir;
    std::filesystem::path out_dir;  // receives surrogate.json + training_report.json
    pred::SurrogateHyperparams hyperparams;
    std::uint64_t seed{0};
};

struct AttackOptions {
    std::filesystem::path scenario_dir;
    std::filesystem::path out_dir;
    std::string model{"surrogate"};  // surrogate | constant_velocity | polynomial
    std::filesystem::path params;    // surrogate parameter file
    std::string method{"sa"};        // sa | search
    attack::SearchConfig search;
    pursuit::PursuitConfig pursuit;
    bool finite_difference{false};
    int jobs{1};
};

struct EvalOptions {
    std::filesystem::path scenario_dir;
    std::filesystem::path attack_dir;
    std::filesystem::path out_dir;
    std::string model{"surrogate"};
    std::filesystem::path params;
    double miss_threshold{2.0};
    int jobs{1};
};

int run_gen(const GenOptions& opt);
int run_train(const TrainOptions& opt);
int run_attack(const AttackOptions& opt);
int run_eval(const EvalOptions& opt);

// Write-temp-then-rename, so concurrent readers never see partial files.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Scenario files listed by the directory's manifest.json, in manifest order.
std::vector<std::filesystem::path> manifest_files(const std::filesystem::path& dir);

std::unique_ptr<pred::Predictor> make_model(const std::string& name,
                                            const std::filesystem::path& params);

}  // namespace trajadv::cli
