#include <CLI11.hpp>

#include <cstdio>

#include "trajadv/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-stage adversarial attacks on trajectory predictors"};
    app.require_subcommand(1);
    // Flags override config-file values, which override built-in defaults.
    app.set_config("--config", "", "Read options from a TOML/INI file ([gen], [attack], ... sections)");

    trajadv::cli::GenOptions gen;
    auto* cmd_gen = app.add_subcommand("gen", "Generate a synthetic scenario suite");
    cmd_gen->add_option("--out", gen.out_dir, "Output directory")
        ->envname("TRAJADV_OUT")
        ->required();
    cmd_gen->add_option("--count", gen.count, "Number of scenarios");
    cmd_gen->add_option("--seed", gen.seed, "Generator seed");
    cmd_gen->add_option("--history-len", gen.history_len, "Observation window length");
    cmd_gen->add_option("--future-len", gen.future_len, "Prediction horizon length");
    cmd_gen->add_option("--dt", gen.dt, "Sampling interval, seconds");
    cmd_gen->add_option("--speed-min", gen.speed_min, "Minimum scenario speed, m/s");
    cmd_gen->add_option("--speed-max", gen.speed_max, "Maximum scenario speed, m/s");
    cmd_gen->add_option("--extra-leading", gen.extra_leading_states,
                        "States emitted before the observation window");

    trajadv::cli::TrainOptions train;
    auto* cmd_train = app.add_subcommand("train", "Train the tiny neural surrogate");
    cmd_train->add_option("--scenarios", train.scenario_dir, "Scenario directory")->required();
    cmd_train->add_option("--out", train.out_dir, "Output directory")
        ->envname("TRAJADV_OUT")
        ->required();
    cmd_train->add_option("--hidden", train.hyperparams.hidden, "Hidden width");
    cmd_train->add_option("--epochs", train.hyperparams.epochs, "Training epochs");
    cmd_train->add_option("--input-noise", train.hyperparams.input_noise,
                          "Training input-noise radius (m)");
    cmd_train->add_option("--lr", train.hyperparams.learning_rate, "Learning rate");
    cmd_train->add_option("--neighbors", train.hyperparams.neighbor_count,
                          "Neighbor feature slots");
    cmd_train->add_option("--seed", train.seed, "Training seed");

    trajadv::cli::AttackOptions atk;
    auto* cmd_attack = app.add_subcommand("attack", "Run attacks over a scenario suite");
    cmd_attack->add_option("--scenarios", atk.scenario_dir, "Scenario directory")->required();
    cmd_attack->add_option("--out", atk.out_dir, "Output directory")
        ->envname("TRAJADV_OUT")
        ->required();
    cmd_attack->add_option("--model", atk.model,
                           "Victim model: surrogate, constant_velocity, polynomial");
    cmd_attack->add_option("--params", atk.params, "Surrogate parameter file");
    cmd_attack->add_option("--method", atk.method, "Attack method: sa or search");
    cmd_attack->add_option("--bound", atk.search.bound, "Per-point perturbation bound, meters");
    cmd_attack->add_option("--restarts", atk.search.restarts, "Random restarts");
    cmd_attack->add_option("--iters", atk.search.iterations, "Ascent iterations per restart");
    cmd_attack->add_option("--lr", atk.search.learning_rate, "Ascent learning rate");
    cmd_attack->add_option("--seed", atk.search.seed, "Attack seed")->required();
    cmd_attack->add_option("--alpha", atk.pursuit.alpha, "Lookahead speed multiplier");
    cmd_attack->add_option("--step-length", atk.pursuit.step_length, "Clothoid arc length, m");
    cmd_attack->add_option("--c0-max", atk.pursuit.c0_max, "Curvature bound, 1/m");
    cmd_attack->add_option("--c1-max", atk.pursuit.c1_max_base,
                           "Curvature-rate bound at low speed, 1/m^2");
    cmd_attack->add_option("--goal-tolerance", atk.pursuit.goal_tolerance,
                           "Reconstruction stop distance, m");
    cmd_attack->add_flag("--finite-diff", atk.finite_difference,
                         "Use finite-difference gradients instead of backprop");
    cmd_attack->add_option("--jobs", atk.jobs, "Worker threads");

    trajadv::cli::EvalOptions ev;
    auto* cmd_eval = app.add_subcommand("eval", "Evaluate attack artifacts");
    cmd_eval->add_option("--scenarios", ev.scenario_dir, "Scenario directory")->required();
    cmd_eval->add_option("--attacks", ev.attack_dir, "Attack artifact directory")->required();
    cmd_eval->add_option("--out", ev.out_dir, "Output directory")
        ->envname("TRAJADV_OUT")
        ->required();
    cmd_eval->add_option("--model", ev.model,
                         "Victim model: surrogate, constant_velocity, polynomial");
    cmd_eval->add_option("--params", ev.params, "Surrogate parameter file");
    cmd_eval->add_option("--miss-threshold", ev.miss_threshold, "Miss criterion on FDE, m");
    cmd_eval->add_option("--jobs", ev.jobs, "Worker threads");

    // Let --config (a parent option) appear after the subcommand name, too.
    for (auto* sub : app.get_subcommands(nullptr)) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_gen->parsed()) return trajadv::cli::run_gen(gen);
        if (cmd_train->parsed()) return trajadv::cli::run_train(train);
        if (cmd_attack->parsed()) return trajadv::cli::run_attack(atk);
        if (cmd_eval->parsed()) return trajadv::cli::run_eval(ev);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
