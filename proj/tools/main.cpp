// SPDX-License-Identifier: Apache-2.0
//
// isacbeam CLI: runs the sweep experiments from a JSON config and writes CSV.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure in any row,
// 4 infeasible problem in any row.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isacbeam/experiments.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool paper_scale = false;
    bool timings = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to the JSON experiment config")
        ->required();
    cmd->add_option("--out", args.out_path, "Output CSV path (default: <experiment>.csv)");
    cmd->add_option("--seed", args.seed, "Override the config seed")
        ->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_flag("--paper-scale", args.paper_scale,
                  "Use the paper-scale user PMF (K = 100) instead of desk scale");
    cmd->add_flag("--timings", args.timings,
                  "Record wall-clock per row (makes output non-deterministic)");
}

int run(const CommonArgs& args, isacbeam::ExperimentKind expected) {
    isacbeam::ExperimentConfig config;
    try {
        config = isacbeam::load_config(args.config_path);
    } catch (const isacbeam::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (config.kind != expected) {
        std::cerr << "error: config declares experiment '"
                  << isacbeam::experiment_name(config.kind)
                  << "' but the subcommand expects '"
                  << isacbeam::experiment_name(expected) << "'\n";
        return 2;
    }
    if (args.seed_set) config.seed = args.seed;
    if (args.paper_scale) config.k_user_locations = 100;
    config.timings = args.timings;

    std::string out = args.out_path.empty()
                          ? std::string(isacbeam::experiment_name(config.kind)) + ".csv"
                          : args.out_path;
    if (const char* dir = std::getenv("ISACBEAM_OUT_DIR");
        dir && !std::filesystem::path(out).is_absolute())
        out = (std::filesystem::path(dir) / out).string();

    std::vector<isacbeam::SweepRow> rows;
    try {
        rows = isacbeam::run_experiment(config);
        isacbeam::emit_csv(rows, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    bool any_failed = false, any_infeasible = false;
    for (const auto& row : rows) {
        if (row.status == "failed") any_failed = true;
        if (row.status == "infeasible") any_infeasible = true;
    }
    std::cerr << "wrote " << rows.size() << " rows to " << out << "\n";
    if (any_failed) return 3;
    if (any_infeasible) return 4;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PCRB-optimal transmit covariance design for MIMO ISAC"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        isacbeam::ExperimentKind kind;
    };
    const Sub subs[] = {
        {"rate-sweep", "PCRB vs. expected-rate target, proposed + pilot baselines",
         isacbeam::ExperimentKind::rate_sweep},
        {"kld-sweep", "PCRB (and optional MSE) vs. user/target prior KLD",
         isacbeam::ExperimentKind::kld_sweep},
        {"multislot", "Static vs. slotted covariance design objective gap",
         isacbeam::ExperimentKind::multislot},
        {"association", "Multi-cell KLD pairing vs. random pairing",
         isacbeam::ExperimentKind::association},
        {"mse", "Monte-Carlo MSE against the PCRB at one operating point",
         isacbeam::ExperimentKind::mse},
    };

    CommonArgs args[std::size(subs)];
    CLI::App* cmds[std::size(subs)];
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        cmds[i] = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmds[i], args[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (std::size_t i = 0; i < std::size(subs); ++i)
        if (cmds[i]->parsed()) return run(args[i], subs[i].kind);
    return 2;
}
