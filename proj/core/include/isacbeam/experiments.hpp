// SPDX-License-Identifier: Apache-2.0
//
// Configuration layer and sweep drivers for the four experiments, emitting
// deterministic CSV rows with full seed provenance.

#ifndef ISACBEAM_EXPERIMENTS_HPP
#define ISACBEAM_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "isacbeam/types.hpp"

namespace isacbeam {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ExperimentKind { rate_sweep, kld_sweep, multislot, association, mse };

// Flat config with dB/dBm converted to linear exactly once at load time.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::rate_sweep;

    int n_tx = 10, n_rx = 12, n_user = 8;
    int k_user_locations = 100;  // paper scale; shipped configs use desk scale
    int l_symbols = 25;
    double power_w = 1.0;           // from power_dbm
    double noise_comm_w = 1e-12;    // from noise_comm_dbm
    double noise_sensing_w = 1e-12; // from noise_sensing_dbm
    double reflection_variance = 2e-14;
    double target_mean = -0.3, target_var = 1e-3;
    double user_mean = -0.3, user_var = 1e-3;
    double rate_target = 12.0;
    int quadrature_nodes = 200;
    std::uint64_t seed = 1;

    // channel (kept in dB where the model states dB)
    double ref_gain_db = -30.0;
    double user_distance_m = 500.0;
    double pathloss_exp = 3.2;
    int n_scatter = 8;
    double los_nlos_ratio_db = 0.8;

    // rate_sweep
    std::vector<double> rate_targets;
    int pilot_l_ce = 10;
    bool pilot_noiseless = false;

    // kld_sweep / multislot
    std::vector<double> target_mean_grid;
    int mse_trials = 0;
    int map_grid_points = 4001;

    // multislot
    std::vector<int> slot_counts;

    // association
    int n_cells = 8;
    int n_scenarios = 10;
    double cell_mean_min = -0.7, cell_mean_max = 0.1;
    double cell_var_min = 1e-3, cell_var_max = 1e-2;

    bool timings = false;  // fill wall_ms from the clock (breaks byte determinism)
};

ExperimentConfig load_config(const std::string& path);

struct SweepRow {
    std::string experiment;
    double x = 0.0;
    double pcrb = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    double mse = std::numeric_limits<double>::quiet_NaN();
    int rank = -1;
    double kkt = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
    std::string status = "ok";  // ok | infeasible | failed
    double wall_ms = 0.0;
};

std::vector<SweepRow> run_experiment(const ExperimentConfig& config);

// Fixed column order; decimal fields in scientific notation with 12
// significant digits; refuses to write an empty row set.
void emit_csv(const std::vector<SweepRow>& rows, const std::string& path);

const char* experiment_name(ExperimentKind kind);

}  // namespace isacbeam

#endif
