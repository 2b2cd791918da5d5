// SPDX-License-Identifier: Apache-2.0

#include "isacbeam/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "isacbeam/association.hpp"
#include "isacbeam/baselines.hpp"
#include "isacbeam/channel.hpp"
#include "isacbeam/estimator.hpp"
#include "isacbeam/optimizer.hpp"
#include "isacbeam/priors.hpp"
#include "isacbeam/rng.hpp"
#include "isacbeam/sensing.hpp"

namespace isacbeam {

namespace {

using json = nlohmann::json;

int line_of_byte(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

class KeyReader {
  public:
    explicit KeyReader(const json& j) : j_(j) {}

    template <typename T>
    T require(const std::string& key) {
        mark(key);
        if (!j_.contains(key))
            throw ConfigError("config: missing required key '" + key + "'");
        return get<T>(key);
    }

    template <typename T>
    T optional(const std::string& key, T fallback) {
        mark(key);
        if (!j_.contains(key)) return fallback;
        return get<T>(key);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                throw ConfigError("config: unknown key '" + it.key() + "'");
    }

  private:
    template <typename T>
    T get(const std::string& key) {
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: key '" + key + "' has the wrong type");
        }
    }
    void mark(const std::string& key) { used_.insert(key); }

    const json& j_;
    std::set<std::string> used_;
};

ExperimentKind parse_kind(const std::string& name) {
    if (name == "rate_sweep") return ExperimentKind::rate_sweep;
    if (name == "kld_sweep") return ExperimentKind::kld_sweep;
    if (name == "multislot") return ExperimentKind::multislot;
    if (name == "association") return ExperimentKind::association;
    if (name == "mse") return ExperimentKind::mse;
    throw ConfigError("config: unknown experiment '" + name + "'");
}

struct BaseParts {
    ArrayConfig array;
    AngularPrior target;
    AngularPrior user;
    ChannelParams channel;
    ReflectionPrior reflection;
};

BaseParts base_parts(const ExperimentConfig& c, double target_mean) {
    BaseParts p;
    p.array = {c.n_tx, c.n_rx, c.n_user};
    p.target = {target_mean, c.target_var};
    p.user = {c.user_mean, c.user_var};
    p.channel = {c.ref_gain_db, c.user_distance_m, c.pathloss_exp,
                 c.n_scatter, c.los_nlos_ratio_db, c.noise_comm_w};
    p.reflection = {c.reflection_variance};
    return p;
}

ProblemSpec make_spec(const ExperimentConfig& c, double target_mean,
                      double rate_target) {
    const BaseParts p = base_parts(c, target_mean);
    ProblemSpec spec;
    spec.kernel = build_kernel(p.target, quadrature_grid(p.target, c.quadrature_nodes),
                               p.array, p.reflection, c.l_symbols, c.noise_sensing_w);
    const auto support = default_user_support(c.user_mean, c.user_var);
    const UserPMF pmf = discretize_user_pmf(c.user_mean, c.user_var,
                                            c.k_user_locations, support.first,
                                            support.second);
    spec.ensemble = generate_ensemble(pmf, p.array, p.channel, c.seed);
    spec.power_budget = c.power_w;
    spec.rate_target = rate_target;
    return spec;
}

double max_kkt(const KktResiduals& kkt) {
    return std::max({kkt.stationarity, kkt.complementarity, kkt.feasibility});
}

// A sweep point: the base row carries identity (experiment, x, seed) so a
// failing point still emits a labelled row with its status.
struct Job {
    SweepRow base;
    std::function<void(SweepRow&)> fill;
};

// Runs independent jobs on a small pool; results land by index so scheduling
// never affects output order.
std::vector<SweepRow> run_jobs(const std::vector<Job>& jobs, bool timings) {
    std::vector<SweepRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    const unsigned pool =
        std::max(1u, std::min(std::thread::hardware_concurrency(),
                              static_cast<unsigned>(jobs.size())));
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const auto start = std::chrono::steady_clock::now();
            SweepRow row = jobs[i].base;
            try {
                jobs[i].fill(row);
            } catch (const InfeasibleError&) {
                row = jobs[i].base;
                row.status = "infeasible";
            } catch (const std::exception&) {
                row = jobs[i].base;
                row.status = "failed";
            }
            if (timings)
                row.wall_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
            rows[i] = std::move(row);
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return rows;
}

std::vector<SweepRow> run_rate_sweep(const ExperimentConfig& c) {
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < c.rate_targets.size(); ++i) {
        const double target = c.rate_targets[i];
        SweepRow base{"rate_sweep:proposed", target};
        base.seed = c.seed;
        jobs.push_back({base, [=, &c](SweepRow& row) {
            const ProblemSpec spec = make_spec(c, c.target_mean, target);
            const SolveReport rep = solve_p1(spec);
            row.pcrb = rep.pcrb;
            row.rate = rep.achieved_rate;
            row.rank = rep.rank;
            row.kkt = max_kkt(rep.kkt);
        }});
        for (int scheme = 1; scheme <= 2; ++scheme) {
            SweepRow sbase{"rate_sweep:scheme" + std::to_string(scheme), target};
            sbase.seed = Rng::derive(c.seed, 100 + i);
            jobs.push_back({sbase, [=, &c](SweepRow& row) {
                const ProblemSpec spec = make_spec(c, c.target_mean, target);
                const PilotPlan plan = make_pilot_plan(c.pilot_l_ce, c.l_symbols,
                                                       c.power_w, spec.kernel.config);
                const SchemeReport rep =
                    scheme == 1
                        ? run_scheme1(spec, plan, row.seed, c.pilot_noiseless)
                        : run_scheme2(spec, plan, row.seed, c.pilot_noiseless);
                row.pcrb = rep.pcrb;
                row.rate = rep.achieved_rate;
                row.rank = rep.design.rank;
                row.kkt = max_kkt(rep.design.kkt);
            }});
        }
    }
    return run_jobs(jobs, c.timings);
}

std::vector<SweepRow> run_kld_sweep(const ExperimentConfig& c) {
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < c.target_mean_grid.size(); ++i) {
        const double mean = c.target_mean_grid[i];
        const BaseParts p = base_parts(c, mean);
        SweepRow base{"kld_sweep", kld_gaussian(p.user, p.target)};
        base.seed = c.seed;
        jobs.push_back({base, [=, &c](SweepRow& row) {
            const ProblemSpec spec = make_spec(c, mean, c.rate_target);
            const SolveReport rep = solve_p1(spec);
            row.pcrb = rep.pcrb;
            row.rate = rep.achieved_rate;
            row.rank = rep.rank;
            row.kkt = max_kkt(rep.kkt);
            if (c.mse_trials > 0) {
                // one trial-seed stream shared across sweep points (common
                // random numbers), so MSE differences track the trend rather
                // than Monte-Carlo noise
                const MseReport mc =
                    monte_carlo_mse(rep.w_opt, spec, c.mse_trials,
                                    Rng::derive(c.seed, 200), c.map_grid_points);
                row.mse = mc.mse;
            }
        }});
    }
    return run_jobs(jobs, c.timings);
}

std::vector<SweepRow> run_multislot(const ExperimentConfig& c) {
    std::vector<Job> jobs;
    for (double mean : c.target_mean_grid) {
        for (int m : c.slot_counts) {
            const BaseParts p = base_parts(c, mean);
            SweepRow base{"multislot:m" + std::to_string(m),
                          kld_gaussian(p.user, p.target)};
            base.seed = c.seed;
            jobs.push_back({base, [=, &c](SweepRow& row) {
                const ProblemSpec spec = make_spec(c, mean, c.rate_target);
                const SolveReport rep = solve_p2(spec, m, /*verify=*/true);
                row.pcrb = rep.pcrb;
                row.rate = rep.achieved_rate;
                row.rank = rep.rank;
                row.kkt = max_kkt(rep.kkt);
                row.mse = rep.multislot_gap;  // the P1/P2 gap rides the spare column
            }});
        }
    }
    return run_jobs(jobs, c.timings);
}

NetworkScenario make_scenario(const ExperimentConfig& c, int index) {
    NetworkScenario scenario;
    scenario.n_cells = c.n_cells;
    scenario.seed = Rng::derive(c.seed, 5000 + static_cast<std::uint64_t>(index));
    Rng rng(Rng::derive(scenario.seed, 1));
    auto draw_prior = [&]() {
        AngularPrior prior;
        prior.mean = rng.uniform(c.cell_mean_min, c.cell_mean_max);
        prior.variance = std::exp(rng.uniform(std::log(c.cell_var_min),
                                              std::log(c.cell_var_max)));
        return prior;
    };
    for (int i = 0; i < c.n_cells; ++i) scenario.user_priors.push_back(draw_prior());
    for (int i = 0; i < c.n_cells; ++i) scenario.target_priors.push_back(draw_prior());

    scenario.cell.array = {c.n_tx, c.n_rx, c.n_user};
    scenario.cell.channel = {c.ref_gain_db, c.user_distance_m, c.pathloss_exp,
                             c.n_scatter, c.los_nlos_ratio_db, c.noise_comm_w};
    scenario.cell.power_budget = c.power_w;
    scenario.cell.rate_target = c.rate_target;
    scenario.cell.l_symbols = c.l_symbols;
    scenario.cell.sensing_noise = c.noise_sensing_w;
    scenario.cell.reflection_variance = c.reflection_variance;
    scenario.cell.k_user_locations = c.k_user_locations;
    scenario.cell.quadrature_nodes = c.quadrature_nodes;
    return scenario;
}

Assignment random_assignment(const NetworkScenario& scenario) {
    Assignment out;
    out.pairing.resize(scenario.n_cells);
    for (int i = 0; i < scenario.n_cells; ++i) out.pairing[i] = i;
    Rng rng(Rng::derive(scenario.seed, 2));
    for (int i = scenario.n_cells - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform() * (i + 1));
        std::swap(out.pairing[i], out.pairing[std::min(j, i)]);
    }
    const MatD cost = build_cost_matrix(scenario);
    out.total_cost = 0.0;
    for (int i = 0; i < scenario.n_cells; ++i)
        out.total_cost += cost(i, out.pairing[i]);
    return out;
}

std::vector<SweepRow> run_association(const ExperimentConfig& c) {
    std::vector<Job> jobs;
    for (int scen = 0; scen < c.n_scenarios; ++scen) {
        SweepRow kld_base{"association:kld", static_cast<double>(scen)};
        kld_base.seed = Rng::derive(c.seed, 5000 + static_cast<std::uint64_t>(scen));
        jobs.push_back({kld_base, [=, &c](SweepRow& row) {
            const NetworkScenario scenario = make_scenario(c, scen);
            const Assignment a = assign_min_cost(build_cost_matrix(scenario));
            row.pcrb = evaluate_network(scenario, a);
            row.rate = a.total_cost;
        }});
        SweepRow rnd_base{"association:random", static_cast<double>(scen)};
        rnd_base.seed = kld_base.seed;
        jobs.push_back({rnd_base, [=, &c](SweepRow& row) {
            const NetworkScenario scenario = make_scenario(c, scen);
            const Assignment a = random_assignment(scenario);
            row.pcrb = evaluate_network(scenario, a);
            row.rate = a.total_cost;
        }});
    }
    return run_jobs(jobs, c.timings);
}

std::vector<SweepRow> run_mse_point(const ExperimentConfig& c) {
    std::vector<Job> jobs;
    const BaseParts p = base_parts(c, c.target_mean);
    SweepRow base{"mse", kld_gaussian(p.user, p.target)};
    base.seed = c.seed;
    jobs.push_back({base, [&c](SweepRow& row) {
        const ProblemSpec spec = make_spec(c, c.target_mean, c.rate_target);
        const SolveReport rep = solve_p1(spec);
        const MseReport mc = monte_carlo_mse(rep.w_opt, spec, c.mse_trials,
                                             Rng::derive(c.seed, 300),
                                             c.map_grid_points);
        row.pcrb = rep.pcrb;
        row.rate = rep.achieved_rate;
        row.rank = rep.rank;
        row.kkt = max_kkt(rep.kkt);
        row.mse = mc.mse;
    }});
    return run_jobs(jobs, c.timings);
}

std::string csv_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

}  // namespace

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::rate_sweep: return "rate_sweep";
        case ExperimentKind::kld_sweep: return "kld_sweep";
        case ExperimentKind::multislot: return "multislot";
        case ExperimentKind::association: return "association";
        case ExperimentKind::mse: return "mse";
    }
    return "unknown";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: parse error at line " +
                          std::to_string(line_of_byte(text, e.byte)) + ": " +
                          e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    KeyReader r(j);
    ExperimentConfig c;
    c.kind = parse_kind(r.require<std::string>("experiment"));
    c.n_tx = r.require<int>("n_tx");
    c.n_rx = r.require<int>("n_rx");
    c.n_user = r.require<int>("n_user");
    c.k_user_locations = r.require<int>("k_user_locations");
    c.l_symbols = r.require<int>("l_symbols");
    c.power_w = dbm_to_watts(r.require<double>("power_dbm"));
    c.noise_comm_w = dbm_to_watts(r.require<double>("noise_comm_dbm"));
    c.noise_sensing_w = dbm_to_watts(r.require<double>("noise_sensing_dbm"));
    c.reflection_variance = r.require<double>("reflection_variance");
    c.target_mean = r.require<double>("target_mean_rad");
    c.target_var = r.require<double>("target_var");
    c.user_mean = r.require<double>("user_mean_rad");
    c.user_var = r.require<double>("user_var");
    c.rate_target = r.require<double>("rate_target");
    c.seed = r.require<std::uint64_t>("seed");
    c.quadrature_nodes = r.optional<int>("quadrature_nodes", 200);

    c.ref_gain_db = r.require<double>("ref_gain_db");
    c.user_distance_m = r.require<double>("user_distance_m");
    c.pathloss_exp = r.require<double>("pathloss_exp");
    c.n_scatter = r.require<int>("n_scatter");
    c.los_nlos_ratio_db = r.require<double>("los_nlos_ratio_db");

    switch (c.kind) {
        case ExperimentKind::rate_sweep:
            c.rate_targets = r.require<std::vector<double>>("rate_targets");
            c.pilot_l_ce = r.require<int>("pilot_l_ce");
            c.pilot_noiseless = r.optional<bool>("pilot_noiseless", false);
            if (c.rate_targets.empty())
                throw ConfigError("config: rate_targets must be nonempty");
            break;
        case ExperimentKind::kld_sweep:
            c.target_mean_grid = r.require<std::vector<double>>("target_mean_grid");
            c.mse_trials = r.optional<int>("mse_trials", 0);
            c.map_grid_points = r.optional<int>("map_grid_points", 4001);
            if (c.target_mean_grid.empty())
                throw ConfigError("config: target_mean_grid must be nonempty");
            break;
        case ExperimentKind::multislot:
            c.target_mean_grid = r.require<std::vector<double>>("target_mean_grid");
            c.slot_counts = r.require<std::vector<int>>("slot_counts");
            if (c.target_mean_grid.empty() || c.slot_counts.empty())
                throw ConfigError("config: multislot grids must be nonempty");
            break;
        case ExperimentKind::association:
            c.n_cells = r.require<int>("n_cells");
            c.n_scenarios = r.require<int>("n_scenarios");
            c.cell_mean_min = r.require<double>("cell_mean_min");
            c.cell_mean_max = r.require<double>("cell_mean_max");
            c.cell_var_min = r.require<double>("cell_var_min");
            c.cell_var_max = r.require<double>("cell_var_max");
            break;
        case ExperimentKind::mse:
            c.mse_trials = r.require<int>("mse_trials");
            c.map_grid_points = r.optional<int>("map_grid_points", 4001);
            break;
    }
    r.finish();

    if (c.n_tx < 1 || c.n_rx < 1 || c.n_user < 1)
        throw ConfigError("config: antenna counts must be >= 1");
    if (c.k_user_locations < 1) throw ConfigError("config: K must be >= 1");
    if (c.l_symbols < 1) throw ConfigError("config: l_symbols must be >= 1");
    if (!(c.reflection_variance > 0.0))
        throw ConfigError("config: reflection_variance must be > 0");
    return c;
}

std::vector<SweepRow> run_experiment(const ExperimentConfig& config) {
    std::vector<SweepRow> rows;
    switch (config.kind) {
        case ExperimentKind::rate_sweep: rows = run_rate_sweep(config); break;
        case ExperimentKind::kld_sweep: rows = run_kld_sweep(config); break;
        case ExperimentKind::multislot: rows = run_multislot(config); break;
        case ExperimentKind::association: rows = run_association(config); break;
        case ExperimentKind::mse: rows = run_mse_point(config); break;
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.x < b.x; });
    return rows;
}

void emit_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    if (rows.empty())
        throw std::invalid_argument("emit_csv: refusing to write an empty row set");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
    out << "experiment,x,pcrb,rate,mse,rank,kkt,seed,status,wall_ms\n";
    for (const SweepRow& row : rows) {
        out << row.experiment << ',' << csv_double(row.x) << ','
            << csv_double(row.pcrb) << ',' << csv_double(row.rate) << ','
            << csv_double(row.mse) << ','
            << (row.rank >= 0 ? std::to_string(row.rank) : std::string()) << ','
            << csv_double(row.kkt) << ',' << row.seed << ',' << row.status << ','
            << csv_double(row.wall_ms) << '\n';
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

}  // namespace isacbeam
