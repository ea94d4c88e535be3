#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "jamloc/acquisition.hpp"
#include "jamloc/dataset.hpp"
#include "jamloc/grid.hpp"
#include "jamloc/planner.hpp"
#include "jamloc/propagation.hpp"
#include "jamloc/surrogate.hpp"

namespace jamloc {

enum class Method { AUCB_BUDGET, AUCB_UNBOUNDED, RM, RIS };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct MapGenSpec {
    std::optional<std::uint64_t> seed;  // absent: derived from the trial seed
    int width = 64;
    int height = 64;
    int n_buildings = 12;
    std::pair<int, int> building_size_range{4, 10};
    std::pair<double, double> height_range{8.0, 40.0};
    double cell_size = 2.0;
};

struct MapSpec {
    std::optional<std::filesystem::path> file;  // load from a map file
    std::optional<std::string> text;            // inline map in the GRIDMAP format
    MapGenSpec gen;                             // fallback: generate
};

struct TrialConfig {
    Method method = Method::AUCB_BUDGET;
    int iterations = 80;
    int b0 = 35;
    int bn = 2;
    double kappa = 2.0;
    double noise_var = 2.5;
    int delta = 50;  // ignored by AUCB_UNBOUNDED and RIS
    EdgeCostParams edge_params;
    int gp_restarts = 8;
    std::uint64_t seed = 1;
    MapSpec map_spec;
    std::optional<Cell> jammer;  // absent: uniform random feasible cell
    PropagationParams propagation;
    bool propagation_seed_fixed = false;  // true: use propagation.seed verbatim
    double feature_radius_m = 10.0;
};

struct TrialResult {
    std::vector<double> sme_per_iter;  // meters, one per iteration
    std::vector<double> boe_per_iter;  // meters, non-increasing
    Cell jammer;
    Cell start;
    Cell best_sampled_cell;
    Cell posterior_argmax_cell;
    std::vector<std::vector<Cell>> visited;  // per-iteration traversed cells
    KernelParams theta_final;
    std::uint64_t seed = 0;
    double wallclock_s = 0.0;
};

// When set, run_trial writes field.csv plus per-iteration acq_NNN.csv and
// path_NNN.csv under `dir` (for reproducing the overview figures).
struct TrialDump {
    std::filesystem::path dir;
};

TrialResult run_trial(const TrialConfig& cfg, const TrialDump* dump = nullptr);

// Distance from the jammer to the arg-max of the posterior mean (meters).
double compute_sme(const Posterior& post, const GridMap& map, Cell jammer);
// Distance from the jammer to the highest-RSS sample; ties keep the earliest.
double compute_boe(const Dataset& data, const GridMap& map, Cell jammer);

struct Quantiles {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

struct TrialRecord {
    int trial = 0;
    Method method = Method::AUCB_BUDGET;
    std::uint64_t seed = 0;
    TrialResult result;
};

struct TrialFailure {
    int trial = 0;
    Method method = Method::AUCB_BUDGET;
    std::string error;
};

struct MethodAggregate {
    Method method = Method::AUCB_BUDGET;
    int n_ok = 0;
    Quantiles sme_final;
    Quantiles boe_final;
    std::vector<Quantiles> boe_by_iter;
};

struct ExperimentSummary {
    std::vector<Method> methods;
    int trials = 0;
    int iterations = 0;
    std::vector<TrialRecord> records;  // ordered by (trial, method position)
    std::vector<TrialFailure> failures;
    std::vector<MethodAggregate> aggregates;  // one per method, in order
};

// Per-trial seeds derive from (base seed, trial index) only, and the map,
// jammer, initial dataset, and start position are shared across methods
// within a trial. Output is a pure function of (config, seed): independent of
// `workers`.
ExperimentSummary run_experiment(const TrialConfig& base, const std::vector<Method>& methods,
                                 int trials, int workers);

std::uint64_t trial_seed(std::uint64_t base_seed, int trial);

// Linear interpolation between order statistics, p in [0, 1].
double percentile(std::vector<double> values, double p);

struct SweepRow {
    double kappa = 0.0;
    int n_ok = 0;
    Quantiles boe_at_checkpoint;
};

struct SweepSummary {
    int checkpoint_iter = 30;
    std::vector<SweepRow> rows;
};

SweepSummary kappa_sweep(const TrialConfig& base, const std::vector<double>& kappas,
                         int checkpoint_iter, int trials, int workers);

void write_trials_csv(std::ostream& out, const ExperimentSummary& summary);
void write_summary_json(std::ostream& out, const ExperimentSummary& summary,
                        const TrialConfig& base);
void write_sweep_csv(std::ostream& out, const SweepSummary& sweep);

// Experiment description read from a JSON config file. Keys mirror
// TrialConfig plus "methods" and "trials"; unknown keys are rejected.
struct RunSpec {
    TrialConfig base;
    std::vector<Method> methods;
    int trials = 1;
};

RunSpec parse_run_spec(const std::string& json_text);
RunSpec load_run_spec(const std::filesystem::path& path);

}  // namespace jamloc
