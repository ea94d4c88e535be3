// Acceptance suite: runs every release criterion end to end and prints one
// PASS/FAIL line per criterion. Exits non-zero if any criterion fails.

#include <omp.h>

#include <Eigen/Dense>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "jamloc/harness.hpp"
#include "oracles.hpp"

using namespace jamloc;
using namespace jamloc::testing;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criterion 1: GP posterior/LML vs the dense explicit-inverse oracle.
void criterion_gp_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(10001);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_int(20));
        Dataset data = random_dataset(rng, n, trial % 4 == 0);
        const KernelParams theta = random_theta(rng);

        std::vector<FeatureVec> queries;
        for (int q = 0; q < 10; ++q) queries.push_back(random_feature(rng));
        queries.push_back(data[0].x);

        const Posterior got = posterior(data, theta, queries);
        const double got_lml = log_marginal_likelihood(data, theta);
        const OraclePrediction want = oracle_predict(data, theta, queries);
        const double var_scale =
            (theta.sigma2_long + theta.sigma2_short) * data.norm().std * data.norm().std;

        worst = std::max(worst, rel_err(got_lml, want.lml, 1.0));
        for (std::size_t i = 0; i < queries.size(); ++i) {
            worst = std::max(worst, rel_err(got.mu[i], want.mu[i], 1.0));
            worst = std::max(worst,
                             rel_err(got.var[i], std::max(want.var[i], 0.0), 1e-6 * var_scale));
        }
    }
    const double secs = elapsed_s(t0);
    char detail[128];
    std::snprintf(detail, sizeof detail, "200 datasets, worst rel err %.2e, %.2f s", worst, secs);
    report(1, worst < 1e-8 && secs < 10.0, "GP oracle equivalence", detail);
}

// Criterion 2: Gram matrices are PSD up to round-off.
void criterion_kernel_psd() {
    Rng rng(10002);
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(49));
        const KernelParams theta = random_theta(rng);
        std::vector<FeatureVec> pts;
        for (int i = 0; i < n; ++i)
            pts.push_back(i % 9 == 5 && i > 0 ? pts[0] : random_feature(rng));

        Eigen::MatrixXd K(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) K(i, j) = kernel(theta, pts[i], pts[j], false);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
        worst_ratio = std::max(worst_ratio, -eig.eigenvalues().minCoeff() / K.trace());
    }
    char detail[128];
    std::snprintf(detail, sizeof detail, "200 Gram matrices, worst -min_eig/trace %.2e", worst_ratio);
    report(2, worst_ratio <= 1e-8, "kernel PSD", detail);
}

// Criterion 3: A* equals Dijkstra on random costs and BFS on uniform costs.
void criterion_astar_optimality() {
    Rng rng(10003);
    int mismatches = 0, solved = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const GridMap map = random_obstacle_map(rng, 8, 0.25);
        double min_cost = 0.0;
        const EdgeCostFn cost_fn = random_edge_costs(map, rng, min_cost);
        const Cell start = random_feasible(map, rng);
        const Cell goal = random_feasible(map, rng);

        const double oracle = dijkstra_cost(map, start, goal, cost_fn);
        const double rate = std::isfinite(min_cost) ? min_cost / map.cell_size() : 0.0;
        const auto path = astar(map, start, goal, cost_fn, rate);
        if (!path.has_value() != !std::isfinite(oracle)) {
            ++mismatches;
            continue;
        }
        if (path) {
            ++solved;
            if (path_cost(*path, cost_fn) != oracle || !path_valid(map, *path)) ++mismatches;
        }

        const EdgeCostFn unit = [&](Cell, Cell) { return map.cell_size(); };
        const int bfs = bfs_steps(map, start, goal);
        const auto upath = astar(map, start, goal, unit, 1.0);
        if (bfs < 0) {
            if (upath) ++mismatches;
        } else if (!upath || static_cast<int>(upath->cells.size()) - 1 != bfs) {
            ++mismatches;
        }
    }
    char detail[128];
    std::snprintf(detail, sizeof detail, "500 maps, %d reachable, %d mismatches", solved, mismatches);
    report(3, mismatches == 0 && solved > 250, "A* optimality vs Dijkstra/BFS", detail);
}

// Criterion 4: plan_aucb contracts (feasibility, adjacency, budget, flat-field cost).
void criterion_planner_contracts() {
    Rng rng(10004);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const GridMap map = gen_random_map(rng.next_u64(), 24, 24, 6, {3, 6}, {8.0, 40.0});
        std::vector<double> vals;
        for (std::size_t i = 0; i < map.feasible_cells().size(); ++i)
            vals.push_back(rng.normal());
        const AcquisitionField acq = make_acquisition(vals, 2.0);
        const Cell start = random_feasible(map, rng);
        const Cell target = random_feasible(map, rng);
        const int delta = 1 + static_cast<int>(rng.uniform_int(30));

        const Path bounded = plan_aucb(map, start, target, acq, EdgeCostParams{}, delta);
        if (!path_valid(map, bounded)) ++violations;
        if (static_cast<int>(bounded.cells.size()) - 1 > delta) ++violations;

        const Path free_path = plan_aucb(map, start, target, acq, EdgeCostParams{}, std::nullopt);
        if (!path_valid(map, free_path)) ++violations;

        // Flat field: cost must equal the shortest-path cost.
        const AcquisitionField flat =
            make_acquisition(std::vector<double>(map.feasible_cells().size(), 1.0), 2.0);
        const Path flat_path = plan_aucb(map, start, target, flat, EdgeCostParams{}, std::nullopt);
        if (static_cast<int>(flat_path.cells.size()) - 1 != bfs_steps(map, start, target))
            ++violations;
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "100 instances, %d violations", violations);
    report(4, violations == 0, "planner contracts", detail);
}

// Criterion 5: select_target invariance under mean shift and positive scaling.
void criterion_acquisition_invariance() {
    Rng rng(10005);
    const GridMap map = gen_random_map(505, 16, 16, 4, {3, 5}, {8.0, 30.0});
    int mismatches = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Posterior post;
        for (std::size_t i = 0; i < map.feasible_cells().size(); ++i) {
            post.mu.push_back(rng.normal(-60.0, 12.0));
            post.var.push_back(rng.uniform(0.0, 9.0));
        }
        const double shift = rng.normal(0.0, 50.0);
        const double scale = std::exp(rng.uniform(-3.0, 3.0));
        const double kappa = rng.uniform(0.0, 4.0);

        Posterior transformed;
        for (std::size_t i = 0; i < post.mu.size(); ++i) {
            transformed.mu.push_back((post.mu[i] + shift) * scale);
            transformed.var.push_back(post.var[i] * scale * scale);
        }
        if (!(select_target(map, ucb(post, kappa)) ==
              select_target(map, ucb(transformed, kappa))))
            ++mismatches;
    }
    char detail[64];
    std::snprintf(detail, sizeof detail, "100 random fields, %d mismatches", mismatches);
    report(5, mismatches == 0, "acquisition invariances", detail);
}

TrialConfig paper_shaped_config() {
    TrialConfig cfg;  // defaults already mirror the experimental protocol
    cfg.seed = 20250810;
    return cfg;
}

// Criteria 6 and 7 share one 50-trial experiment over all four methods.
void criteria_ordering_and_convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    const TrialConfig cfg = paper_shaped_config();
    const std::vector<Method> methods{Method::AUCB_BUDGET, Method::AUCB_UNBOUNDED, Method::RM,
                                      Method::RIS};
    const ExperimentSummary summary = run_experiment(cfg, methods, 50, omp_get_max_threads());
    const double secs = elapsed_s(t0);

    const auto agg_of = [&](Method m) -> const MethodAggregate& {
        for (const MethodAggregate& a : summary.aggregates)
            if (a.method == m) return a;
        throw std::logic_error("missing aggregate");
    };
    const double boe_budget = agg_of(Method::AUCB_BUDGET).boe_final.median;
    const double boe_unbounded = agg_of(Method::AUCB_UNBOUNDED).boe_final.median;
    const double boe_ris = agg_of(Method::RIS).boe_final.median;
    const double boe_rm = agg_of(Method::RM).boe_final.median;

    const bool ordering = boe_budget < boe_ris && boe_ris < boe_rm;
    const bool unbounded_close = boe_unbounded <= 1.5 * boe_budget;
    const bool no_failures = summary.failures.empty();
    char detail[256];
    std::snprintf(detail, sizeof detail,
                  "final median BOE m: A-UCB*(50)=%.1f A-UCB*(inf)=%.1f RIS=%.1f RM=%.1f, "
                  "%zu failures, %.0f s (%d threads)",
                  boe_budget, boe_unbounded, boe_ris, boe_rm, summary.failures.size(), secs,
                  omp_get_max_threads());
    report(6, ordering && unbounded_close && no_failures, "end-to-end method ordering", detail);

    // Criterion 7 on the same runs: halving by iteration 30 plus monotone traces.
    const MethodAggregate& budget = agg_of(Method::AUCB_BUDGET);
    const double median_at_1 = budget.boe_by_iter[0].median;
    const double median_at_30 = budget.boe_by_iter[29].median;
    bool monotone = true;
    for (const TrialRecord& rec : summary.records) {
        if (rec.method != Method::AUCB_BUDGET) continue;
        for (std::size_t i = 1; i < rec.result.boe_per_iter.size(); ++i)
            monotone &= rec.result.boe_per_iter[i] <= rec.result.boe_per_iter[i - 1];
    }
    char detail7[160];
    std::snprintf(detail7, sizeof detail7,
                  "median BOE iter1=%.1f m iter30=%.1f m (ratio %.2f), traces monotone=%d",
                  median_at_1, median_at_30,
                  median_at_1 > 0 ? median_at_30 / median_at_1 : 0.0, monotone ? 1 : 0);
    report(7, median_at_30 <= 0.5 * median_at_1 && monotone, "convergence shape", detail7);
}

// Criterion 8: kappa sensitivity at the iteration-30 checkpoint.
void criterion_kappa_sensitivity() {
    const auto t0 = std::chrono::steady_clock::now();
    TrialConfig cfg = paper_shaped_config();
    cfg.iterations = 30;  // checkpoint is the last evaluated iteration
    const SweepSummary sweep =
        kappa_sweep(cfg, {0.1, 2.0, 10.0}, 30, 30, omp_get_max_threads());
    const double at_01 = sweep.rows[0].boe_at_checkpoint.median;
    const double at_2 = sweep.rows[1].boe_at_checkpoint.median;
    const double at_10 = sweep.rows[2].boe_at_checkpoint.median;
    char detail[160];
    std::snprintf(detail, sizeof detail,
                  "median BOE@30 m: kappa0.1=%.1f kappa2=%.1f kappa10=%.1f, %.0f s", at_01, at_2,
                  at_10, elapsed_s(t0));
    report(8, at_2 <= at_01 && at_2 <= at_10, "kappa sensitivity U-shape", detail);
}

// Criterion 9: the CLI `run` produces byte-identical trials.csv across
// repeated invocations and worker counts.
void criterion_cli_determinism() {
    const fs::path tmp = fs::temp_directory_path() / "jamloc_acceptance9";
    fs::remove_all(tmp);
    fs::create_directories(tmp);

    const fs::path cfg_path = tmp / "config.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << R"({
  "methods": ["AUCB_BUDGET", "RIS"],
  "trials": 3,
  "iterations": 8,
  "b0": 15,
  "seed": 99,
  "map_spec": {"generator": {"width": 32, "height": 32, "n_buildings": 6,
                             "building_size_range": [3, 6], "height_range": [8, 30]}}
})";
    }

    const std::string cli = JAMLOC_CLI_PATH;
    const auto run_once = [&](const std::string& out_dir, int workers) {
        const std::string cmd = cli + " run --config " + cfg_path.string() + " --out " +
                                (tmp / out_dir).string() + " --workers " +
                                std::to_string(workers) + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    const auto slurp = [&](const std::string& out_dir) {
        std::ifstream in(tmp / out_dir / "trials.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    const bool ran = run_once("a", 1) == 0 && run_once("b", 4) == 0 && run_once("c", 1) == 0;
    const std::string a = slurp("a"), b = slurp("b"), c = slurp("c");
    const bool identical = ran && !a.empty() && a == b && a == c;
    char detail[128];
    std::snprintf(detail, sizeof detail, "3 runs (workers 1/4/1), %zu-byte trials.csv, identical=%d",
                  a.size(), identical ? 1 : 0);
    report(9, identical, "CLI determinism across workers", detail);
    fs::remove_all(tmp);
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_gp_oracle();
    criterion_kernel_psd();
    criterion_astar_optimality();
    criterion_planner_contracts();
    criterion_acquisition_invariance();
    criteria_ordering_and_convergence();
    criterion_kappa_sensitivity();
    criterion_cli_determinism();
    std::printf("%s: %d failed, total %.0f s\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures, elapsed_s(t0));
    return g_failures == 0 ? 0 : 1;
}
