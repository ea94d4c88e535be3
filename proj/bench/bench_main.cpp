// Timing harness comparing the OpenMP kernels against their serial twins:
// posterior sweep (blocked parallel vs serial vs plain-loop reference),
// ground-truth field construction, and whole experiments across worker counts.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "jamloc/harness.hpp"

using namespace jamloc;

namespace {

double time_s(const std::function<void()>& fn, int reps = 3) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best,
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial_s, double parallel_s) {
    std::printf("%-34s %10.1f ms %10.1f ms %7.2fx\n", name.c_str(), serial_s * 1e3,
                parallel_s * 1e3, serial_s / parallel_s);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", omp_get_max_threads());
    std::printf("%-34s %13s %13s %8s\n", "kernel", "serial", "parallel", "speedup");

    const GridMap map = gen_random_map(7, 64, 64, 12, {4, 10}, {8.0, 40.0});
    const Cell jammer = map.feasible_cells()[map.feasible_cells().size() / 3];

    {
        PropagationParams prop;
        prop.seed = 11;
        row("build_field 64x64",
            time_s([&] { GroundTruthField(map, jammer, prop, false); }),
            time_s([&] { GroundTruthField(map, jammer, prop, true); }));
    }

    {
        PropagationParams prop;
        prop.seed = 11;
        const GroundTruthField field(map, jammer, prop);
        Rng rng(5);
        Dataset data = gen_crowdsourced(field, 195, 2.5, rng);  // late-iteration size
        data.recompute_norm();
        KernelParams theta;
        theta.ls_long = {0.4, 0.4, 0.4};
        theta.ls_short = {0.08, 0.08, 0.08};

        std::vector<FeatureVec> queries;
        for (const Cell& c : map.feasible_cells()) queries.push_back(make_feature(map, c, 10.0));

        row("posterior sweep n=195 |F|~3.5k",
            time_s([&] { posterior(data, theta, queries, false); }),
            time_s([&] { posterior(data, theta, queries, true); }));
        row("posterior reference (plain loops)",
            time_s([&] { posterior_reference(data, theta, queries); }),
            time_s([&] { posterior(data, theta, queries, true); }));
    }

    {
        TrialConfig cfg;
        cfg.iterations = 12;
        cfg.b0 = 20;
        cfg.seed = 3;
        cfg.map_spec.gen.width = 48;
        cfg.map_spec.gen.height = 48;
        cfg.map_spec.gen.n_buildings = 8;
        const std::vector<Method> methods{Method::AUCB_BUDGET, Method::RIS};
        const int max_workers = omp_get_max_threads();
        row("experiment 6 trials x 2 methods",
            time_s([&] { run_experiment(cfg, methods, 6, 1); }, 1),
            time_s([&] { run_experiment(cfg, methods, 6, max_workers); }, 1));
    }

    return 0;
}
