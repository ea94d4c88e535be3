#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "jamloc/harness.hpp"

namespace fs = std::filesystem;
using namespace jamloc;

namespace {

std::pair<int, int> parse_size(const std::string& text) {
    int w = 0, h = 0;
    if (std::sscanf(text.c_str(), "%dx%d", &w, &h) != 2 || w < 2 || h < 2)
        throw CLI::ValidationError("--size", "expected WxH with W,H >= 2");
    return {w, h};
}

void write_file(const fs::path& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
}

int cmd_run(const std::string& config_path, const std::string& out_dir, int workers,
            const std::string& dump_dir) {
    const RunSpec spec = load_run_spec(config_path);
    fs::create_directories(out_dir);

    if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        TrialConfig cfg = spec.base;
        cfg.method = spec.methods.front();
        cfg.seed = trial_seed(spec.base.seed, 0);
        const TrialDump dump{dump_dir};
        run_trial(cfg, &dump);
        std::cout << "dumped trial 0 (" << method_name(cfg.method) << ") to " << dump_dir << "\n";
    }

    const ExperimentSummary summary = run_experiment(spec.base, spec.methods, spec.trials, workers);

    write_file(fs::path(out_dir) / "trials.csv",
               [&](std::ostream& out) { write_trials_csv(out, summary); });
    write_file(fs::path(out_dir) / "summary.json",
               [&](std::ostream& out) { write_summary_json(out, summary, spec.base); });

    std::printf("%-16s %6s %24s %24s\n", "method", "n_ok", "SME median [q25-q75] m", "BOE median [q25-q75] m");
    for (const MethodAggregate& a : summary.aggregates)
        std::printf("%-16s %6d %10.1f [%5.1f-%6.1f] %10.1f [%5.1f-%6.1f]\n",
                    method_name(a.method).c_str(), a.n_ok, a.sme_final.median, a.sme_final.q25,
                    a.sme_final.q75, a.boe_final.median, a.boe_final.q25, a.boe_final.q75);
    for (const TrialFailure& f : summary.failures)
        std::cerr << "trial " << f.trial << " " << method_name(f.method) << " failed: " << f.error
                  << "\n";
    std::cout << "wrote " << out_dir << "/trials.csv and summary.json\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<double>& kappas, int checkpoint,
              const std::string& out_dir, int workers) {
    const RunSpec spec = load_run_spec(config_path);
    fs::create_directories(out_dir);
    const SweepSummary sweep = kappa_sweep(spec.base, kappas, checkpoint, spec.trials, workers);
    write_file(fs::path(out_dir) / "sweep.csv",
               [&](std::ostream& out) { write_sweep_csv(out, sweep); });
    std::printf("%8s %6s %26s\n", "kappa", "n_ok", "BOE@checkpoint median [IQR]");
    for (const SweepRow& row : sweep.rows)
        std::printf("%8.3g %6d %10.1f [%5.1f-%6.1f]\n", row.kappa, row.n_ok,
                    row.boe_at_checkpoint.median, row.boe_at_checkpoint.q25,
                    row.boe_at_checkpoint.q75);
    std::cout << "wrote " << out_dir << "/sweep.csv\n";
    return 0;
}

int cmd_gen_map(std::uint64_t seed, const std::string& size, int buildings,
                const std::pair<int, int>& size_range, const std::pair<double, double>& height_range,
                double cell_size, const std::string& out_file) {
    const auto [w, h] = parse_size(size);
    const GridMap map = gen_random_map(seed, w, h, buildings, size_range, height_range, cell_size);
    map.save_file(out_file);
    std::cout << "wrote " << out_file << " (" << w << "x" << h << ", "
              << map.feasible_cells().size() << " feasible cells)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active jammer localization on synthetic urban RSS fields"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", dump_dir;
    int workers = omp_get_max_threads();

    auto* run = app.add_subcommand("run", "Run a Monte-Carlo experiment from a JSON config");
    run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (default: .)");
    run->add_option("--workers", workers, "worker threads");
    run->add_option("--dump-trial", dump_dir,
                    "also dump per-iteration field/acquisition/path CSVs for the first trial");

    std::vector<double> kappas{0.1, 0.5, 1, 2, 3, 5, 10};
    int checkpoint = 30;
    auto* sweep = app.add_subcommand("sweep-kappa", "Median BOE at a checkpoint across kappa values");
    sweep->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sweep->add_option("--kappas", kappas, "comma-separated kappa grid")->delimiter(',');
    sweep->add_option("--checkpoint", checkpoint, "iteration to evaluate (default 30)");
    sweep->add_option("--out", out_dir, "output directory (default: .)");
    sweep->add_option("--workers", workers, "worker threads");

    std::uint64_t seed = 1;
    std::string size = "64x64", out_file;
    int buildings = 12;
    std::pair<int, int> size_range{4, 10};
    std::pair<double, double> height_range{8.0, 40.0};
    double cell_size = 2.0;
    auto* gen = app.add_subcommand("gen-map", "Generate a random building map");
    gen->add_option("--seed", seed, "map seed")->required();
    gen->add_option("--size", size, "grid size WxH")->required();
    gen->add_option("--buildings", buildings, "number of buildings")->required();
    gen->add_option("--out", out_file, "output map file")->required();
    gen->add_option("--size-range", size_range, "building footprint range in cells");
    gen->add_option("--height-range", height_range, "building height range in meters");
    gen->add_option("--cell-size", cell_size, "cell size in meters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, workers, dump_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, kappas, checkpoint, out_dir, workers);
        if (gen->parsed())
            return cmd_gen_map(seed, size, buildings, size_range, height_range, cell_size, out_file);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
