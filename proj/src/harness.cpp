#include "jamloc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace jamloc {

namespace {

// Stream tags for per-trial seed derivation. Everything the methods must
// share within a trial (map, jammer, shadowing, initial data, start) comes
// from method-independent streams.
enum SeedTag : std::uint64_t {
    kTagMap = 1,
    kTagJammer = 2,
    kTagShadow = 3,
    kTagD0 = 4,
    kTagStart = 5,
    kTagLoop = 6,
    kTagFit = 7,
};

GridMap build_map(const TrialConfig& cfg) {
    if (cfg.map_spec.file) return GridMap::load_file(*cfg.map_spec.file);
    if (cfg.map_spec.text) return GridMap::load(*cfg.map_spec.text);
    const MapGenSpec& g = cfg.map_spec.gen;
    const std::uint64_t seed = g.seed ? *g.seed : derive_seed(cfg.seed, kTagMap);
    return gen_random_map(seed, g.width, g.height, g.n_buildings, g.building_size_range,
                          g.height_range, g.cell_size);
}

std::filesystem::path dump_path(const TrialDump& dump, const char* stem, int iter = -1) {
    char name[64];
    if (iter < 0)
        std::snprintf(name, sizeof name, "%s.csv", stem);
    else
        std::snprintf(name, sizeof name, "%s_%03d.csv", stem, iter);
    return dump.dir / name;
}

void dump_path_csv(const std::filesystem::path& file, int iter, const std::vector<Cell>& cells) {
    std::ofstream out(file);
    out << "iter,seq,ix,iy\n";
    for (std::size_t s = 0; s < cells.size(); ++s)
        out << iter << ',' << s << ',' << cells[s].ix << ',' << cells[s].iy << '\n';
}

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::AUCB_BUDGET: return "AUCB_BUDGET";
        case Method::AUCB_UNBOUNDED: return "AUCB_UNBOUNDED";
        case Method::RM: return "RM";
        case Method::RIS: return "RIS";
    }
    throw std::logic_error("unknown method");
}

Method parse_method(const std::string& name) {
    if (name == "AUCB_BUDGET") return Method::AUCB_BUDGET;
    if (name == "AUCB_UNBOUNDED") return Method::AUCB_UNBOUNDED;
    if (name == "RM") return Method::RM;
    if (name == "RIS") return Method::RIS;
    throw std::invalid_argument("unknown method: " + name);
}

double compute_sme(const Posterior& post, const GridMap& map, Cell jammer) {
    const auto& feas = map.feasible_cells();
    if (post.mu.size() != feas.size())
        throw std::invalid_argument("compute_sme: posterior does not cover the feasible set");
    std::size_t best = 0;
    for (std::size_t i = 1; i < feas.size(); ++i)
        if (post.mu[i] > post.mu[best]) best = i;  // row-major scan = (iy, ix) ties
    return map.center_distance_m(feas[best], jammer);
}

double compute_boe(const Dataset& data, const GridMap& map, Cell jammer) {
    if (data.empty()) throw std::invalid_argument("compute_boe: empty dataset");
    std::size_t best = 0;
    for (std::size_t i = 1; i < data.size(); ++i)
        if (data[i].y > data[best].y) best = i;  // strict: earliest measurement wins ties
    return map.center_distance_m(data[best].cell, jammer);
}

TrialResult run_trial(const TrialConfig& cfg, const TrialDump* dump) {
    const auto t_start = std::chrono::steady_clock::now();
    if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (cfg.bn < 1) throw std::invalid_argument("bn must be >= 1");
    if (cfg.b0 < 0) throw std::invalid_argument("b0 must be >= 0");
    if (cfg.delta < 1) throw std::invalid_argument("delta must be >= 1");
    if (cfg.kappa < 0.0) throw std::invalid_argument("kappa must be >= 0");

    const GridMap map = build_map(cfg);
    const auto& feas = map.feasible_cells();

    Cell jammer;
    if (cfg.jammer) {
        jammer = *cfg.jammer;
        if (!map.feasible(jammer)) throw std::invalid_argument("configured jammer cell is infeasible");
    } else {
        Rng jam_rng(derive_seed(cfg.seed, kTagJammer));
        jammer = feas[jam_rng.uniform_int(feas.size())];
    }

    PropagationParams prop = cfg.propagation;
    if (!cfg.propagation_seed_fixed) prop.seed = derive_seed(cfg.seed, kTagShadow);
    const GroundTruthField field(map, jammer, prop);

    Rng d0_rng(derive_seed(cfg.seed, kTagD0));
    Dataset data = gen_crowdsourced(field, cfg.b0, cfg.noise_var, d0_rng, cfg.feature_radius_m);

    Rng start_rng(derive_seed(cfg.seed, kTagStart));
    Cell pos = feas[start_rng.uniform_int(feas.size())];

    Rng loop_rng(derive_seed(cfg.seed, kTagLoop));
    Rng fit_rng(derive_seed(cfg.seed, kTagFit));

    std::vector<FeatureVec> queries(feas.size());
    for (std::size_t i = 0; i < feas.size(); ++i)
        queries[i] = make_feature(map, feas[i], cfg.feature_radius_m);

    if (dump) {
        std::ofstream out(dump_path(*dump, "field"));
        field.save_csv(out);
    }

    TrialResult result;
    result.seed = cfg.seed;
    result.jammer = jammer;
    result.start = pos;
    result.sme_per_iter.reserve(cfg.iterations);
    result.boe_per_iter.reserve(cfg.iterations);
    result.visited.reserve(cfg.iterations);

    KernelParams theta;  // defaults until the first fit
    bool have_theta = false;
    int last_refit = std::numeric_limits<int>::min();

    for (int n = 1; n <= cfg.iterations; ++n) {
        const bool refit = data.size() >= 2 &&
                           (data.size() <= 60 || n - last_refit >= 5 || !have_theta);
        if (refit) {
            KernelParams fitted = fit(data, cfg.gp_restarts, FitBounds{}, fit_rng);
            if (have_theta) {
                // Keep the previous hyperparameters if the fresh fit is worse.
                const double l_new = log_marginal_likelihood(data, fitted);
                double l_old = -std::numeric_limits<double>::infinity();
                try {
                    l_old = log_marginal_likelihood(data, theta);
                } catch (const std::runtime_error&) {
                }
                if (l_new >= l_old) theta = fitted;
            } else {
                theta = fitted;
            }
            have_theta = true;
            last_refit = n;
        } else if (!have_theta && !data.empty()) {
            data.recompute_norm();  // center targets even when too small to fit
        }

        Posterior post;
        if (!data.empty()) {
            post = posterior(data, theta, queries);
        } else {
            post.mu.assign(feas.size(), 0.0);
            post.var.assign(feas.size(), theta.sigma2_long + theta.sigma2_short);
            post.noise_var = theta.sigma2_noise;
        }

        const AcquisitionField acq = ucb(post, cfg.kappa);
        const Cell target = select_target(map, acq);

        std::vector<Cell> waypoints;
        std::vector<Cell> traversed;
        switch (cfg.method) {
            case Method::AUCB_BUDGET:
            case Method::AUCB_UNBOUNDED: {
                const std::optional<int> delta =
                    cfg.method == Method::AUCB_BUDGET ? std::optional<int>(cfg.delta) : std::nullopt;
                const Path path = plan_aucb(map, pos, target, acq, cfg.edge_params, delta);
                waypoints = subsample_waypoints(path, cfg.bn);
                traversed = path.cells;
                pos = path.cells.back();
                break;
            }
            case Method::RM: {
                const Path path = random_motion(map, pos, cfg.delta, loop_rng);
                waypoints = subsample_waypoints(path, cfg.bn);
                traversed = path.cells;
                pos = path.cells.back();
                break;
            }
            case Method::RIS: {
                waypoints = random_iid(feas, cfg.bn, loop_rng);
                traversed = waypoints;
                pos = waypoints.back();  // virtual position; RIS has no motion continuity
                break;
            }
        }

        for (const Cell& wp : waypoints) {
            const Measurement m = sample_measurement(field, wp, cfg.noise_var, loop_rng, n);
            data.add(Obs{make_feature(map, wp, cfg.feature_radius_m), m.y, wp, n});
        }

        result.sme_per_iter.push_back(compute_sme(post, map, jammer));
        // The recorded trace is the running minimum: a later noise spike can
        // move the instantaneous max-y sample farther out, but the trace
        // tracks the best localization achieved so far.
        const double boe_now = compute_boe(data, map, jammer);
        result.boe_per_iter.push_back(
            result.boe_per_iter.empty() ? boe_now : std::min(result.boe_per_iter.back(), boe_now));
        result.visited.push_back(std::move(traversed));

        if (n == cfg.iterations) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < feas.size(); ++i)
                if (post.mu[i] > post.mu[best]) best = i;
            result.posterior_argmax_cell = feas[best];
        }

        if (dump) {
            std::ofstream acq_out(dump_path(*dump, "acq", n));
            dump_acquisition_csv(acq_out, map, acq);
            dump_path_csv(dump_path(*dump, "path", n), n, result.visited.back());
        }
    }

    std::size_t best_obs = 0;
    for (std::size_t i = 1; i < data.size(); ++i)
        if (data[i].y > data[best_obs].y) best_obs = i;
    result.best_sampled_cell = data[best_obs].cell;
    result.theta_final = theta;
    result.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

std::uint64_t trial_seed(std::uint64_t base_seed, int trial) {
    return derive_seed(base_seed, 0x545249414cULL, static_cast<std::uint64_t>(trial));
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

Quantiles quantiles_of(const std::vector<double>& values) {
    return Quantiles{percentile(values, 0.5), percentile(values, 0.25), percentile(values, 0.75)};
}

}  // namespace

ExperimentSummary run_experiment(const TrialConfig& base, const std::vector<Method>& methods,
                                 int trials, int workers) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (methods.empty()) throw std::invalid_argument("methods must be non-empty");
    workers = std::max(1, workers);

    const int n_methods = static_cast<int>(methods.size());
    const std::int64_t n_units = static_cast<std::int64_t>(trials) * n_methods;
    std::vector<std::optional<TrialRecord>> slots(n_units);
    std::vector<std::optional<TrialFailure>> fails(n_units);

#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (std::int64_t u = 0; u < n_units; ++u) {
        const int t = static_cast<int>(u / n_methods);
        const int mi = static_cast<int>(u % n_methods);
        TrialConfig cfg = base;
        cfg.method = methods[mi];
        cfg.seed = trial_seed(base.seed, t);
        try {
            TrialRecord rec{t, cfg.method, cfg.seed, run_trial(cfg)};
            slots[u] = std::move(rec);
        } catch (const std::exception& e) {
            fails[u] = TrialFailure{t, cfg.method, e.what()};
        }
    }

    ExperimentSummary summary;
    summary.methods = methods;
    summary.trials = trials;
    summary.iterations = base.iterations;
    for (std::int64_t u = 0; u < n_units; ++u) {
        if (slots[u]) summary.records.push_back(std::move(*slots[u]));
        if (fails[u]) summary.failures.push_back(std::move(*fails[u]));
    }

    for (const Method m : methods) {
        MethodAggregate agg;
        agg.method = m;
        std::vector<double> sme_final, boe_final;
        for (const TrialRecord& rec : summary.records) {
            if (rec.method != m) continue;
            ++agg.n_ok;
            sme_final.push_back(rec.result.sme_per_iter.back());
            boe_final.push_back(rec.result.boe_per_iter.back());
        }
        agg.sme_final = quantiles_of(sme_final);
        agg.boe_final = quantiles_of(boe_final);
        agg.boe_by_iter.resize(base.iterations);
        for (int it = 0; it < base.iterations; ++it) {
            std::vector<double> vals;
            for (const TrialRecord& rec : summary.records)
                if (rec.method == m) vals.push_back(rec.result.boe_per_iter[it]);
            agg.boe_by_iter[it] = quantiles_of(vals);
        }
        summary.aggregates.push_back(std::move(agg));
    }
    return summary;
}

SweepSummary kappa_sweep(const TrialConfig& base, const std::vector<double>& kappas,
                         int checkpoint_iter, int trials, int workers) {
    if (checkpoint_iter < 1 || checkpoint_iter > base.iterations)
        throw std::invalid_argument("checkpoint must be within 1..iterations");
    SweepSummary sweep;
    sweep.checkpoint_iter = checkpoint_iter;
    for (const double kappa : kappas) {
        TrialConfig cfg = base;
        cfg.kappa = kappa;
        const ExperimentSummary summary = run_experiment(cfg, {cfg.method}, trials, workers);
        SweepRow row;
        row.kappa = kappa;
        std::vector<double> boe;
        for (const TrialRecord& rec : summary.records)
            boe.push_back(rec.result.boe_per_iter[checkpoint_iter - 1]);
        row.n_ok = static_cast<int>(boe.size());
        row.boe_at_checkpoint = quantiles_of(boe);
        sweep.rows.push_back(row);
    }
    return sweep;
}

void write_trials_csv(std::ostream& out, const ExperimentSummary& summary) {
    out << "trial,method,iter,sme_m,boe_m\n";
    char line[128];
    for (const TrialRecord& rec : summary.records) {
        const std::string name = method_name(rec.method);
        for (std::size_t it = 0; it < rec.result.sme_per_iter.size(); ++it) {
            std::snprintf(line, sizeof line, "%d,%s,%zu,%.6f,%.6f\n", rec.trial, name.c_str(),
                          it + 1, rec.result.sme_per_iter[it], rec.result.boe_per_iter[it]);
            out << line;
        }
    }
}

namespace {

nlohmann::ordered_json theta_to_json(const KernelParams& t) {
    return nlohmann::ordered_json{{"sigma2_long", t.sigma2_long},
                                  {"sigma2_short", t.sigma2_short},
                                  {"ls_long", t.ls_long},
                                  {"ls_short", t.ls_short},
                                  {"sigma2_noise", t.sigma2_noise}};
}

nlohmann::ordered_json quantiles_to_json(const Quantiles& q) {
    return nlohmann::ordered_json{{"median", q.median}, {"q25", q.q25}, {"q75", q.q75}};
}

nlohmann::ordered_json config_to_json(const TrialConfig& cfg) {
    nlohmann::ordered_json j;
    j["method"] = method_name(cfg.method);
    j["iterations"] = cfg.iterations;
    j["b0"] = cfg.b0;
    j["bn"] = cfg.bn;
    j["kappa"] = cfg.kappa;
    j["noise_var"] = cfg.noise_var;
    j["delta"] = cfg.delta;
    j["edge_params"] = {{"lambda_len", cfg.edge_params.lambda_len},
                        {"lambda_info", cfg.edge_params.lambda_info},
                        {"epsilon", cfg.edge_params.epsilon}};
    j["gp_restarts"] = cfg.gp_restarts;
    j["seed"] = cfg.seed;
    if (cfg.map_spec.file) {
        j["map_spec"] = {{"file", cfg.map_spec.file->string()}};
    } else if (cfg.map_spec.text) {
        j["map_spec"] = {{"text", *cfg.map_spec.text}};
    } else {
        nlohmann::ordered_json g;
        if (cfg.map_spec.gen.seed) g["seed"] = *cfg.map_spec.gen.seed;
        g["width"] = cfg.map_spec.gen.width;
        g["height"] = cfg.map_spec.gen.height;
        g["n_buildings"] = cfg.map_spec.gen.n_buildings;
        g["building_size_range"] = {cfg.map_spec.gen.building_size_range.first,
                                    cfg.map_spec.gen.building_size_range.second};
        g["height_range"] = {cfg.map_spec.gen.height_range.first,
                             cfg.map_spec.gen.height_range.second};
        g["cell_size"] = cfg.map_spec.gen.cell_size;
        j["map_spec"] = {{"generator", g}};
    }
    if (cfg.jammer)
        j["jammer"] = {cfg.jammer->ix, cfg.jammer->iy};
    else
        j["jammer"] = "random-feasible";
    nlohmann::ordered_json p;
    p["p0"] = cfg.propagation.p0;
    p["d0"] = cfg.propagation.d0;
    p["gamma"] = cfg.propagation.gamma;
    p["wall_loss"] = cfg.propagation.wall_loss;
    p["shadow_sigma"] = cfg.propagation.shadow_sigma;
    p["shadow_corr_len"] = cfg.propagation.shadow_corr_len;
    if (cfg.propagation_seed_fixed) p["seed"] = cfg.propagation.seed;
    j["propagation"] = p;
    j["feature_radius_m"] = cfg.feature_radius_m;
    return j;
}

}  // namespace

void write_summary_json(std::ostream& out, const ExperimentSummary& summary,
                        const TrialConfig& base) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(base);
    nlohmann::ordered_json methods = nlohmann::ordered_json::array();
    for (const Method m : summary.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    j["trials"] = summary.trials;
    j["iterations"] = summary.iterations;

    nlohmann::ordered_json agg;
    for (const MethodAggregate& a : summary.aggregates) {
        nlohmann::ordered_json ja;
        ja["n_ok"] = a.n_ok;
        ja["sme_final_m"] = quantiles_to_json(a.sme_final);
        ja["boe_final_m"] = quantiles_to_json(a.boe_final);
        nlohmann::ordered_json per_iter = nlohmann::ordered_json::array();
        for (const Quantiles& q : a.boe_by_iter)
            per_iter.push_back({q.median, q.q25, q.q75});
        ja["boe_by_iter_m"] = per_iter;
        agg[method_name(a.method)] = ja;
    }
    j["aggregate"] = agg;

    nlohmann::ordered_json recs = nlohmann::ordered_json::array();
    for (const TrialRecord& rec : summary.records) {
        nlohmann::ordered_json jr;
        jr["trial"] = rec.trial;
        jr["method"] = method_name(rec.method);
        jr["seed"] = rec.seed;
        jr["final_sme_m"] = rec.result.sme_per_iter.back();
        jr["final_boe_m"] = rec.result.boe_per_iter.back();
        jr["jammer"] = {rec.result.jammer.ix, rec.result.jammer.iy};
        jr["start"] = {rec.result.start.ix, rec.result.start.iy};
        jr["best_sampled"] = {rec.result.best_sampled_cell.ix, rec.result.best_sampled_cell.iy};
        jr["posterior_argmax"] = {rec.result.posterior_argmax_cell.ix,
                                  rec.result.posterior_argmax_cell.iy};
        jr["theta"] = theta_to_json(rec.result.theta_final);
        jr["wallclock_s"] = rec.result.wallclock_s;
        recs.push_back(jr);
    }
    j["trial_records"] = recs;

    nlohmann::ordered_json fails = nlohmann::ordered_json::array();
    for (const TrialFailure& f : summary.failures)
        fails.push_back({{"trial", f.trial}, {"method", method_name(f.method)}, {"error", f.error}});
    j["failures"] = fails;

    out << j.dump(2) << '\n';
}

void write_sweep_csv(std::ostream& out, const SweepSummary& sweep) {
    out << "kappa,median_boe_m,q25,q75\n";
    char line[128];
    for (const SweepRow& row : sweep.rows) {
        std::snprintf(line, sizeof line, "%.6g,%.6f,%.6f,%.6f\n", row.kappa,
                      row.boe_at_checkpoint.median, row.boe_at_checkpoint.q25,
                      row.boe_at_checkpoint.q75);
        out << line;
    }
}

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!allowed.contains(key))
            throw std::invalid_argument("config: unknown key \"" + key + "\" in " + where);
}

std::pair<double, double> parse_range(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("config: " + where + " must be a [min, max] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

RunSpec parse_run_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    require_keys(j,
                 {"method", "methods", "trials", "iterations", "b0", "bn", "kappa", "noise_var",
                  "delta", "edge_params", "gp_restarts", "seed", "map_spec", "jammer",
                  "propagation", "feature_radius_m"},
                 "top level");

    RunSpec spec;
    TrialConfig& cfg = spec.base;
    if (j.contains("method")) cfg.method = parse_method(j["method"].get<std::string>());
    if (j.contains("iterations")) cfg.iterations = j["iterations"].get<int>();
    if (j.contains("b0")) cfg.b0 = j["b0"].get<int>();
    if (j.contains("bn")) cfg.bn = j["bn"].get<int>();
    if (j.contains("kappa")) cfg.kappa = j["kappa"].get<double>();
    if (j.contains("noise_var")) cfg.noise_var = j["noise_var"].get<double>();
    if (j.contains("delta")) cfg.delta = j["delta"].get<int>();
    if (j.contains("gp_restarts")) cfg.gp_restarts = j["gp_restarts"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("feature_radius_m")) cfg.feature_radius_m = j["feature_radius_m"].get<double>();

    if (j.contains("edge_params")) {
        const json& e = j["edge_params"];
        require_keys(e, {"lambda_len", "lambda_info", "epsilon"}, "edge_params");
        if (e.contains("lambda_len")) cfg.edge_params.lambda_len = e["lambda_len"].get<double>();
        if (e.contains("lambda_info")) cfg.edge_params.lambda_info = e["lambda_info"].get<double>();
        if (e.contains("epsilon")) cfg.edge_params.epsilon = e["epsilon"].get<double>();
    }

    if (j.contains("map_spec")) {
        const json& m = j["map_spec"];
        require_keys(m, {"file", "text", "generator"}, "map_spec");
        if (static_cast<int>(m.contains("file")) + m.contains("text") + m.contains("generator") > 1)
            throw std::invalid_argument("config: map_spec takes one of file, text, or generator");
        if (m.contains("file")) {
            cfg.map_spec.file = m["file"].get<std::string>();
        } else if (m.contains("text")) {
            cfg.map_spec.text = m["text"].get<std::string>();
        } else if (m.contains("generator")) {
            const json& g = m["generator"];
            require_keys(g,
                         {"seed", "width", "height", "n_buildings", "building_size_range",
                          "height_range", "cell_size"},
                         "map_spec.generator");
            MapGenSpec& gen = cfg.map_spec.gen;
            if (g.contains("seed")) gen.seed = g["seed"].get<std::uint64_t>();
            if (g.contains("width")) gen.width = g["width"].get<int>();
            if (g.contains("height")) gen.height = g["height"].get<int>();
            if (g.contains("n_buildings")) gen.n_buildings = g["n_buildings"].get<int>();
            if (g.contains("building_size_range")) {
                const auto [lo, hi] = parse_range(g["building_size_range"], "building_size_range");
                gen.building_size_range = {static_cast<int>(lo), static_cast<int>(hi)};
            }
            if (g.contains("height_range"))
                gen.height_range = parse_range(g["height_range"], "height_range");
            if (g.contains("cell_size")) gen.cell_size = g["cell_size"].get<double>();
        }
    }

    if (j.contains("jammer")) {
        const json& jam = j["jammer"];
        if (jam.is_string()) {
            if (jam.get<std::string>() != "random-feasible")
                throw std::invalid_argument("config: jammer must be \"random-feasible\" or [ix, iy]");
        } else {
            if (!jam.is_array() || jam.size() != 2)
                throw std::invalid_argument("config: jammer must be \"random-feasible\" or [ix, iy]");
            cfg.jammer = Cell{jam[0].get<int>(), jam[1].get<int>()};
        }
    }

    if (j.contains("propagation")) {
        const json& p = j["propagation"];
        require_keys(p, {"p0", "d0", "gamma", "wall_loss", "shadow_sigma", "shadow_corr_len", "seed"},
                     "propagation");
        if (p.contains("p0")) cfg.propagation.p0 = p["p0"].get<double>();
        if (p.contains("d0")) cfg.propagation.d0 = p["d0"].get<double>();
        if (p.contains("gamma")) cfg.propagation.gamma = p["gamma"].get<double>();
        if (p.contains("wall_loss")) cfg.propagation.wall_loss = p["wall_loss"].get<double>();
        if (p.contains("shadow_sigma")) cfg.propagation.shadow_sigma = p["shadow_sigma"].get<double>();
        if (p.contains("shadow_corr_len"))
            cfg.propagation.shadow_corr_len = p["shadow_corr_len"].get<double>();
        if (p.contains("seed")) {
            cfg.propagation.seed = p["seed"].get<std::uint64_t>();
            cfg.propagation_seed_fixed = true;
        }
    }

    if (j.contains("trials")) spec.trials = j["trials"].get<int>();
    if (j.contains("methods")) {
        for (const auto& m : j["methods"]) spec.methods.push_back(parse_method(m.get<std::string>()));
        if (spec.methods.empty()) throw std::invalid_argument("config: methods must be non-empty");
    } else {
        spec.methods = {cfg.method};
    }
    return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_spec(buf.str());
}

}  // namespace jamloc
