#include "jamloc/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace jamloc {

namespace {

// Separable Gaussian blur of per-cell white noise, rescaled to zero mean and
// `sigma` std over the feasible cells. Row/column passes use a fixed
// decomposition so results do not depend on the thread count.
std::vector<double> shadowing_surface(const GridMap& map, double sigma, double corr_len_m,
                                      std::uint64_t seed, bool parallel) {
    const int w = map.width(), h = map.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<double> noise(n);
    Rng rng(derive_seed(seed, 0x73686164));
    for (double& v : noise) v = rng.normal();

    const double sigma_cells = corr_len_m / map.cell_size();
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma_cells)));
    std::vector<double> kernel(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k)
        kernel[k + radius] = std::exp(-0.5 * (k * k) / (sigma_cells * sigma_cells));

    std::vector<double> tmp(n), smooth(n);
#pragma omp parallel for schedule(static) if (parallel)
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            double acc = 0.0, wsum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int jx = ix + k;
                if (jx < 0 || jx >= w) continue;
                acc += kernel[k + radius] * noise[static_cast<std::size_t>(iy) * w + jx];
                wsum += kernel[k + radius];
            }
            tmp[static_cast<std::size_t>(iy) * w + ix] = acc / wsum;
        }
    }
#pragma omp parallel for schedule(static) if (parallel)
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            double acc = 0.0, wsum = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int jy = iy + k;
                if (jy < 0 || jy >= h) continue;
                acc += kernel[k + radius] * tmp[static_cast<std::size_t>(jy) * w + ix];
                wsum += kernel[k + radius];
            }
            smooth[static_cast<std::size_t>(iy) * w + ix] = acc / wsum;
        }
    }

    const auto& feas = map.feasible_cells();
    double mean = 0.0;
    for (const Cell& c : feas) mean += smooth[map.id(c)];
    mean /= static_cast<double>(feas.size());
    double var = 0.0;
    for (const Cell& c : feas) {
        const double d = smooth[map.id(c)] - mean;
        var += d * d;
    }
    var /= static_cast<double>(feas.size());
    const double std_raw = std::sqrt(var);
    const double scale = std_raw < 1e-12 ? 0.0 : sigma / std_raw;

    std::vector<double> out(n, 0.0);
    for (const Cell& c : feas) out[map.id(c)] = scale * (smooth[map.id(c)] - mean);
    return out;
}

}  // namespace

GroundTruthField::GroundTruthField(GridMap map, Cell jammer, PropagationParams params,
                                   bool parallel)
    : map_(std::move(map)), jammer_(jammer), params_(params) {
    if (!map_.feasible(jammer_)) throw std::invalid_argument("jammer cell is infeasible");
    if (!(params_.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (params_.wall_loss < 0.0) throw std::invalid_argument("wall_loss must be >= 0");
    if (params_.shadow_sigma < 0.0) throw std::invalid_argument("shadow_sigma must be >= 0");
    if (!(params_.shadow_corr_len > 0.0)) throw std::invalid_argument("shadow_corr_len must be > 0");
    if (!(params_.d0 > 0.0)) throw std::invalid_argument("d0 must be > 0");

    const auto& feas = map_.feasible_cells();
    const std::size_t nf = feas.size();

    // Deterministic part: path loss plus capped wall attenuation.
    std::vector<double> base(nf);
    const std::int64_t count = static_cast<std::int64_t>(nf);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < count; ++i) {
        const Cell c = feas[static_cast<std::size_t>(i)];
        const double d = std::max(map_.center_distance_m(c, jammer_), params_.d0);
        int walls = 0;
        for (const Cell& crossed : map_.crossed_cells(c, jammer_))
            if (map_.obstacle(crossed)) ++walls;
        base[static_cast<std::size_t>(i)] = params_.p0 -
                                            10.0 * params_.gamma * std::log10(d / params_.d0) -
                                            std::min(params_.wall_loss * walls, kWallLossCapDb);
    }

    // The optimization target must peak at the jammer; heavy shadowing can
    // move the arg-max, in which case the surface is redrawn.
    constexpr int kMaxRedraws = 64;
    for (int redraw = 0;; ++redraw) {
        values_ = base;
        if (params_.shadow_sigma > 0.0) {
            const auto surface = shadowing_surface(map_, params_.shadow_sigma,
                                                   params_.shadow_corr_len,
                                                   params_.seed + static_cast<std::uint64_t>(redraw),
                                                   parallel);
            for (std::size_t i = 0; i < nf; ++i) values_[i] += surface[map_.id(feas[i])];
        }

        std::size_t best = 0;
        for (std::size_t i = 1; i < nf; ++i)
            if (values_[i] > values_[best]) best = i;  // row-major scan = (iy, ix) tie-break
        if (feas[best] == jammer_) break;
        if (params_.shadow_sigma == 0.0 || redraw + 1 >= kMaxRedraws)
            throw std::runtime_error("build_field: arg-max invariant unachievable");
    }
}

double GroundTruthField::value_at(Cell c) const {
    const int fi = map_.feasible_index(c);
    if (fi < 0) throw std::invalid_argument("value_at: infeasible cell");
    return values_[static_cast<std::size_t>(fi)];
}

void GroundTruthField::save_csv(std::ostream& out) const {
    out << "ix,iy,rss_dbm\n";
    char line[80];
    const auto& feas = map_.feasible_cells();
    for (std::size_t i = 0; i < feas.size(); ++i) {
        std::snprintf(line, sizeof line, "%d,%d,%.6f\n", feas[i].ix, feas[i].iy, values_[i]);
        out << line;
    }
}

Measurement sample_measurement(const GroundTruthField& field, Cell cell, double noise_var,
                               Rng& rng, int iteration) {
    if (noise_var < 0.0) throw std::invalid_argument("noise_var must be >= 0");
    const double y = field.value_at(cell) +
                     (noise_var > 0.0 ? rng.normal(0.0, std::sqrt(noise_var)) : 0.0);
    return Measurement{cell, y, iteration};
}

Dataset gen_crowdsourced(const GroundTruthField& field, int b0, double noise_var, Rng& rng,
                         double feature_radius_m) {
    if (b0 < 0) throw std::invalid_argument("b0 must be >= 0");
    const auto& feas = field.map().feasible_cells();
    Dataset data;
    for (int i = 0; i < b0; ++i) {
        const Cell c = feas[rng.uniform_int(feas.size())];
        const Measurement m = sample_measurement(field, c, noise_var, rng, 0);
        data.add(Obs{make_feature(field.map(), c, feature_radius_m), m.y, c, 0});
    }
    return data;
}

}  // namespace jamloc
