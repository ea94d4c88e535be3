#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "jamloc/dataset.hpp"
#include "jamloc/grid.hpp"
#include "jamloc/rng.hpp"

namespace jamloc {

// Log-distance path loss with per-wall attenuation and correlated shadowing.
struct PropagationParams {
    double p0 = 30.0;              // dBm at the reference distance
    double d0 = 1.0;               // reference distance, meters
    double gamma = 2.7;            // path-loss exponent
    double wall_loss = 1.5;        // dB per crossed obstacle cell
    double shadow_sigma = 3.0;     // shadowing std, dB
    double shadow_corr_len = 20.0; // shadowing correlation length, meters
    std::uint64_t seed = 0;
};

inline constexpr double kWallLossCapDb = 30.0;

struct Measurement {
    Cell cell;
    double y = 0.0;  // dBm
    int iteration = 0;
};

// The hidden interference field the optimizer searches. Values are defined on
// the feasible set only; construction guarantees the global maximizer is the
// jammer cell (shadowing is redrawn if it ever displaces the peak).
class GroundTruthField {
public:
    GroundTruthField(GridMap map, Cell jammer, PropagationParams params, bool parallel = true);

    [[nodiscard]] const GridMap& map() const noexcept { return map_; }
    [[nodiscard]] Cell jammer() const noexcept { return jammer_; }
    [[nodiscard]] const PropagationParams& params() const noexcept { return params_; }

    // RSS in dBm at a feasible cell.
    [[nodiscard]] double value_at(Cell c) const;
    // Per-feasible-cell values, in map.feasible_cells() order.
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

    void save_csv(std::ostream& out) const;

private:
    GridMap map_;
    Cell jammer_;
    PropagationParams params_;
    std::vector<double> values_;
};

Measurement sample_measurement(const GroundTruthField& field, Cell cell, double noise_var,
                               Rng& rng, int iteration = 0);

// b0 uniform-with-replacement draws over the feasible set, measured with
// iteration index 0.
Dataset gen_crowdsourced(const GroundTruthField& field, int b0, double noise_var, Rng& rng,
                         double feature_radius_m = 10.0);

}  // namespace jamloc
