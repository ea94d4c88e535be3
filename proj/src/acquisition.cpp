#include "jamloc/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace jamloc {

AcquisitionField make_acquisition(std::vector<double> values, double kappa) {
    AcquisitionField acq;
    acq.kappa = kappa;
    acq.normalized.resize(values.size());
    if (!values.empty()) {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        if (*hi > *lo) {
            const double min = *lo, range = *hi - *lo;
            for (std::size_t i = 0; i < values.size(); ++i)
                acq.normalized[i] = (values[i] - min) / range;
        } else {
            std::fill(acq.normalized.begin(), acq.normalized.end(), 0.5);
        }
    }
    acq.values = std::move(values);
    return acq;
}

AcquisitionField ucb(const Posterior& post, double kappa) {
    if (kappa < 0.0) throw std::invalid_argument("ucb: kappa must be >= 0");
    std::vector<double> values(post.mu.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = post.mu[i] + kappa * std::sqrt(post.var[i]);
    return make_acquisition(std::move(values), kappa);
}

Cell select_target(const GridMap& map, const AcquisitionField& acq) {
    const auto& feas = map.feasible_cells();
    if (feas.empty() || acq.values.size() != feas.size())
        throw std::invalid_argument("select_target: field does not cover the feasible set");
    std::size_t best = 0;
    for (std::size_t i = 1; i < feas.size(); ++i)
        if (acq.values[i] > acq.values[best]) best = i;  // row-major scan = (iy, ix) ties
    return feas[best];
}

void dump_acquisition_csv(std::ostream& out, const GridMap& map, const AcquisitionField& acq) {
    out << "ix,iy,alpha,alpha_norm\n";
    char line[96];
    const auto& feas = map.feasible_cells();
    for (std::size_t i = 0; i < feas.size(); ++i) {
        std::snprintf(line, sizeof line, "%d,%d,%.6f,%.6f\n", feas[i].ix, feas[i].iy,
                      acq.values[i], acq.normalized[i]);
        out << line;
    }
}

}  // namespace jamloc
