#pragma once

#include <ostream>
#include <vector>

#include "jamloc/grid.hpp"
#include "jamloc/surrogate.hpp"

namespace jamloc {

// Per-feasible-cell UCB scores (map.feasible_cells() order) plus the rescaled
// copy in [0, 1] the planner consumes. Flat fields normalize to 0.5.
struct AcquisitionField {
    std::vector<double> values;
    std::vector<double> normalized;
    double kappa = 0.0;
};

// Builds the field from raw scores, computing the normalized copy.
AcquisitionField make_acquisition(std::vector<double> values, double kappa);

// UCB: mu + kappa * sd per query cell.
AcquisitionField ucb(const Posterior& post, double kappa);

// Arg-max over the feasible set; ties go to the smallest (iy, ix).
Cell select_target(const GridMap& map, const AcquisitionField& acq);

void dump_acquisition_csv(std::ostream& out, const GridMap& map, const AcquisitionField& acq);

}  // namespace jamloc
