#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jamloc/acquisition.hpp"
#include "jamloc/grid.hpp"
#include "jamloc/rng.hpp"

namespace jamloc {

// A walk on the feasible set. Consecutive cells are 4-adjacent, except that
// the random-motion baseline records a stay-in-place as a repeated cell.
struct Path {
    std::vector<Cell> cells;
    double length_m = 0.0;
};

struct EdgeCostParams {
    double lambda_len = 1.0;   // travel-cost weight
    double lambda_info = 0.8;  // acquisition-gain weight
    double epsilon = 1e-6;     // per-meter cost floor (keeps A* admissible)
};

// Travel cost discounted by the mean acquisition over the edge, floored at
// epsilon per meter so edge costs stay strictly positive.
double edge_cost(const EdgeCostParams& params, double acq_norm_a, double acq_norm_b, double dist_m);

using EdgeCostFn = std::function<double(Cell from, Cell to)>;

// A* on the feasible 4-connected grid with h = heuristic_rate * Euclidean
// meters. The caller guarantees heuristic_rate does not exceed the minimum
// per-meter edge cost. Ties on f prefer larger g, then (iy, ix) order.
// Returns nullopt when the goal is not connected to the start.
std::optional<Path> astar(const GridMap& map, Cell start, Cell goal, const EdgeCostFn& cost_fn,
                          double heuristic_rate);

// Acquisition-aware planning toward `target`, truncated to `delta` steps when
// bounded. An unreachable target falls back to the reachable cell with the
// highest acquisition.
Path plan_aucb(const GridMap& map, Cell start, Cell target, const AcquisitionField& acq,
               const EdgeCostParams& params, std::optional<int> delta);

// b cells at uniformly spaced path indices; always ends at the final cell.
// Duplicate indices repeat cells, so exactly b entries come back.
std::vector<Cell> subsample_waypoints(const Path& path, int b);

// Uniform random walk over feasible cardinal neighbors; stays in place when
// boxed in. Exactly `steps` moves.
Path random_motion(const GridMap& map, Cell start, int steps, Rng& rng);

// b uniform-with-replacement draws from the feasible set.
std::vector<Cell> random_iid(std::span<const Cell> feasible, int b, Rng& rng);

}  // namespace jamloc
