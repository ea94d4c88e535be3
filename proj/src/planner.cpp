#include "jamloc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>

namespace jamloc {

double edge_cost(const EdgeCostParams& params, double acq_norm_a, double acq_norm_b,
                 double dist_m) {
    if (!(dist_m > 0.0)) throw std::invalid_argument("edge_cost: dist must be > 0");
    const double rate = params.lambda_len - params.lambda_info * 0.5 * (acq_norm_a + acq_norm_b);
    return std::max(rate, params.epsilon) * dist_m;
}

namespace {

constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

struct QNode {
    double f;
    double g;
    Cell c;
};

// Min-f ordering; ties prefer the deeper node (larger g), then (iy, ix).
struct QWorse {
    bool operator()(const QNode& a, const QNode& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.g != b.g) return a.g < b.g;
        if (a.c.iy != b.c.iy) return a.c.iy > b.c.iy;
        return a.c.ix > b.c.ix;
    }
};

Path reconstruct(const GridMap& map, const std::vector<std::int32_t>& parent, Cell goal) {
    Path path;
    for (std::size_t id = map.id(goal);;) {
        path.cells.push_back({static_cast<int>(id % map.width()), static_cast<int>(id / map.width())});
        if (parent[id] < 0) break;
        id = static_cast<std::size_t>(parent[id]);
    }
    std::reverse(path.cells.begin(), path.cells.end());
    path.length_m = static_cast<double>(path.cells.size() - 1) * map.cell_size();
    return path;
}

}  // namespace

std::optional<Path> astar(const GridMap& map, Cell start, Cell goal, const EdgeCostFn& cost_fn,
                          double heuristic_rate) {
    if (!map.feasible(start)) throw std::invalid_argument("astar: infeasible start");
    if (!map.feasible(goal)) throw std::invalid_argument("astar: infeasible goal");

    const std::size_t n = static_cast<std::size_t>(map.width()) * map.height();
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<std::int32_t> parent(n, -1);
    std::vector<std::uint8_t> closed(n, 0);

    const auto heuristic = [&](Cell c) { return heuristic_rate * map.center_distance_m(c, goal); };

    std::priority_queue<QNode, std::vector<QNode>, QWorse> open;
    g[map.id(start)] = 0.0;
    open.push({heuristic(start), 0.0, start});

    while (!open.empty()) {
        const QNode top = open.top();
        open.pop();
        const std::size_t cur = map.id(top.c);
        if (closed[cur]) continue;
        if (top.g != g[cur]) continue;  // stale entry
        closed[cur] = 1;
        if (top.c == goal) return reconstruct(map, parent, goal);

        for (int k = 0; k < 4; ++k) {
            const Cell nb{top.c.ix + kDx[k], top.c.iy + kDy[k]};
            if (!map.feasible(nb)) continue;
            const std::size_t nid = map.id(nb);
            if (closed[nid]) continue;
            const double tentative = top.g + cost_fn(top.c, nb);
            if (tentative < g[nid]) {
                g[nid] = tentative;
                parent[nid] = static_cast<std::int32_t>(cur);
                open.push({tentative + heuristic(nb), tentative, nb});
            }
        }
    }
    return std::nullopt;
}

Path plan_aucb(const GridMap& map, Cell start, Cell target, const AcquisitionField& acq,
               const EdgeCostParams& params, std::optional<int> delta) {
    if (!map.feasible(start)) throw std::invalid_argument("plan_aucb: infeasible start");
    if (!map.feasible(target)) throw std::invalid_argument("plan_aucb: infeasible target");
    if (acq.normalized.size() != map.feasible_cells().size())
        throw std::invalid_argument("plan_aucb: field does not cover the feasible set");
    if (delta && *delta < 1) throw std::invalid_argument("plan_aucb: delta must be >= 1");

    const auto cost_fn = [&](Cell a, Cell b) {
        return edge_cost(params, acq.normalized[map.feasible_index(a)],
                         acq.normalized[map.feasible_index(b)], map.cell_size());
    };

    std::optional<Path> path = astar(map, start, target, cost_fn, params.epsilon);
    if (!path) {
        // Disconnected target: head for the best-acquisition reachable cell.
        const std::size_t n = static_cast<std::size_t>(map.width()) * map.height();
        std::vector<std::uint8_t> reach(n, 0);
        std::deque<Cell> queue{start};
        reach[map.id(start)] = 1;
        while (!queue.empty()) {
            const Cell cur = queue.front();
            queue.pop_front();
            for (int k = 0; k < 4; ++k) {
                const Cell nb{cur.ix + kDx[k], cur.iy + kDy[k]};
                if (map.feasible(nb) && !reach[map.id(nb)]) {
                    reach[map.id(nb)] = 1;
                    queue.push_back(nb);
                }
            }
        }
        Cell best = start;
        double best_val = -std::numeric_limits<double>::infinity();
        const auto& feas = map.feasible_cells();
        for (std::size_t i = 0; i < feas.size(); ++i)
            if (reach[map.id(feas[i])] && acq.values[i] > best_val) {
                best_val = acq.values[i];
                best = feas[i];
            }
        path = astar(map, start, best, cost_fn, params.epsilon);
    }

    if (delta && static_cast<int>(path->cells.size()) - 1 > *delta) {
        path->cells.resize(static_cast<std::size_t>(*delta) + 1);
        path->length_m = static_cast<double>(*delta) * map.cell_size();
    }
    return *path;
}

std::vector<Cell> subsample_waypoints(const Path& path, int b) {
    if (b < 1) throw std::invalid_argument("subsample_waypoints: b must be >= 1");
    if (path.cells.empty()) throw std::invalid_argument("subsample_waypoints: empty path");
    const std::size_t last = path.cells.size() - 1;
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(b));
    if (b == 1) {
        out.push_back(path.cells[last]);
        return out;
    }
    for (int i = 0; i < b; ++i) {
        const auto idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(last) / (b - 1)));
        out.push_back(path.cells[idx]);
    }
    return out;
}

Path random_motion(const GridMap& map, Cell start, int steps, Rng& rng) {
    if (!map.feasible(start)) throw std::invalid_argument("random_motion: infeasible start");
    if (steps < 0) throw std::invalid_argument("random_motion: steps must be >= 0");
    Path path;
    path.cells.reserve(static_cast<std::size_t>(steps) + 1);
    path.cells.push_back(start);
    Cell cur = start;
    for (int s = 0; s < steps; ++s) {
        Cell options[4];
        int count = 0;
        for (int k = 0; k < 4; ++k) {
            const Cell nb{cur.ix + kDx[k], cur.iy + kDy[k]};
            if (map.feasible(nb)) options[count++] = nb;
        }
        if (count > 0) {
            cur = options[rng.uniform_int(static_cast<std::uint64_t>(count))];
            path.length_m += map.cell_size();
        }
        path.cells.push_back(cur);  // stay in place when boxed in
    }
    return path;
}

std::vector<Cell> random_iid(std::span<const Cell> feasible, int b, Rng& rng) {
    if (feasible.empty()) throw std::invalid_argument("random_iid: empty feasible set");
    if (b < 0) throw std::invalid_argument("random_iid: b must be >= 0");
    std::vector<Cell> out;
    out.reserve(static_cast<std::size_t>(b));
    for (int i = 0; i < b; ++i) out.push_back(feasible[rng.uniform_int(feasible.size())]);
    return out;
}

}  // namespace jamloc
