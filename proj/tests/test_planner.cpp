#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <queue>

#include "jamloc/planner.hpp"
#include "oracles.hpp"

using namespace jamloc;
using namespace jamloc::testing;

namespace {

GridMap open_map(int n) { return gen_random_map(1, n, n, 0, {2, 2}, {5.0, 6.0}); }

// All simple paths between two cells up to a step bound; used as the
// exhaustive optimum oracle on tiny maps.
void enumerate_paths(const GridMap& map, Cell cur, Cell goal, int max_steps,
                     std::vector<Cell>& prefix, std::vector<std::uint8_t>& on_path,
                     const EdgeCostFn& cost_fn, double cost_so_far, double& best_cost) {
    if (cur == goal) {
        best_cost = std::min(best_cost, cost_so_far);
        return;
    }
    if (static_cast<int>(prefix.size()) - 1 >= max_steps) return;
    for (const Cell& nb : map.neighbors(cur)) {
        if (on_path[map.id(nb)]) continue;
        on_path[map.id(nb)] = 1;
        prefix.push_back(nb);
        enumerate_paths(map, nb, goal, max_steps, prefix, on_path, cost_fn,
                       cost_so_far + cost_fn(cur, nb), best_cost);
        prefix.pop_back();
        on_path[map.id(nb)] = 0;
    }
}

}  // namespace

TEST_CASE("edge_cost applies the info discount and the positivity clamp") {
    EdgeCostParams p;
    p.lambda_len = 1.0;
    p.lambda_info = 0.5;
    CHECK(edge_cost(p, 1.0, 1.0, 2.0) == doctest::Approx(1.0));
    CHECK(edge_cost(p, 0.0, 0.0, 2.0) == doctest::Approx(2.0));

    p.lambda_info = 2.0;
    CHECK(edge_cost(p, 1.0, 1.0, 2.0) == doctest::Approx(2e-6));
}

TEST_CASE("astar handles the trivial and Manhattan cases") {
    const GridMap map = open_map(5);
    const EdgeCostFn unit = [&](Cell, Cell) { return map.cell_size(); };

    const auto self = astar(map, {2, 2}, {2, 2}, unit, 0.0);
    REQUIRE(self.has_value());
    CHECK(self->cells.size() == 1);
    CHECK(path_cost(*self, unit) == 0.0);

    const auto diag = astar(map, {0, 0}, {4, 4}, unit, 1.0);
    REQUIRE(diag.has_value());
    CHECK(diag->cells.size() == 9);
    CHECK(path_cost(*diag, unit) == doctest::Approx(8.0 * map.cell_size()));
    CHECK(path_valid(map, *diag));
}

TEST_CASE("astar rejects infeasible endpoints and reports unreachable goals") {
    const GridMap map = GridMap::load(
        "GRIDMAP v1 5 3 2.0\n"
        "0 0 9 0 0\n"
        "0 0 9 0 0\n"
        "0 0 9 0 0\n");
    const EdgeCostFn unit = [&](Cell, Cell) { return map.cell_size(); };
    CHECK_THROWS_AS(astar(map, {2, 0}, {0, 0}, unit, 0.0), std::invalid_argument);
    CHECK(!astar(map, {0, 0}, {4, 0}, unit, 0.0).has_value());
}

TEST_CASE("astar total cost equals Dijkstra on random maps with random edge costs") {
    Rng rng(606);
    int solved = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const GridMap map = random_obstacle_map(rng, 8, 0.25);
        double min_cost = 0.0;
        const EdgeCostFn cost_fn = random_edge_costs(map, rng, min_cost);
        const Cell start = random_feasible(map, rng);
        const Cell goal = random_feasible(map, rng);

        const double oracle = dijkstra_cost(map, start, goal, cost_fn);
        const double rate = std::isfinite(min_cost) ? min_cost / map.cell_size() : 0.0;
        const auto path = astar(map, start, goal, cost_fn, rate);
        if (!path) {
            CHECK(!std::isfinite(oracle));
            continue;
        }
        ++solved;
        CHECK(path_valid(map, *path));
        CHECK(path_cost(*path, cost_fn) == oracle);  // dyadic costs: exact
    }
    CHECK(solved > 60);
}

TEST_CASE("astar path length equals BFS distance under uniform costs") {
    Rng rng(607);
    for (int trial = 0; trial < 60; ++trial) {
        const GridMap map = random_obstacle_map(rng, 8, 0.25);
        const EdgeCostFn unit = [&](Cell, Cell) { return map.cell_size(); };
        const Cell start = random_feasible(map, rng);
        const Cell goal = random_feasible(map, rng);
        const int bfs = bfs_steps(map, start, goal);
        const auto path = astar(map, start, goal, unit, 1.0);
        if (bfs < 0) {
            CHECK(!path.has_value());
        } else {
            REQUIRE(path.has_value());
            CHECK(static_cast<int>(path->cells.size()) - 1 == bfs);
        }
    }
}

TEST_CASE("plan_aucb over a flat field is a shortest path") {
    const GridMap map = open_map(9);
    const AcquisitionField flat = make_acquisition(
        std::vector<double>(map.feasible_cells().size(), 3.0), 2.0);
    const Path path = plan_aucb(map, {0, 0}, {8, 5}, flat, EdgeCostParams{}, std::nullopt);
    CHECK(static_cast<int>(path.cells.size()) - 1 == bfs_steps(map, {0, 0}, {8, 5}));
    CHECK(path_valid(map, path));
}

TEST_CASE("plan_aucb prefers the high-acquisition corridor of two equal-length routes") {
    // Two 3-wide corridors around a wall; both routes are 8 steps.
    const GridMap map = GridMap::load(
        "GRIDMAP v1 7 3 2.0\n"
        "0 0 0 0 0 0 0\n"
        "0 9 9 9 9 9 0\n"
        "0 0 0 0 0 0 0\n");
    std::vector<double> vals(map.feasible_cells().size(), 0.0);
    for (int ix = 0; ix < 7; ++ix)
        vals[map.feasible_index({ix, 0})] = 10.0;  // top corridor is informative
    vals[map.feasible_index({0, 1})] = 5.0;
    vals[map.feasible_index({6, 1})] = 5.0;
    const AcquisitionField acq = make_acquisition(vals, 2.0);

    EdgeCostParams params;
    params.lambda_info = 0.8;
    const Path path = plan_aucb(map, {0, 1}, {6, 1}, acq, params, std::nullopt);
    CHECK(path_valid(map, path));
    bool uses_top = false;
    for (const Cell& c : path.cells) uses_top |= c.iy == 0;
    CHECK(uses_top);

    // Exhaustive enumeration oracle: planner cost equals the simple-path optimum.
    const EdgeCostFn cost_fn = [&](Cell a, Cell b) {
        return edge_cost(params, acq.normalized[map.feasible_index(a)],
                         acq.normalized[map.feasible_index(b)], map.cell_size());
    };
    std::vector<Cell> prefix{{0, 1}};
    std::vector<std::uint8_t> on_path(static_cast<std::size_t>(map.width()) * map.height(), 0);
    on_path[map.id({0, 1})] = 1;
    double best = std::numeric_limits<double>::infinity();
    enumerate_paths(map, {0, 1}, {6, 1}, 12, prefix, on_path, cost_fn, 0.0, best);
    CHECK(path_cost(path, cost_fn) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("plan_aucb truncates to the step budget") {
    const GridMap map = open_map(12);
    const AcquisitionField flat = make_acquisition(
        std::vector<double>(map.feasible_cells().size(), 1.0), 2.0);
    const Path path = plan_aucb(map, {0, 0}, {10, 0}, flat, EdgeCostParams{}, 3);
    REQUIRE(path.cells.size() == 4);
    CHECK(path.cells.front() == Cell{0, 0});
    CHECK(path.length_m == doctest::Approx(3.0 * map.cell_size()));
}

TEST_CASE("plan_aucb falls back to the best reachable cell when cut off") {
    const GridMap map = GridMap::load(
        "GRIDMAP v1 5 3 2.0\n"
        "0 0 9 0 0\n"
        "0 0 9 0 0\n"
        "0 0 9 0 0\n");
    std::vector<double> vals(map.feasible_cells().size(), 0.0);
    vals[map.feasible_index({4, 2})] = 10.0;  // unreachable arg-max
    vals[map.feasible_index({1, 2})] = 5.0;   // best reachable
    const AcquisitionField acq = make_acquisition(vals, 2.0);

    const Path path = plan_aucb(map, {0, 0}, {4, 2}, acq, EdgeCostParams{}, std::nullopt);
    CHECK(path_valid(map, path));
    CHECK(path.cells.back() == Cell{1, 2});
}

TEST_CASE("subsample_waypoints spaces indices uniformly and keeps the endpoint") {
    Path path;
    for (int i = 0; i <= 10; ++i) path.cells.push_back({i, 0});
    const auto two = subsample_waypoints(path, 2);
    REQUIRE(two.size() == 2);
    CHECK(two[0] == Cell{0, 0});
    CHECK(two[1] == Cell{10, 0});

    Path single;
    single.cells.push_back({3, 3});
    const auto repeated = subsample_waypoints(single, 2);
    REQUIRE(repeated.size() == 2);
    CHECK(repeated[0] == repeated[1]);

    Path seven;
    for (int i = 0; i < 7; ++i) seven.cells.push_back({i, 0});
    const auto three = subsample_waypoints(seven, 3);
    REQUIRE(three.size() == 3);
    CHECK(three[0] == Cell{0, 0});
    CHECK(three[1] == Cell{3, 0});
    CHECK(three[2] == Cell{6, 0});
}

TEST_CASE("random_motion walks feasibly and stays put when boxed in") {
    const GridMap map = open_map(16);
    Rng rng(12);
    const Path still = random_motion(map, {4, 4}, 0, rng);
    CHECK(still.cells.size() == 1);

    const Path walk = random_motion(map, {8, 8}, 200, rng);
    CHECK(walk.cells.size() == 201);
    CHECK(path_valid(map, walk, true));

    const GridMap boxed = GridMap::load(
        "GRIDMAP v1 4 4 2.0\n"
        "0 5 0 0\n"
        "5 0 5 0\n"
        "0 5 0 0\n"
        "0 0 0 0\n");
    Rng rng2(12);
    const Path stuck = random_motion(boxed, {1, 1}, 5, rng2);
    REQUIRE(stuck.cells.size() == 6);
    for (const Cell& c : stuck.cells) CHECK(c == Cell{1, 1});
}

TEST_CASE("random_motion picks directions uniformly in the interior") {
    const GridMap map = gen_random_map(1, 256, 256, 0, {2, 2}, {5.0, 6.0});
    Rng rng(99);
    Cell cur{128, 128};
    int counts[4] = {0, 0, 0, 0};
    long long tallied = 0;
    constexpr int kSteps = 100000;
    for (int s = 0; s < kSteps; ++s) {
        const Path step = random_motion(map, cur, 1, rng);
        const Cell next = step.cells.back();
        const bool interior = cur.ix > 0 && cur.ix < 255 && cur.iy > 0 && cur.iy < 255;
        if (interior) {
            const int dx = next.ix - cur.ix, dy = next.iy - cur.iy;
            const int dir = dx == 1 ? 0 : (dy == 1 ? 1 : (dx == -1 ? 2 : 3));
            ++counts[dir];
            ++tallied;
        }
        cur = next;
    }
    const double p = 0.25;
    const double sigma = std::sqrt(static_cast<double>(tallied) * p * (1 - p));
    for (int d = 0; d < 4; ++d)
        CHECK(std::abs(counts[d] - tallied * p) < 3.0 * sigma + 1.0);
}

TEST_CASE("random_iid draws uniformly with replacement") {
    Rng rng(5);
    const GridMap map = open_map(10);
    const auto& feas = map.feasible_cells();
    CHECK(random_iid(feas, 0, rng).empty());

    const std::vector<Cell> singleton{{3, 3}};
    const auto copies = random_iid(singleton, 5, rng);
    REQUIRE(copies.size() == 5);
    for (const Cell& c : copies) CHECK(c == Cell{3, 3});

    // Chi-square uniformity over the 100 cells at p > 0.001.
    constexpr int kDraws = 100000;
    std::vector<int> histogram(feas.size(), 0);
    for (const Cell& c : random_iid(feas, kDraws, rng)) {
        ++histogram[static_cast<std::size_t>(map.feasible_index(c))];
    }
    const double expected = static_cast<double>(kDraws) / static_cast<double>(feas.size());
    double chi2 = 0.0;
    for (int obs : histogram) chi2 += (obs - expected) * (obs - expected) / expected;
    CHECK(chi2 < 148.3);  // chi-square 0.999 quantile at 99 dof
}

TEST_CASE("raising lambda_info never raises the chosen path's raw utility cost") {
    Rng rng(808);
    for (int trial = 0; trial < 20; ++trial) {
        const GridMap map = gen_random_map(900 + trial, 12, 12, 3, {2, 4}, {5.0, 20.0});
        std::vector<double> vals;
        for (std::size_t i = 0; i < map.feasible_cells().size(); ++i)
            vals.push_back(rng.uniform01());
        const AcquisitionField acq = make_acquisition(vals, 2.0);
        const Cell start = random_feasible(map, rng);
        const Cell goal = random_feasible(map, rng);

        double prev_raw = std::numeric_limits<double>::infinity();
        for (const double li : {0.0, 0.2, 0.4, 0.8}) {
            EdgeCostParams params;
            params.lambda_info = li;
            const Path path = plan_aucb(map, start, goal, acq, params, std::nullopt);
            double raw = 0.0;
            for (std::size_t i = 0; i + 1 < path.cells.size(); ++i) {
                const double a = acq.normalized[map.feasible_index(path.cells[i])];
                const double b = acq.normalized[map.feasible_index(path.cells[i + 1])];
                raw += (params.lambda_len - li * 0.5 * (a + b)) * map.cell_size();
            }
            CHECK(raw <= prev_raw + 1e-9);
            prev_raw = raw;

            if (li == 0.0) {
                const EdgeCostFn plain = [&](Cell, Cell) {
                    return params.lambda_len * map.cell_size();
                };
                const auto shortest = astar(map, start, goal, plain, params.lambda_len);
                REQUIRE(shortest.has_value());
                CHECK(raw == doctest::Approx(path_cost(*shortest, plain)).epsilon(1e-12));
            }
        }
    }
}
