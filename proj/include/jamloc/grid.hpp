#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace jamloc {

struct Cell {
    int ix = 0;
    int iy = 0;

    friend bool operator==(const Cell& a, const Cell& b) { return a.ix == b.ix && a.iy == b.iy; }
    friend bool operator!=(const Cell& a, const Cell& b) { return !(a == b); }
    // Lexicographic on (iy, ix); the tie-break order used everywhere.
    friend bool operator<(const Cell& a, const Cell& b) {
        return a.iy != b.iy ? a.iy < b.iy : a.ix < b.ix;
    }
};

// Discretized workspace: a width x height grid of square cells of side
// cell_size meters. Cells with a positive raster height are obstacles
// (buildings); the rest form the feasible set the agent moves on.
// Immutable after construction, safe to share across threads.
class GridMap {
public:
    GridMap(int width, int height, double cell_size, std::vector<double> height_raster);

    static GridMap load(const std::string& text);
    static GridMap load_file(const std::filesystem::path& path);
    [[nodiscard]] std::string save() const;
    void save_file(const std::filesystem::path& path) const;

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] double cell_size() const noexcept { return cell_size_; }
    [[nodiscard]] double max_height() const noexcept { return max_height_; }

    [[nodiscard]] bool in_bounds(Cell c) const noexcept {
        return c.ix >= 0 && c.ix < width_ && c.iy >= 0 && c.iy < height_;
    }
    [[nodiscard]] std::size_t id(Cell c) const noexcept {
        return static_cast<std::size_t>(c.iy) * width_ + c.ix;
    }
    [[nodiscard]] bool obstacle(Cell c) const { return obstacle_[id(c)]; }
    [[nodiscard]] bool feasible(Cell c) const { return in_bounds(c) && !obstacle_[id(c)]; }
    [[nodiscard]] double height_at(Cell c) const { return raster_[id(c)]; }

    // Index of c in feasible_cells() (row-major order), or -1 on obstacles.
    [[nodiscard]] int feasible_index(Cell c) const { return fid_[id(c)]; }
    [[nodiscard]] const std::vector<Cell>& feasible_cells() const noexcept { return feasible_; }

    [[nodiscard]] double center_distance_m(Cell a, Cell b) const {
        const double dx = static_cast<double>(a.ix - b.ix);
        const double dy = static_cast<double>(a.iy - b.iy);
        return cell_size_ * std::sqrt(dx * dx + dy * dy);
    }

    // In-bounds feasible 4-neighbors, in fixed (+x, +y, -x, -y) order.
    [[nodiscard]] std::vector<Cell> neighbors(Cell c) const;

    // Normalized max building height within `radius_m` of c (center-to-center,
    // boundary inclusive). 0 on maps with no buildings.
    [[nodiscard]] double height_feature(Cell c, double radius_m) const;

    // Supercover traversal of the segment between the centers of a and b:
    // every cell whose closed box the segment touches, endpoints included.
    [[nodiscard]] std::vector<Cell> crossed_cells(Cell a, Cell b) const;

private:
    int width_;
    int height_;
    double cell_size_;
    double max_height_ = 0.0;
    std::vector<double> raster_;
    std::vector<std::uint8_t> obstacle_;
    std::vector<std::int32_t> fid_;
    std::vector<Cell> feasible_;
};

// Random axis-aligned rectangular buildings, retried per building until the
// feasible set stays one 4-connected component. Pure function of its inputs.
GridMap gen_random_map(std::uint64_t seed, int width, int height, int n_buildings,
                       std::pair<int, int> building_size_range,
                       std::pair<double, double> height_range, double cell_size = 2.0);

}  // namespace jamloc
