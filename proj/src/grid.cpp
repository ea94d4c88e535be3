#include "jamloc/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "jamloc/rng.hpp"

namespace jamloc {

GridMap::GridMap(int width, int height, double cell_size, std::vector<double> height_raster)
    : width_(width), height_(height), cell_size_(cell_size), raster_(std::move(height_raster)) {
    if (width_ < 2 || height_ < 2) throw std::invalid_argument("grid must be at least 2x2");
    if (!(cell_size_ > 0.0)) throw std::invalid_argument("non-positive cell size");
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    if (raster_.size() != n) throw std::invalid_argument("height raster size mismatch");

    obstacle_.resize(n);
    fid_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(raster_[i] >= 0.0) || !std::isfinite(raster_[i]))
            throw std::invalid_argument("height raster values must be finite and non-negative");
        obstacle_[i] = raster_[i] > 0.0 ? 1 : 0;
        max_height_ = std::max(max_height_, raster_[i]);
    }
    for (int iy = 0; iy < height_; ++iy)
        for (int ix = 0; ix < width_; ++ix) {
            const Cell c{ix, iy};
            if (!obstacle_[id(c)]) {
                fid_[id(c)] = static_cast<std::int32_t>(feasible_.size());
                feasible_.push_back(c);
            }
        }
    if (feasible_.empty()) throw std::invalid_argument("empty feasible set");
}

GridMap GridMap::load(const std::string& text) {
    std::istringstream in(text);
    std::string magic, version;
    int w = 0, h = 0;
    double cs = 0.0;
    if (!(in >> magic >> version >> w >> h >> cs) || magic != "GRIDMAP" || version != "v1")
        throw std::invalid_argument("malformed map file: bad header");
    if (w < 2 || h < 2) throw std::invalid_argument("malformed map file: grid must be at least 2x2");
    if (!(cs > 0.0)) throw std::invalid_argument("non-positive cell size");

    std::vector<double> raster(static_cast<std::size_t>(w) * h);
    for (double& v : raster)
        if (!(in >> v)) throw std::invalid_argument("malformed map file: truncated raster");
    return GridMap(w, h, cs, std::move(raster));
}

GridMap GridMap::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return load(buf.str());
}

std::string GridMap::save() const {
    std::string out;
    char line[64];
    std::snprintf(line, sizeof line, "GRIDMAP v1 %d %d %.3f\n", width_, height_, cell_size_);
    out += line;
    for (int iy = 0; iy < height_; ++iy) {
        for (int ix = 0; ix < width_; ++ix) {
            std::snprintf(line, sizeof line, ix + 1 == width_ ? "%.3f\n" : "%.3f ",
                          raster_[id({ix, iy})]);
            out += line;
        }
    }
    return out;
}

void GridMap::save_file(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write map file: " + path.string());
    out << save();
}

std::vector<Cell> GridMap::neighbors(Cell c) const {
    static constexpr int kDx[4] = {1, 0, -1, 0};
    static constexpr int kDy[4] = {0, 1, 0, -1};
    std::vector<Cell> out;
    out.reserve(4);
    for (int k = 0; k < 4; ++k) {
        const Cell nb{c.ix + kDx[k], c.iy + kDy[k]};
        if (feasible(nb)) out.push_back(nb);
    }
    return out;
}

double GridMap::height_feature(Cell c, double radius_m) const {
    if (max_height_ <= 0.0) return 0.0;
    const int r_cells = static_cast<int>(std::floor(radius_m / cell_size_));
    const double r2 = radius_m * radius_m;
    const double cs2 = cell_size_ * cell_size_;
    double best = 0.0;
    for (int dy = -r_cells; dy <= r_cells; ++dy) {
        const int iy = c.iy + dy;
        if (iy < 0 || iy >= height_) continue;
        for (int dx = -r_cells; dx <= r_cells; ++dx) {
            const int ix = c.ix + dx;
            if (ix < 0 || ix >= width_) continue;
            if (cs2 * (dx * dx + dy * dy) > r2) continue;
            best = std::max(best, raster_[id({ix, iy})]);
        }
    }
    return best / max_height_;
}

std::vector<Cell> GridMap::crossed_cells(Cell a, Cell b) const {
    if (!in_bounds(a) || !in_bounds(b)) throw std::invalid_argument("crossed_cells: cell out of bounds");
    std::vector<Cell> out;
    out.push_back(a);
    if (a == b) return out;

    // Integer supercover walk (error terms track the segment exactly, so
    // corner crossings light both side cells).
    int x = a.ix, y = a.iy;
    int dx = b.ix - a.ix, dy = b.iy - a.iy;
    const int xstep = dx > 0 ? 1 : -1;
    const int ystep = dy > 0 ? 1 : -1;
    dx = std::abs(dx);
    dy = std::abs(dy);
    const long long ddx = 2LL * dx, ddy = 2LL * dy;

    if (ddx >= ddy) {
        long long error = dx, errorprev = dx;
        for (int i = 0; i < dx; ++i) {
            x += xstep;
            error += ddy;
            if (error > ddx) {
                y += ystep;
                error -= ddx;
                if (error + errorprev < ddx)
                    out.push_back({x, y - ystep});
                else if (error + errorprev > ddx)
                    out.push_back({x - xstep, y});
                else {
                    out.push_back({x, y - ystep});
                    out.push_back({x - xstep, y});
                }
            }
            out.push_back({x, y});
            errorprev = error;
        }
    } else {
        long long error = dy, errorprev = dy;
        for (int i = 0; i < dy; ++i) {
            y += ystep;
            error += ddx;
            if (error > ddy) {
                x += xstep;
                error -= ddy;
                if (error + errorprev < ddy)
                    out.push_back({x - xstep, y});
                else if (error + errorprev > ddy)
                    out.push_back({x, y - ystep});
                else {
                    out.push_back({x - xstep, y});
                    out.push_back({x, y - ystep});
                }
            }
            out.push_back({x, y});
            errorprev = error;
        }
    }
    return out;
}

namespace {

bool feasible_set_connected(const std::vector<double>& raster, int w, int h) {
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::size_t total = 0;
    std::size_t first = n;
    for (std::size_t i = 0; i < n; ++i)
        if (raster[i] <= 0.0) {
            ++total;
            if (first == n) first = i;
        }
    if (total == 0) return false;

    std::vector<std::uint8_t> seen(n, 0);
    std::deque<std::size_t> queue{first};
    seen[first] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        ++reached;
        const int cx = static_cast<int>(cur % w), cy = static_cast<int>(cur / w);
        const int nx[4] = {cx + 1, cx, cx - 1, cx};
        const int ny[4] = {cy, cy + 1, cy, cy - 1};
        for (int k = 0; k < 4; ++k) {
            if (nx[k] < 0 || nx[k] >= w || ny[k] < 0 || ny[k] >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny[k]) * w + nx[k];
            if (!seen[j] && raster[j] <= 0.0) {
                seen[j] = 1;
                queue.push_back(j);
            }
        }
    }
    return reached == total;
}

}  // namespace

GridMap gen_random_map(std::uint64_t seed, int width, int height, int n_buildings,
                       std::pair<int, int> building_size_range,
                       std::pair<double, double> height_range, double cell_size) {
    if (width < 2 || height < 2) throw std::invalid_argument("grid must be at least 2x2");
    if (n_buildings < 0) throw std::invalid_argument("n_buildings must be >= 0");
    const auto [smin, smax] = building_size_range;
    const auto [hmin, hmax] = height_range;
    if (smin < 1 || smax < smin || smax > std::min(width, height))
        throw std::invalid_argument("degenerate building size range");
    if (!(hmin > 0.0) || hmax < hmin) throw std::invalid_argument("degenerate height range");

    std::vector<double> raster(static_cast<std::size_t>(width) * height, 0.0);
    Rng rng(derive_seed(seed, 0x6d6170));  // independent of any caller streams

    constexpr int kMaxAttempts = 200;
    for (int b = 0; b < n_buildings; ++b) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            const int bw = smin + static_cast<int>(rng.uniform_int(smax - smin + 1));
            const int bh = smin + static_cast<int>(rng.uniform_int(smax - smin + 1));
            const int x0 = static_cast<int>(rng.uniform_int(width - bw + 1));
            const int y0 = static_cast<int>(rng.uniform_int(height - bh + 1));
            // Quantize so the 3-decimal map writer round-trips exactly.
            const double h = std::max(std::round(rng.uniform(hmin, hmax) * 1000.0) / 1000.0, 0.001);

            std::vector<double> trial = raster;
            for (int iy = y0; iy < y0 + bh; ++iy)
                for (int ix = x0; ix < x0 + bw; ++ix) {
                    double& v = trial[static_cast<std::size_t>(iy) * width + ix];
                    v = std::max(v, h);
                }
            if (feasible_set_connected(trial, width, height)) {
                raster = std::move(trial);
                placed = true;
            }
        }
        if (!placed)
            throw std::runtime_error("gen_random_map: cannot keep feasible set connected");
    }
    return GridMap(width, height, cell_size, std::move(raster));
}

}  // namespace jamloc
