#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "jamloc/grid.hpp"

namespace jamloc {

// GP input: normalized planar coordinates plus the local building-height
// feature, all in [0, 1].
struct FeatureVec {
    double px = 0.0;
    double py = 0.0;
    double z = 0.0;

    friend bool operator==(const FeatureVec& a, const FeatureVec& b) {
        return a.px == b.px && a.py == b.py && a.z == b.z;
    }
};

inline FeatureVec make_feature(const GridMap& map, Cell c, double feature_radius_m) {
    return FeatureVec{static_cast<double>(c.ix) / (map.width() - 1),
                      static_cast<double>(c.iy) / (map.height() - 1),
                      map.height_feature(c, feature_radius_m)};
}

struct Obs {
    FeatureVec x;
    double y = 0.0;  // dBm
    Cell cell;
    int iteration = 0;  // 0 = crowdsourced
};

struct TargetNorm {
    double mean = 0.0;
    double std = 1.0;
};

// Ordered collection of observations with the target normalization used by
// the surrogate. Value-semantic; each trial owns its own copy.
class Dataset {
public:
    void add(Obs obs) { entries_.push_back(obs); }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const Obs& operator[](std::size_t i) const { return entries_[i]; }
    [[nodiscard]] const std::vector<Obs>& entries() const noexcept { return entries_; }

    [[nodiscard]] const TargetNorm& norm() const noexcept { return norm_; }
    void set_norm(TargetNorm n) { norm_ = n; }

    // Zero-mean, unit-variance target normalization; falls back to centering
    // only when the targets are (numerically) constant.
    void recompute_norm() {
        if (entries_.empty()) {
            norm_ = TargetNorm{};
            return;
        }
        double mean = 0.0;
        for (const Obs& o : entries_) mean += o.y;
        mean /= static_cast<double>(entries_.size());
        double var = 0.0;
        for (const Obs& o : entries_) var += (o.y - mean) * (o.y - mean);
        var /= static_cast<double>(entries_.size());
        const double std = std::sqrt(var);
        norm_ = TargetNorm{mean, std < 1e-8 ? 1.0 : std};
    }

private:
    std::vector<Obs> entries_;
    TargetNorm norm_;
};

}  // namespace jamloc
