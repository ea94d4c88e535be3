#pragma once

#include <array>
#include <span>
#include <vector>

#include "jamloc/dataset.hpp"
#include "jamloc/rng.hpp"

namespace jamloc {

// Two-scale squared-exponential kernel hyperparameters plus a learnable
// white-noise variance. Length scales are per feature dimension.
struct KernelParams {
    double sigma2_long = 1.0;
    double sigma2_short = 1.0;
    std::array<double, 3> ls_long{0.5, 0.5, 0.5};
    std::array<double, 3> ls_short{0.1, 0.1, 0.1};
    double sigma2_noise = 0.1;

    [[nodiscard]] bool valid() const;

    // The long/short labels are symmetric; after fitting, relabel so the
    // "long" kernel carries the larger planar length-scale product.
    void canonicalize();
};

// Box constraints for the hyperparameter search, in natural units
// (the optimizer works in log space).
struct FitBounds {
    double var_lo = 1e-3, var_hi = 1e3;      // signal variances
    double ls_lo = 1e-2, ls_hi = 3.0;        // all length scales
    double noise_lo = 1e-4, noise_hi = 1e2;  // noise variance
};

// Predictive mean/variance per query, de-normalized to dBm. `var` is the
// latent (noise-free) field variance; observed_var adds the fitted noise.
struct Posterior {
    std::vector<double> mu;
    std::vector<double> var;
    double noise_var = 0.0;

    [[nodiscard]] double observed_var(std::size_t i) const { return var[i] + noise_var; }
};

double kernel(const KernelParams& theta, const FeatureVec& a, const FeatureVec& b,
              bool include_noise);

// Evaluated on normalized targets; the Gram matrix takes sigma2_noise on its
// diagonal only. Throws "kernel matrix not PD" if jitter escalation fails.
double log_marginal_likelihood(const Dataset& data, const KernelParams& theta);

// Maximizes the log marginal likelihood with `restarts` Nelder-Mead searches
// in log space from log-uniform random starts. Recomputes data's target
// normalization before the search. Requires at least two observations.
KernelParams fit(Dataset& data, int restarts, const FitBounds& bounds, Rng& rng,
                 int max_evals_per_restart = 75);

Posterior posterior(const Dataset& data, const KernelParams& theta,
                    std::span<const FeatureVec> queries, bool parallel = true);

// Plain-loop single-threaded evaluation of the same posterior; kept as the
// reference implementation for tests and the kernel benchmark.
Posterior posterior_reference(const Dataset& data, const KernelParams& theta,
                              std::span<const FeatureVec> queries);

}  // namespace jamloc
