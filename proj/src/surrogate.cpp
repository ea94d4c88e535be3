#include "jamloc/surrogate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace jamloc {

namespace {

constexpr int kParamDim = 9;

// Log-space parameter vector layout:
// [s2_long, s2_short, ls_long x3, ls_short x3, s2_noise]
using ParamVec = Eigen::Matrix<double, kParamDim, 1>;

KernelParams from_log(const ParamVec& p) {
    KernelParams t;
    t.sigma2_long = std::exp(p[0]);
    t.sigma2_short = std::exp(p[1]);
    for (int d = 0; d < 3; ++d) {
        t.ls_long[d] = std::exp(p[2 + d]);
        t.ls_short[d] = std::exp(p[5 + d]);
    }
    t.sigma2_noise = std::exp(p[8]);
    return t;
}

Eigen::MatrixXd feature_matrix(const Dataset& data) {
    Eigen::MatrixXd X(data.size(), 3);
    for (std::size_t i = 0; i < data.size(); ++i) {
        X(i, 0) = data[i].x.px;
        X(i, 1) = data[i].x.py;
        X(i, 2) = data[i].x.z;
    }
    return X;
}

Eigen::VectorXd normalized_targets(const Dataset& data) {
    const TargetNorm nrm = data.norm();
    Eigen::VectorXd y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) y[i] = (data[i].y - nrm.mean) / nrm.std;
    return y;
}

// Pairwise squared differences per feature dimension over the packed lower
// triangle, built once per dataset so each likelihood evaluation only
// rescales, exponentiates, and scatters. Only the lower triangle of the Gram
// matrix is produced; the Cholesky below never reads the upper part.
struct PairwiseCache {
    Eigen::Index n = 0;
    std::array<Eigen::ArrayXd, 3> d2;  // packed, index i*(i+1)/2 + j for j <= i

    explicit PairwiseCache(const Eigen::MatrixXd& X) : n(X.rows()) {
        const Eigen::Index packed = n * (n + 1) / 2;
        for (int d = 0; d < 3; ++d) {
            d2[d].resize(packed);
            Eigen::Index k = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j <= i; ++j, ++k) {
                    const double diff = X(i, d) - X(j, d);
                    d2[d][k] = diff * diff;
                }
        }
    }

    // Gram matrix without the noise term (latent covariance), lower triangle
    // plus diagonal only.
    [[nodiscard]] Eigen::MatrixXd gram(const KernelParams& t) const {
        Eigen::ArrayXd s = d2[0] * (-0.5 / (t.ls_long[0] * t.ls_long[0]));
        s += d2[1] * (-0.5 / (t.ls_long[1] * t.ls_long[1]));
        s += d2[2] * (-0.5 / (t.ls_long[2] * t.ls_long[2]));
        Eigen::ArrayXd k_packed = t.sigma2_long * s.exp();
        s = d2[0] * (-0.5 / (t.ls_short[0] * t.ls_short[0]));
        s += d2[1] * (-0.5 / (t.ls_short[1] * t.ls_short[1]));
        s += d2[2] * (-0.5 / (t.ls_short[2] * t.ls_short[2]));
        k_packed += t.sigma2_short * s.exp();

        Eigen::MatrixXd K(n, n);
        Eigen::Index k = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j, ++k) K(i, j) = k_packed[k];
        return K;
    }
};

// Jitter ladder: 0, then 1e-10 escalating x10 up to 1e-4.
Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(const Eigen::MatrixXd& A) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) return llt;
    for (double jitter = 1e-10; jitter <= 1e-4 * (1.0 + 1e-12); jitter *= 10.0) {
        Eigen::MatrixXd Aj = A;
        Aj.diagonal().array() += jitter;
        llt.compute(Aj);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw std::runtime_error("kernel matrix not PD");
}

double lml_impl(const PairwiseCache& cache, const Eigen::VectorXd& y, const KernelParams& t) {
    Eigen::MatrixXd A = cache.gram(t);
    A.diagonal().array() += t.sigma2_noise;
    const auto llt = cholesky_with_jitter(A);
    const Eigen::VectorXd alpha = llt.solve(y);
    const double n = static_cast<double>(y.size());
    const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * y.dot(alpha) - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

// Nelder-Mead on a box (candidates clamped coordinate-wise). Returns the best
// parameter vector found within the evaluation budget.
template <typename F>
std::pair<ParamVec, double> nelder_mead(F&& f, const ParamVec& start, const ParamVec& lo,
                                        const ParamVec& hi, int max_evals) {
    const auto clamp = [&](ParamVec p) {
        for (int i = 0; i < kParamDim; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
        return p;
    };

    struct Vertex {
        ParamVec x;
        double fx;
    };
    std::vector<Vertex> simplex;
    simplex.reserve(kParamDim + 1);
    int evals = 0;
    const auto eval = [&](const ParamVec& p) {
        ++evals;
        return f(p);
    };

    {
        const ParamVec p0 = clamp(start);
        simplex.push_back({p0, eval(p0)});
        for (int i = 0; i < kParamDim; ++i) {
            ParamVec p = p0;
            const double step = 0.5;
            p[i] += (p[i] + step <= hi[i]) ? step : -step;
            p = clamp(p);
            simplex.push_back({p, eval(p)});
        }
    }

    const auto by_f = [](const Vertex& a, const Vertex& b) { return a.fx < b.fx; };
    std::sort(simplex.begin(), simplex.end(), by_f);

    while (evals < max_evals) {
        const double spread = simplex.back().fx - simplex.front().fx;
        if (spread < 1e-9 * (1.0 + std::abs(simplex.front().fx))) break;

        ParamVec centroid = ParamVec::Zero();
        for (int i = 0; i < kParamDim; ++i) centroid += simplex[i].x;
        centroid /= static_cast<double>(kParamDim);

        const Vertex& worst = simplex.back();
        const ParamVec xr = clamp(centroid + (centroid - worst.x));
        const double fr = eval(xr);

        if (fr < simplex.front().fx) {
            const ParamVec xe = clamp(centroid + 2.0 * (centroid - worst.x));
            const double fe = eval(xe);
            simplex.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < simplex[kParamDim - 1].fx) {
            simplex.back() = {xr, fr};
        } else {
            const bool outside = fr < worst.fx;
            const ParamVec base = outside ? xr : worst.x;
            const ParamVec xc = clamp(centroid + 0.5 * (base - centroid));
            const double fc = eval(xc);
            if (fc < std::min(fr, worst.fx)) {
                simplex.back() = {xc, fc};
            } else {
                for (int i = 1; i <= kParamDim; ++i) {
                    simplex[i].x = clamp(simplex[0].x + 0.5 * (simplex[i].x - simplex[0].x));
                    simplex[i].fx = eval(simplex[i].x);
                    if (evals >= max_evals) break;
                }
            }
        }
        std::sort(simplex.begin(), simplex.end(), by_f);
    }
    return {simplex.front().x, simplex.front().fx};
}

}  // namespace

bool KernelParams::valid() const {
    const auto pos = [](double v) { return std::isfinite(v) && v > 0.0; };
    return pos(sigma2_long) && pos(sigma2_short) && pos(sigma2_noise) &&
           pos(ls_long[0]) && pos(ls_long[1]) && pos(ls_long[2]) &&
           pos(ls_short[0]) && pos(ls_short[1]) && pos(ls_short[2]);
}

void KernelParams::canonicalize() {
    if (ls_short[0] * ls_short[1] > ls_long[0] * ls_long[1]) {
        std::swap(sigma2_long, sigma2_short);
        std::swap(ls_long, ls_short);
    }
}

double kernel(const KernelParams& theta, const FeatureVec& a, const FeatureVec& b,
              bool include_noise) {
    const double d[3] = {a.px - b.px, a.py - b.py, a.z - b.z};
    double s_long = 0.0, s_short = 0.0;
    for (int i = 0; i < 3; ++i) {
        s_long += d[i] * d[i] / (theta.ls_long[i] * theta.ls_long[i]);
        s_short += d[i] * d[i] / (theta.ls_short[i] * theta.ls_short[i]);
    }
    double k = theta.sigma2_long * std::exp(-0.5 * s_long) +
               theta.sigma2_short * std::exp(-0.5 * s_short);
    if (include_noise && a == b) k += theta.sigma2_noise;
    return k;
}

double log_marginal_likelihood(const Dataset& data, const KernelParams& theta) {
    if (data.empty()) throw std::invalid_argument("log_marginal_likelihood: empty dataset");
    if (!theta.valid()) throw std::invalid_argument("invalid kernel parameters");
    const Eigen::MatrixXd X = feature_matrix(data);
    const PairwiseCache cache(X);
    return lml_impl(cache, normalized_targets(data), theta);
}

KernelParams fit(Dataset& data, int restarts, const FitBounds& bounds, Rng& rng,
                 int max_evals_per_restart) {
    if (data.size() < 2) throw std::invalid_argument("fit: need at least 2 observations");
    if (restarts < 1) throw std::invalid_argument("fit: restarts must be >= 1");

    data.recompute_norm();
    const Eigen::MatrixXd X = feature_matrix(data);
    const PairwiseCache cache(X);
    const Eigen::VectorXd y = normalized_targets(data);

    ParamVec lo, hi;
    lo << std::log(bounds.var_lo), std::log(bounds.var_lo),  //
        std::log(bounds.ls_lo), std::log(bounds.ls_lo), std::log(bounds.ls_lo),
        std::log(bounds.ls_lo), std::log(bounds.ls_lo), std::log(bounds.ls_lo),
        std::log(bounds.noise_lo);
    hi << std::log(bounds.var_hi), std::log(bounds.var_hi),  //
        std::log(bounds.ls_hi), std::log(bounds.ls_hi), std::log(bounds.ls_hi),
        std::log(bounds.ls_hi), std::log(bounds.ls_hi), std::log(bounds.ls_hi),
        std::log(bounds.noise_hi);

    const auto objective = [&](const ParamVec& p) {
        try {
            return -lml_impl(cache, y, from_log(p));
        } catch (const std::runtime_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double best_f = std::numeric_limits<double>::infinity();
    ParamVec best_p = ParamVec::Zero();
    for (int r = 0; r < restarts; ++r) {
        ParamVec start;
        for (int i = 0; i < kParamDim; ++i) start[i] = rng.uniform(lo[i], hi[i]);
        const auto [p, fp] = nelder_mead(objective, start, lo, hi, max_evals_per_restart);
        if (fp < best_f) {
            best_f = fp;
            best_p = p;
        }
    }
    if (!std::isfinite(best_f)) throw std::runtime_error("fit: all restarts failed factorization");

    KernelParams theta = from_log(best_p);
    theta.canonicalize();
    return theta;
}

Posterior posterior(const Dataset& data, const KernelParams& theta,
                    std::span<const FeatureVec> queries, bool parallel) {
    if (data.empty()) throw std::invalid_argument("posterior: empty dataset");
    if (!theta.valid()) throw std::invalid_argument("invalid kernel parameters");

    const std::size_t n = data.size();
    const TargetNorm nrm = data.norm();
    const Eigen::MatrixXd X = feature_matrix(data);
    const PairwiseCache cache(X);
    Eigen::MatrixXd A = cache.gram(theta);
    A.diagonal().array() += theta.sigma2_noise;
    const auto llt = cholesky_with_jitter(A);
    const Eigen::VectorXd alpha = llt.solve(normalized_targets(data));
    const Eigen::MatrixXd& L = llt.matrixLLT();

    const double prior_var = theta.sigma2_long + theta.sigma2_short;  // stationary k(x,x)
    const double s2 = nrm.std * nrm.std;

    Posterior post;
    post.mu.resize(queries.size());
    post.var.resize(queries.size());
    post.noise_var = theta.sigma2_noise * s2;

    // Fixed-size chunks keep results bitwise independent of the thread count.
    constexpr std::size_t kChunk = 256;
    const std::int64_t n_chunks = static_cast<std::int64_t>((queries.size() + kChunk - 1) / kChunk);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::int64_t ci = 0; ci < n_chunks; ++ci) {
        const std::size_t begin = static_cast<std::size_t>(ci) * kChunk;
        const std::size_t end = std::min(begin + kChunk, queries.size());
        const Eigen::Index m = static_cast<Eigen::Index>(end - begin);

        Eigen::MatrixXd Kq(n, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const FeatureVec& q = queries[begin + j];
            Eigen::ArrayXd s_long = (X.col(0).array() - q.px).square() /
                                    (theta.ls_long[0] * theta.ls_long[0]);
            s_long += (X.col(1).array() - q.py).square() / (theta.ls_long[1] * theta.ls_long[1]);
            s_long += (X.col(2).array() - q.z).square() / (theta.ls_long[2] * theta.ls_long[2]);
            Eigen::ArrayXd s_short = (X.col(0).array() - q.px).square() /
                                     (theta.ls_short[0] * theta.ls_short[0]);
            s_short += (X.col(1).array() - q.py).square() / (theta.ls_short[1] * theta.ls_short[1]);
            s_short += (X.col(2).array() - q.z).square() / (theta.ls_short[2] * theta.ls_short[2]);
            Kq.col(j) = theta.sigma2_long * (-0.5 * s_long).exp().matrix() +
                        theta.sigma2_short * (-0.5 * s_short).exp().matrix();
        }

        const Eigen::VectorXd mean_chunk = Kq.transpose() * alpha;
        L.triangularView<Eigen::Lower>().solveInPlace(Kq);
        for (Eigen::Index j = 0; j < m; ++j) {
            post.mu[begin + j] = mean_chunk[j] * nrm.std + nrm.mean;
            post.var[begin + j] = std::max(prior_var - Kq.col(j).squaredNorm(), 0.0) * s2;
        }
    }
    return post;
}

Posterior posterior_reference(const Dataset& data, const KernelParams& theta,
                              std::span<const FeatureVec> queries) {
    if (data.empty()) throw std::invalid_argument("posterior: empty dataset");
    const std::size_t n = data.size();
    const TargetNorm nrm = data.norm();

    // Dense Gram + hand-rolled Cholesky, same jitter ladder as the fast path.
    std::vector<double> A(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A[i * n + j] = kernel(theta, data[i].x, data[j].x, false) +
                           (i == j ? theta.sigma2_noise : 0.0);

    std::vector<double> L(n * n, 0.0);
    bool ok = false;
    for (double jitter : {0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4}) {
        ok = true;
        std::fill(L.begin(), L.end(), 0.0);
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = A[i * n + j] + (i == j ? jitter : 0.0);
                for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    L[i * n + i] = std::sqrt(s);
                } else {
                    L[i * n + j] = s / L[j * n + j];
                }
            }
        }
        if (ok) break;
    }
    if (!ok) throw std::runtime_error("kernel matrix not PD");

    // alpha = A^-1 y via forward/back substitution.
    std::vector<double> alpha(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = (data[i].y - nrm.mean) / nrm.std;
        for (std::size_t k = 0; k < i; ++k) s -= L[i * n + k] * alpha[k];
        alpha[i] = s / L[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = alpha[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= L[k * n + ii] * alpha[k];
        alpha[ii] = s / L[ii * n + ii];
    }

    const double prior_var = theta.sigma2_long + theta.sigma2_short;
    const double s2 = nrm.std * nrm.std;
    Posterior post;
    post.mu.resize(queries.size());
    post.var.resize(queries.size());
    post.noise_var = theta.sigma2_noise * s2;

    std::vector<double> kvec(n), v(n);
    for (std::size_t qi = 0; qi < queries.size(); ++qi) {
        double mu = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            kvec[i] = kernel(theta, data[i].x, queries[qi], false);
            mu += kvec[i] * alpha[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = kvec[i];
            for (std::size_t k = 0; k < i; ++k) s -= L[i * n + k] * v[k];
            v[i] = s / L[i * n + i];
        }
        double vv = 0.0;
        for (std::size_t i = 0; i < n; ++i) vv += v[i] * v[i];
        post.mu[qi] = mu * nrm.std + nrm.mean;
        post.var[qi] = std::max(prior_var - vv, 0.0) * s2;
    }
    return post;
}

}  // namespace jamloc
