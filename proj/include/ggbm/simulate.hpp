#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ggbm/params.hpp"
#include "ggbm/rng.hpp"

namespace ggbm {

/// Monte Carlo run description. The time grid is uniform,
/// t_i = i * horizon / n_steps for i = 0..n_steps.
struct SimConfig {
    GgbmParams params{0.5, 1.0};
    int d = 1;
    int n_steps = 2;
    double horizon = 1.0;
    std::int64_t n_paths = 1;
    std::uint64_t seed = 0;

    /// Throws std::domain_error unless d >= 1, n_steps >= 2, horizon > 0,
    /// n_paths >= 1 (params validate themselves on construction).
    void validate() const;
};

/// Sampled paths, row-major [path][component][time] with n_steps + 1 time
/// points per component. Every path starts at the origin and all entries
/// are finite.
struct PathEnsemble {
    SimConfig config;
    std::vector<double> data;

    std::size_t n_points() const {
        return static_cast<std::size_t>(config.n_steps) + 1;
    }
    const double* path_component(std::int64_t path, int component) const {
        return data.data() +
               (static_cast<std::size_t>(path) * config.d + component) *
                   n_points();
    }
    double at(std::int64_t path, int component, int t_idx) const {
        return path_component(path, component)[t_idx];
    }
};

/// A Monte Carlo estimate: sample mean, its standard error (sample standard
/// deviation / sqrt(n_samples)), and the sample count. Samples are per-path
/// statistics (components of one path share a subordinator, so they are
/// averaged within the path, never counted as independent).
struct McEstimate {
    double value;
    double std_error;
    std::int64_t n_samples;
};

enum class FgnMethod { IidGaussian, CirculantEmbedding, CholeskyFactor };

const char* fgn_method_name(FgnMethod m);

/// Draws stationary fractional Gaussian noise X_0..X_{n_steps-1} whose
/// cumulative sums W satisfy E[W(t_i) W(t_j)] =
/// (t_i^{2H} + t_j^{2H} - |t_i - t_j|^{2H}) / 2 on the grid t_i = i dt.
///
/// Hurst 1/2 uses independent Gaussians directly. Otherwise the sampler
/// embeds the autocovariance in a circulant of size next-power-of-two
/// >= 2 n_steps and synthesizes through one FFT; if the embedding has a
/// negative eigenvalue it falls back to a Cholesky factor of the exact
/// covariance (n_steps <= 4096 there, diagonal jittered by 1e-12 once if
/// rounding makes it non-definite).
class FgnSampler {
public:
    /// allow_spectral = false forces the Cholesky route (used by tests to
    /// exercise the fallback; the law is identical).
    FgnSampler(double hurst, int n_steps, double dt, bool allow_spectral = true);

    /// Fills out[0..n_steps) with one realization. Thread-safe for
    /// concurrent calls on distinct rng/out.
    void sample(PathRng& rng, std::vector<double>& out) const;

    FgnMethod method() const { return method_; }
    int n_steps() const { return n_; }
    double hurst() const { return hurst_; }

private:
    int n_;
    double hurst_, dt_;
    FgnMethod method_;
    std::vector<double> sqrt_lambda_;  // circulant eigenvalue roots, size m_
    std::size_t m_ = 0;                // embedding size
    std::vector<double> chol_;         // lower triangle, row-major n_ x n_
};

/// One fractional-Gaussian-noise realization (convenience wrapper that
/// builds a sampler per call; batch users should hold an FgnSampler).
std::vector<double> sample_fbm_increments(double hurst, int n_steps, double dt,
                                          PathRng& rng);

/// A draw of Y > 0 with Laplace transform E[e^{-sY}] = E_beta(-s):
/// Y = S^{-beta} for a one-sided beta-stable S with transform e^{-s^beta},
/// via Kanter's trigonometric construction; beta = 1 returns the constant 1.
double sample_subordinator(double beta, PathRng& rng);

/// Samples the ensemble: path p is sqrt(Y_p) * (W_1,...,W_d) where Y_p is
/// one subordinator draw shared by all d components and the W_j are
/// independent fractional Brownian components with Var W_j(t) = t^alpha.
/// Path p consumes only stream p, so the result is byte-identical for any
/// worker count (GGBM_THREADS caps the workers).
PathEnsemble sample_paths(const SimConfig& config);

/// Per-component sample covariance E[B_1(t) B_1(s)] at grid indices
/// (t_idx, s_idx); target (t^alpha + s^alpha - |t-s|^alpha)/(2 Gamma(beta+1)).
McEstimate estimate_covariance(const PathEnsemble& ens, int t_idx, int s_idx);

/// Per-component moment E[B_1(t)^order] at t_idx; order_2n must be even and
/// >= 2; target (2n)! / (2^n Gamma(beta n + 1)) * t^{alpha n}.
McEstimate estimate_even_moment(const PathEnsemble& ens, int t_idx,
                                int order_2n);

/// Per-component odd moment at t_idx (order odd, >= 1); vanishes in law.
McEstimate estimate_odd_moment(const PathEnsemble& ens, int t_idx, int order);

/// Empirical characteristic function Re E[e^{i (k, B(t))}] at t_idx; the
/// law says it equals E_beta(-|k|^2 t^alpha / 2) and depends on k only
/// through |k|.
McEstimate estimate_char_fn(const PathEnsemble& ens,
                            const std::vector<double>& k, int t_idx);

/// Trapezoidal estimate of the form factor
/// (1/n^2) int int E[e^{i (k, X(t)-X(s))}] dt ds: per path
/// |sum_i w_i e^{i k . X(t_i)}|^2 with normalized trapezoid weights w_i
/// (the double sum of the sine part cancels identically by antisymmetry,
/// so the cosine form is exact). k must have d components.
McEstimate mc_form_factor(const PathEnsemble& ens,
                          const std::vector<double>& k);

/// Worker count used by sample_paths: GGBM_THREADS when set (>= 1), else
/// hardware concurrency, clamped to [1, n_paths].
int worker_count(std::int64_t n_paths);

} // namespace ggbm
