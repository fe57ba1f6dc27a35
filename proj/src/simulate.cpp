#include "ggbm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <utility>

#include "ggbm/detail/fft.hpp"

namespace ggbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// gamma(j) = E[X_0 X_j] for fractional Gaussian noise on step dt,
/// j = 0..n_lags-1; gamma(0) = dt^{2H}.
std::vector<double> fgn_autocovariance(double hurst, int n_lags, double dt) {
    const double two_h = 2.0 * hurst;
    const double scale = std::pow(dt, two_h);
    std::vector<double> g(static_cast<std::size_t>(n_lags));
    for (int j = 0; j < n_lags; ++j) {
        const double hi = std::pow(static_cast<double>(j + 1), two_h);
        const double mid = j == 0 ? 0.0 : std::pow(static_cast<double>(j), two_h);
        const double lo = j <= 1 ? static_cast<double>(1 - j)
                                 : std::pow(static_cast<double>(j - 1), two_h);
        g[j] = 0.5 * scale * (hi - 2.0 * mid + lo);
    }
    return g;
}

std::size_t next_pow2(std::size_t x) {
    std::size_t m = 1;
    while (m < x) m <<= 1;
    return m;
}

/// Slot amplitudes for the circulant embedding of size m = 2*(result size - 1):
/// result[k] scales the k-th spectral slot so that the synthesized sequence
/// has the exact Toeplitz covariance. Empty result means the embedding has a
/// genuinely negative eigenvalue and the caller must fall back.
std::vector<double> embedding_amplitudes(double hurst, int n_steps, double dt) {
    const std::size_t m = next_pow2(2 * static_cast<std::size_t>(n_steps));
    const std::vector<double> gamma =
        fgn_autocovariance(hurst, static_cast<int>(m / 2) + 1, dt);
    std::vector<std::complex<double>> ring(m);
    for (std::size_t j = 0; j < m; ++j) ring[j] = gamma[std::min(j, m - j)];
    detail::fft_radix2(ring);

    double lam_max = 0.0;
    for (const auto& v : ring) lam_max = std::max(lam_max, v.real());
    std::vector<double> amp(m / 2 + 1);
    const double md = static_cast<double>(m);
    for (std::size_t k = 0; k <= m / 2; ++k) {
        double lam = ring[k].real();
        if (lam < -1e-10 * lam_max) return {};
        lam = std::max(lam, 0.0);
        // ends are real slots with full variance lam/m; interior slots split
        // lam/m between the real and imaginary normal
        const double var = (k == 0 || k == m / 2) ? lam / md : lam / (2.0 * md);
        amp[k] = std::sqrt(var);
    }
    return amp;
}

/// Lower Cholesky factor of the Toeplitz covariance gamma(|i-j|), row-major.
/// One retry with a tiny diagonal jitter absorbs borderline rounding.
std::vector<double> cholesky_lower(const std::vector<double>& gamma) {
    const int n = static_cast<int>(gamma.size());
    std::vector<double> l(static_cast<std::size_t>(n) * n);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const double jitter = attempt == 0 ? 0.0 : 1e-12 * gamma[0];
        std::fill(l.begin(), l.end(), 0.0);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = gamma[static_cast<std::size_t>(i - j)];
                if (i == j) s += jitter;
                const double* ri = l.data() + static_cast<std::size_t>(i) * n;
                const double* rj = l.data() + static_cast<std::size_t>(j) * n;
                for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
                if (i == j) {
                    if (!(s > 0.0)) {
                        ok = false;
                        break;
                    }
                    l[static_cast<std::size_t>(i) * n + j] = std::sqrt(s);
                } else {
                    l[static_cast<std::size_t>(i) * n + j] =
                        s / l[static_cast<std::size_t>(j) * n + j];
                }
            }
        }
        if (ok) return l;
    }
    throw ConvergenceError("FgnSampler: covariance is not positive definite");
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

void check_ensemble(const PathEnsemble& ens) {
    ens.config.validate();
    const std::size_t expect = static_cast<std::size_t>(ens.config.n_paths) *
                               static_cast<std::size_t>(ens.config.d) *
                               ens.n_points();
    require(ens.data.size() == expect,
            "PathEnsemble: data size does not match config");
}

void check_time_index(const PathEnsemble& ens, int t_idx) {
    require(t_idx >= 0 && t_idx <= ens.config.n_steps,
            "PathEnsemble: time index out of range");
}

/// Mean / standard error of a per-path statistic, single Welford pass.
template <typename PerPath>
McEstimate reduce_paths(std::int64_t n_paths, PerPath&& stat) {
    double mean = 0.0;
    double m2 = 0.0;
    for (std::int64_t p = 0; p < n_paths; ++p) {
        const double x = stat(p);
        const double delta = x - mean;
        mean += delta / static_cast<double>(p + 1);
        m2 += delta * (x - mean);
    }
    const double n = static_cast<double>(n_paths);
    const double se = n_paths > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
    return {mean, se, n_paths};
}

} // namespace

void SimConfig::validate() const {
    params.validate();
    if (d < 1) throw std::domain_error("SimConfig: d must be >= 1");
    if (n_steps < 2) throw std::domain_error("SimConfig: n_steps must be >= 2");
    if (!(horizon > 0.0)) throw std::domain_error("SimConfig: horizon must be > 0");
    if (n_paths < 1) throw std::domain_error("SimConfig: n_paths must be >= 1");
}

const char* fgn_method_name(FgnMethod m) {
    switch (m) {
        case FgnMethod::IidGaussian: return "iid_gaussian";
        case FgnMethod::CirculantEmbedding: return "circulant_embedding";
        case FgnMethod::CholeskyFactor: return "cholesky";
    }
    return "unknown";
}

FgnSampler::FgnSampler(double hurst, int n_steps, double dt, bool allow_spectral)
    : n_(n_steps), hurst_(hurst), dt_(dt), method_(FgnMethod::IidGaussian) {
    if (!(hurst > 0.0) || !(hurst < 1.0))
        throw std::domain_error("FgnSampler: hurst must be in (0, 1)");
    if (n_steps < 1)
        throw std::domain_error("FgnSampler: n_steps must be >= 1");
    if (!(dt > 0.0))
        throw std::domain_error("FgnSampler: dt must be > 0");
    if (hurst == 0.5) return;

    if (allow_spectral) {
        sqrt_lambda_ = embedding_amplitudes(hurst, n_steps, dt);
        if (!sqrt_lambda_.empty()) {
            m_ = 2 * (sqrt_lambda_.size() - 1);
            method_ = FgnMethod::CirculantEmbedding;
            return;
        }
    }
    if (n_steps > 4096)
        throw std::domain_error(
            "FgnSampler: exact Cholesky factor limited to n_steps <= 4096");
    chol_ = cholesky_lower(fgn_autocovariance(hurst, n_steps, dt));
    method_ = FgnMethod::CholeskyFactor;
}

void FgnSampler::sample(PathRng& rng, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(n_));
    switch (method_) {
        case FgnMethod::IidGaussian: {
            const double sd = std::pow(dt_, hurst_);
            for (double& x : out) x = sd * rng.normal();
            return;
        }
        case FgnMethod::CirculantEmbedding: {
            // fixed draw order: slot 0, slot m/2, then (re, im) pairs
            std::vector<std::complex<double>> v(m_);
            v[0] = sqrt_lambda_[0] * rng.normal();
            v[m_ / 2] = sqrt_lambda_[m_ / 2] * rng.normal();
            for (std::size_t k = 1; k < m_ / 2; ++k) {
                const double re = rng.normal();
                const double im = rng.normal();
                v[k] = sqrt_lambda_[k] * std::complex<double>(re, im);
                v[m_ - k] = std::conj(v[k]);
            }
            detail::fft_radix2(v);
            for (int i = 0; i < n_; ++i)
                out[static_cast<std::size_t>(i)] =
                    v[static_cast<std::size_t>(i)].real();
            return;
        }
        case FgnMethod::CholeskyFactor: {
            std::vector<double> g(static_cast<std::size_t>(n_));
            for (double& x : g) x = rng.normal();
            for (int i = 0; i < n_; ++i) {
                const double* row =
                    chol_.data() + static_cast<std::size_t>(i) * n_;
                double acc = 0.0;
                for (int k = 0; k <= i; ++k)
                    acc += row[k] * g[static_cast<std::size_t>(k)];
                out[static_cast<std::size_t>(i)] = acc;
            }
            return;
        }
    }
}

std::vector<double> sample_fbm_increments(double hurst, int n_steps, double dt,
                                          PathRng& rng) {
    const FgnSampler sampler(hurst, n_steps, dt);
    std::vector<double> out;
    sampler.sample(rng, out);
    return out;
}

double sample_subordinator(double beta, PathRng& rng) {
    if (!(beta > 0.0) || !(beta <= 1.0))
        throw std::domain_error("sample_subordinator: beta must be in (0, 1]");
    if (beta == 1.0) return 1.0;
    // Kanter: S = (A(theta)/E)^{(1-beta)/beta} is beta-stable with transform
    // e^{-s^beta}; Y = S^{-beta}. Assembled in logs so neither the sine
    // powers nor the final exponent can overflow (|log_y| stays below ~150).
    const double theta = kPi * rng.uniform01();
    const double e = rng.exponential();
    const double log_y = (1.0 - beta) * std::log(e) -
                         beta * std::log(std::sin(beta * theta)) -
                         (1.0 - beta) * std::log(std::sin((1.0 - beta) * theta)) +
                         std::log(std::sin(theta));
    return std::exp(log_y);
}

int worker_count(std::int64_t n_paths) {
    int w = 0;
    if (const char* env = std::getenv("GGBM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        w = (end != env && v >= 1) ? static_cast<int>(std::min<long>(v, 1024)) : 1;
    }
    if (w == 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        w = hc == 0 ? 1 : static_cast<int>(hc);
    }
    if (static_cast<std::int64_t>(w) > n_paths) w = static_cast<int>(n_paths);
    return std::max(w, 1);
}

PathEnsemble sample_paths(const SimConfig& config) {
    config.validate();
    const int n = config.n_steps;
    const int d = config.d;
    const double dt = config.horizon / n;
    const FgnSampler sampler(config.params.hurst(), n, dt);

    PathEnsemble ens;
    ens.config = config;
    ens.data.resize(static_cast<std::size_t>(config.n_paths) * d *
                    (static_cast<std::size_t>(n) + 1));

    auto run_range = [&](std::int64_t lo, std::int64_t hi) {
        std::vector<double> incr;
        for (std::int64_t p = lo; p < hi; ++p) {
            // path p consumes exactly stream p: subordinator first, then the
            // d components in order, so the layout is thread-count invariant
            PathRng rng(config.seed, static_cast<std::uint64_t>(p));
            const double sqrt_y =
                std::sqrt(sample_subordinator(config.params.beta, rng));
            for (int j = 0; j < d; ++j) {
                sampler.sample(rng, incr);
                double* out = ens.data.data() +
                              (static_cast<std::size_t>(p) * d + j) *
                                  (static_cast<std::size_t>(n) + 1);
                out[0] = 0.0;
                double acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    acc += incr[static_cast<std::size_t>(i)];
                    out[i + 1] = sqrt_y * acc;
                }
            }
        }
    };

    const int workers = worker_count(config.n_paths);
    if (workers == 1) {
        run_range(0, config.n_paths);
        return ens;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = config.n_paths * w / workers;
        const std::int64_t hi = config.n_paths * (w + 1) / workers;
        pool.emplace_back([&, lo, hi, w] {
            try {
                run_range(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return ens;
}

McEstimate estimate_covariance(const PathEnsemble& ens, int t_idx, int s_idx) {
    check_ensemble(ens);
    check_time_index(ens, t_idx);
    check_time_index(ens, s_idx);
    const int d = ens.config.d;
    return reduce_paths(ens.config.n_paths, [&](std::int64_t p) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += ens.at(p, j, t_idx) * ens.at(p, j, s_idx);
        return acc / d;
    });
}

McEstimate estimate_even_moment(const PathEnsemble& ens, int t_idx,
                                int order_2n) {
    check_ensemble(ens);
    check_time_index(ens, t_idx);
    require(order_2n >= 2 && order_2n % 2 == 0,
            "estimate_even_moment: order must be even and >= 2");
    const int d = ens.config.d;
    return reduce_paths(ens.config.n_paths, [&](std::int64_t p) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j)
            acc += std::pow(ens.at(p, j, t_idx), order_2n);
        return acc / d;
    });
}

McEstimate estimate_odd_moment(const PathEnsemble& ens, int t_idx, int order) {
    check_ensemble(ens);
    check_time_index(ens, t_idx);
    require(order >= 1 && order % 2 == 1,
            "estimate_odd_moment: order must be odd and >= 1");
    const int d = ens.config.d;
    return reduce_paths(ens.config.n_paths, [&](std::int64_t p) {
        double acc = 0.0;
        for (int j = 0; j < d; ++j) acc += std::pow(ens.at(p, j, t_idx), order);
        return acc / d;
    });
}

McEstimate estimate_char_fn(const PathEnsemble& ens,
                            const std::vector<double>& k, int t_idx) {
    check_ensemble(ens);
    check_time_index(ens, t_idx);
    const int d = ens.config.d;
    require(static_cast<int>(k.size()) == d,
            "estimate_char_fn: k must have d components");
    return reduce_paths(ens.config.n_paths, [&](std::int64_t p) {
        double phase = 0.0;
        for (int j = 0; j < d; ++j) phase += k[static_cast<std::size_t>(j)] *
                                             ens.at(p, j, t_idx);
        return std::cos(phase);
    });
}

McEstimate mc_form_factor(const PathEnsemble& ens,
                          const std::vector<double>& k) {
    check_ensemble(ens);
    const int d = ens.config.d;
    require(static_cast<int>(k.size()) == d,
            "mc_form_factor: k must have d components");
    const std::size_t npts = ens.n_points();
    const double w_mid = 1.0 / static_cast<double>(ens.config.n_steps);
    return reduce_paths(ens.config.n_paths, [&](std::int64_t p) {
        // |sum_i w_i e^{i k.X(t_i)}|^2 expands to the double sum over cosines
        // of phase differences; the sine cross terms cancel by antisymmetry
        double sum_cos = 0.0;
        double sum_sin = 0.0;
        for (std::size_t i = 0; i < npts; ++i) {
            double phase = 0.0;
            for (int j = 0; j < d; ++j)
                phase += k[static_cast<std::size_t>(j)] *
                         ens.path_component(p, j)[i];
            const double w = (i == 0 || i + 1 == npts) ? 0.5 * w_mid : w_mid;
            sum_cos += w * std::cos(phase);
            sum_sin += w * std::sin(phase);
        }
        return sum_cos * sum_cos + sum_sin * sum_sin;
    });
}

} // namespace ggbm
