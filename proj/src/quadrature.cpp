#include "ggbm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ggbm/detail/gk15.hpp"

namespace ggbm {

namespace {

void check_config(const QuadratureConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
        throw std::domain_error("QuadratureConfig: tolerances must be > 0");
    if (cfg.max_subdivisions < 1)
        throw std::domain_error("QuadratureConfig: max_subdivisions must be >= 1");
    if (cfg.nodes_per_panel != 15)
        throw std::domain_error(
            "QuadratureConfig: only the 15-node Gauss-Kronrod panel is supported");
}

EvalResult run_mesh(const std::function<double(double)>& f,
                    const std::vector<double>& mesh, const QuadratureConfig& cfg) {
    const auto r = detail::integrate_adaptive_mesh(f, mesh, cfg.rel_tol,
                                                   cfg.abs_tol, cfg.max_subdivisions);
    if (!r.converged)
        throw ConvergenceError("integrate_adaptive: tolerance not met after " +
                               std::to_string(r.panels) + " panels");
    return {r.value, r.abs_error, Method::SpectralIntegral};
}

// levels of geometric grading so the innermost panel resolves the scale
// where y^2 tau^alpha becomes O(1)
int grading_levels(double y, double alpha) {
    const double decades = 4.0 + (2.0 / alpha) * std::log10(std::max(y, 1.0));
    const int levels = static_cast<int>(std::ceil(decades / std::log10(4.0)));
    return std::clamp(levels, 8, 40);
}

} // namespace

EvalResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const QuadratureConfig& cfg) {
    check_config(cfg);
    if (!(a < b))
        throw std::domain_error("integrate_adaptive: requires a < b");
    return run_mesh(f, {a, b}, cfg);
}

EvalResult debye_quadrature(double y, const GgbmParams& params,
                            const QuadratureConfig& cfg) {
    check_config(cfg);
    if (!(y >= 0.0))
        throw std::domain_error("debye_quadrature: requires y >= 0");
    const double y2 = y * y;
    const double beta = params.beta;
    const double alpha = params.alpha;

    double max_inner_rel = 0.0;
    const auto integrand = [&](double tau) {
        const double arg = -y2 * std::pow(tau, alpha);
        const EvalResult ml = mittag_leffler(beta, 1.0, arg);
        max_inner_rel =
            std::max(max_inner_rel, ml.abs_error_est /
                                        std::max(std::abs(ml.value), 1e-300));
        return (1.0 - tau) * ml.value;
    };

    const auto mesh =
        detail::graded_mesh_toward_start(0.0, 1.0, 0.25, grading_levels(y, alpha));
    const EvalResult r = run_mesh(integrand, mesh, cfg);
    const double value = 2.0 * r.value;
    const double err = 2.0 * (r.abs_error_est + max_inner_rel * std::abs(r.value));
    return {value, err, Method::SpectralIntegral};
}

namespace {

// Gauss-Legendre nodes (ascending) and weights on [-1, 1] by Newton
// iteration on the Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = std::acos(-1.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double xi = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double dx = p1 / pp;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        x[i] = -xi;
        x[n - 1 - i] = xi;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - xi * xi) * pp * pp);
    }
}

} // namespace

double debye_double_integral(double y, const GgbmParams& params, int grid_n) {
    if (grid_n < 16)
        throw std::domain_error("debye_double_integral: requires grid_n >= 16");
    if (!(y >= 0.0))
        throw std::domain_error("debye_double_integral: requires y >= 0");

    // Composite 1-D rule: uniform panels of ~8 Gauss-Legendre nodes each,
    // exactly grid_n nodes total. The integrand has a |t-s|^alpha kink on
    // the diagonal; panelizing confines the slow-converging cells to the
    // diagonal strip instead of polluting the whole square.
    const int n = grid_n;
    const int panels = std::max(1, n / 8);
    std::vector<double> t, w;
    t.reserve(n);
    w.reserve(n);
    std::vector<double> gx, gw;
    for (int p = 0; p < panels; ++p) {
        // distribute n nodes as evenly as possible
        const int q = (n * (p + 1)) / panels - (n * p) / panels;
        if (q == 0) continue;
        gauss_legendre(q, gx, gw);
        const double a = static_cast<double>(p) / panels;
        const double b = static_cast<double>(p + 1) / panels;
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < q; ++i) {
            t.push_back(c + h * gx[i]);
            w.push_back(h * gw[i]);
        }
    }

    const double y2 = y * y;
    const double beta = params.beta;
    const double alpha = params.alpha;
    detail::KahanSum acc;
    for (int i = 0; i < n; ++i) {
        acc.add(w[i] * w[i]);  // diagonal: E(0) = 1
        for (int j = i + 1; j < n; ++j) {
            const double arg = -y2 * std::pow(t[j] - t[i], alpha);
            acc.add(2.0 * w[i] * w[j] * mittag_leffler(beta, 1.0, arg).value);
        }
    }
    return acc.value();
}

std::pair<double, double> verify_euler_transform(double beta, double alpha_p,
                                                 double sigma, double x,
                                                 const QuadratureConfig& cfg) {
    check_config(cfg);
    if (!(alpha_p > 0.0) || !(sigma > 0.0))
        throw std::domain_error("verify_euler_transform: requires alpha_p > 0, sigma > 0");
    if (!(x <= 0.0))
        throw std::domain_error("verify_euler_transform: requires x <= 0");

    const auto core = [&](double t) {
        return mittag_leffler(beta, alpha_p, x * std::pow(t, beta)).value;
    };

    // left half [0, 1/2]: weight t^{alpha_p - 1}
    double lhs = 0.0;
    {
        const auto g = [&](double t) {
            return std::pow(1.0 - t, sigma - 1.0) * core(t);
        };
        EvalResult part{0.0, 0.0, Method::SpectralIntegral};
        if (alpha_p < 1.0) {
            // u = t^{alpha_p} removes the endpoint singularity exactly
            const double ucut = std::pow(0.5, alpha_p);
            const auto f = [&](double u) {
                return g(std::pow(u, 1.0 / alpha_p)) / alpha_p;
            };
            part = run_mesh(f, detail::graded_mesh_toward_start(0.0, ucut, 0.25, 12),
                            cfg);
        } else {
            const auto f = [&](double t) {
                return std::pow(t, alpha_p - 1.0) * g(t);
            };
            part = run_mesh(f, detail::graded_mesh_toward_start(0.0, 0.5, 0.25, 12),
                            cfg);
        }
        lhs += part.value;
    }
    // right half [1/2, 1]: weight (1-t)^{sigma - 1}
    {
        const auto h = [&](double t) {
            return std::pow(t, alpha_p - 1.0) * core(t);
        };
        EvalResult part{0.0, 0.0, Method::SpectralIntegral};
        if (sigma < 1.0) {
            // v = (1-t)^{sigma}
            const double vcut = std::pow(0.5, sigma);
            const auto f = [&](double v) {
                return h(1.0 - std::pow(v, 1.0 / sigma)) / sigma;
            };
            part = run_mesh(f, detail::graded_mesh_toward_start(0.0, vcut, 0.25, 12),
                            cfg);
        } else {
            const auto f = [&](double t) {
                return std::pow(1.0 - t, sigma - 1.0) * h(t);
            };
            part = run_mesh(f, detail::graded_mesh_toward_end(0.5, 1.0, 0.25, 12),
                            cfg);
        }
        lhs += part.value;
    }

    const double rhs =
        std::exp(gamma_ln(sigma)) * mittag_leffler(beta, alpha_p + sigma, x).value;
    return {lhs, rhs};
}

} // namespace ggbm
