#pragma once

#include <functional>
#include <utility>

#include "ggbm/params.hpp"
#include "ggbm/special_functions.hpp"

namespace ggbm {

/// Controls for the adaptive integrators. nodes_per_panel is fixed at 15
/// (the embedded 7-15 Gauss-Kronrod pair); any other value is rejected so a
/// config typo cannot silently change the rule.
struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_subdivisions = 200;
    int nodes_per_panel = 15;
};

/// Integrates f over [a, b] by adaptive Gauss-Kronrod panels (worst panel
/// bisected first). On success abs_error_est <= max(abs_tol, rel_tol*|value|).
/// Throws std::domain_error on invalid config or a >= b, ConvergenceError if
/// the tolerance is still unmet after cfg.max_subdivisions panels.
EvalResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const QuadratureConfig& cfg = {});

/// Independent oracle for the Debye function: 2 int_0^1 (1-tau) E_beta(-y^2
/// tau^alpha) dtau, evaluated over the rho = 1 Mittag-Leffler evaluator only
/// (deliberately avoiding the series fast path it is meant to check). For
/// alpha < 1 the initial mesh is geometrically graded toward tau = 0 where
/// tau^alpha has unbounded derivative.
EvalResult debye_quadrature(double y, const GgbmParams& params,
                            const QuadratureConfig& cfg = {});

/// Brute-force second-tier oracle: tensor-product Gauss-Legendre cubature of
/// int_0^1 int_0^1 E_beta(-y^2 |t-s|^alpha) dt ds on grid_n x grid_n nodes.
/// No error control: the caller compares results across grid sizes.
double debye_double_integral(double y, const GgbmParams& params, int grid_n);

/// Evaluates both sides of the Euler integral transform
///   int_0^1 t^{a_p-1} (1-t)^{sigma-1} E_{beta,a_p}(x t^beta) dt
///     = Gamma(sigma) E_{beta,a_p+sigma}(x)
/// by independent means (adaptive quadrature vs direct evaluation) and
/// returns {lhs, rhs} for the caller to assert against. Endpoint-singular
/// weights (alpha_p < 1 or sigma < 1) are removed by power substitutions.
std::pair<double, double> verify_euler_transform(double beta, double alpha_p,
                                                 double sigma, double x,
                                                 const QuadratureConfig& cfg = {});

} // namespace ggbm
