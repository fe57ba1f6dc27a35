#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ggbm/params.hpp"
#include "ggbm/special_functions.hpp"

namespace ggbm {

enum class DebyeFamily { General, GreyBm, FractionalBm, StandardBm, AlphaOne };

const char* debye_family_name(DebyeFamily f);

/// ForceGeneral sends debye_general down the series/quadrature engine even
/// when the parameters match a family with a cheaper closed form, so tests
/// can confirm the specializations agree with the general evaluator.
enum class DebyeRoute { Auto, ForceGeneral };

/// Families with a closed beta -> 0 limit curve.
enum class BetaZeroFamily { GreyBm, AlphaOne };

/// Mean square end-to-end length and radius of gyration for a chain of
/// length n. ratio_expected = (alpha+1)(alpha+2), and r_g_sq is defined as
/// r_e_sq / ratio_expected, so the ratio identity holds by construction.
struct RadiusReport {
    double r_e_sq;
    double r_g_sq;
    double ratio_expected;
    double n;
};

/// A Debye curve sampled on a grid. Built through sample_debye_curve, which
/// validates the cross-field invariants: equal lengths, strictly increasing
/// positive grid, values[0] <= 1 + 1e-12, and monotone decay on the tail
/// (past the first grid point with y >= 3).
struct DebyeCurve {
    DebyeFamily family;
    GgbmParams params;
    std::vector<double> ys;
    std::vector<double> values;
    std::vector<Method> methods;
};

/// f_D(y) = 2 sum_j (-y^2)^j / [Gamma(beta j + 1)(alpha j + 1)(alpha j + 2)]
/// for y >= 0. The Auto route picks the closed form matching the parameter
/// family (beta = 1, alpha = beta, or alpha = 1); otherwise it sums the
/// series for y^2 <= 25 and delegates to debye_quadrature when the
/// alternating series cancels too deeply or y^2 > 25.
EvalResult debye_general(double y, const GgbmParams& params,
                         DebyeRoute route = DebyeRoute::Auto);

/// Grey-Brownian family alpha = beta: f_D(y) = 2 E_{beta,3}(-y^2) for
/// beta in (0,1], y >= 0.
EvalResult debye_gbm(double y, double beta);

/// Fractional-Brownian family beta = 1, evaluated through scaled lower
/// incomplete gammas:
///   f_D(y) = (2/alpha) [ (y^2)^{-1/alpha} igamma(1/alpha, y^2)
///                        - (y^2)^{-2/alpha} igamma(2/alpha, y^2) ]
/// for y > 0, alpha in (0,2). Throws std::domain_error for y <= 0 (the
/// y -> 0 limit is 1; use debye_general on grids containing zero).
EvalResult debye_fbm(double y, double alpha);

/// alpha = 1 family: f_D(y) = 2 sum_j (-y^2)^j / [Gamma(beta j + 1)
/// (j+1)(j+2)] for beta in (0,1], y >= 0; same series/quadrature engine as
/// debye_general.
EvalResult debye_beta1(double y, double beta);

/// Pointwise beta -> 0 limit curves: GreyBm -> 1/(1+y^2); AlphaOne ->
/// (2/y^4)(-y^2 + (1+y^2) ln(1+y^2)) with the y -> 0 limit value 1.
double debye_limit_beta0(double y, BetaZeroFamily family);

/// Form factor of a chain of length n observed at wave vector k in d
/// dimensions; reduces to the Debye function at y^2 = n^alpha |k|^2 / 2.
/// Throws std::domain_error unless k.size() == d >= 1 and n > 0.
EvalResult form_factor(const std::vector<double>& k, int d, double n,
                       const GgbmParams& params);

/// Mean square end-to-end length n^alpha / Gamma(beta + 1), n > 0.
double end_to_end_sq(const GgbmParams& params, double n);

/// r_g_sq = n^alpha / [Gamma(beta+1)(alpha+1)(alpha+2)] together with
/// r_e_sq and their exact ratio.
RadiusReport radius_of_gyration_sq(const GgbmParams& params, double n);

/// Leading tail coefficient c in f_D(y; beta, beta) ~ c y^{-2}:
/// 2 / Gamma(3 - beta) for beta in (0,1].
double asymptote_gbm_coefficient(double beta);

/// Least-squares fit of y^2 f(y) against (1, ln y) over the points with
/// y >= y_min; returns (k1, k2) in y^2 f(y) ~ k1 + k2 ln y. Requires
/// y_min >= 10 and at least 8 grid points past it.
std::pair<double, double> fit_log_asymptote(const std::vector<double>& ys,
                                            const std::vector<double>& values,
                                            double y_min);
std::pair<double, double> fit_log_asymptote(const DebyeCurve& curve,
                                            double y_min);

/// Evaluates the family on the grid and validates the DebyeCurve
/// invariants. params must be consistent with the family (alpha = beta for
/// GreyBm, beta = 1 for FractionalBm, beta = alpha = 1 for StandardBm,
/// alpha = 1 for AlphaOne); the grid must be strictly increasing and > 0.
DebyeCurve sample_debye_curve(DebyeFamily family, const GgbmParams& params,
                              std::vector<double> ys);

/// count >= 2 logarithmically spaced points from lo to hi inclusive;
/// requires 0 < lo < hi.
std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count);

} // namespace ggbm
