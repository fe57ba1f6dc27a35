#pragma once

#include <string>

#include "ggbm/params.hpp"

namespace ggbm {

enum class Method {
    TaylorSeries,
    AsymptoticExpansion,
    SpectralIntegral,
    ClosedForm,
};

const char* method_name(Method m);

/// A special-function value with an absolute error estimate and the method
/// that produced it. abs_error_est bounds the truncation + rounding error
/// actually incurred (never NaN, never negative).
struct EvalResult {
    double value;
    double abs_error_est;
    Method method;
};

/// Numerator pairs (a1,b1),(a2,b2) and denominator pairs (c1,d1),(c2,d2) of
/// the Fox-Wright series sum_n Gamma(a1+b1 n)Gamma(a2+b2 n) /
/// (Gamma(c1+d1 n)Gamma(c2+d2 n)) x^n / n!.
struct FoxWrightParams {
    double a1, b1, a2, b2;
    double c1, d1, c2, d2;
};

/// ln Gamma(x) for x > 0. Relative error <= 1e-13 on [1e-3, 1e4]
/// (Lanczos approximation, g = 607/128, 15 coefficients).
double gamma_ln(double x);

/// gamma(a,x) = int_0^x t^(a-1) e^-t dt for a > 0, x >= 0.
/// Power series below x = a+1, continued-fraction complement above.
/// Relative error <= 1e-12 on the tested domain.
double lower_incomplete_gamma(double a, double x);

/// E_{beta,rho}(z) = sum_n z^n / Gamma(beta n + rho) for real z <= 0 and
/// 0 < beta < 2. Method selection: Taylor series (compensated summation)
/// preferred for |z| <= taylor_below, optimally truncated inverse-power
/// expansion preferred for |z| >= asymptotic_above, spectral integral in the
/// middle band (beta < 1). Each route carries an honest error estimate and
/// the evaluator falls through to the next route when the estimate misses
/// the gate abs_error_est <= 1e-8 * max(|value|, 1e-300).
///
/// Throws std::domain_error outside the domain, ConvergenceError when no
/// route meets the gate.
EvalResult mittag_leffler(double beta, double rho, double z);

/// Exact partial sum -sum_{n=1}^{m} z^{-n} / Gamma(rho - beta n) for z < 0,
/// m >= 1. Terms where Gamma has a pole contribute zero.
double mittag_leffler_asymptotic(double beta, double rho, double z, int m);

/// Fox-Wright 2Psi2 series at x <= 0. Terms are built in log space via
/// gamma_ln with sign tracking and summed with compensation. Throws
/// ConvergenceError when alternating-series cancellation leaves fewer than
/// ~2 significant digits, so callers can fall back to quadrature.
EvalResult fox_wright_2psi2(const FoxWrightParams& p, double x);

/// Method switch radii used by mittag_leffler. Mutable only as a diagnostic
/// (the validation CLI corrupts them deliberately to prove the suite notices);
/// set before spawning threads.
struct MlSwitchRadii {
    double taylor_below = 5.0;
    double asymptotic_above = 20.0;
};

MlSwitchRadii& ml_switch_radii();

namespace detail {

/// sin(pi x) with exact zeros at integer x.
double sinpi(double x);

/// ln|1/Gamma(x)| and the sign of 1/Gamma(x) for any real x.
/// sign = 0 marks a pole of Gamma (reciprocal is exactly zero).
struct LogRGamma {
    double ln_abs;
    int sign;
};
LogRGamma rgamma_ln(double x);

/// 1/Gamma(x) for any real x (0 at poles). Overflows to +-inf for very
/// negative x; callers needing large magnitudes work in logs via rgamma_ln.
double rgamma(double x);

/// Compensated (Kahan-Neumaier) accumulator.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;
    double abs_sum = 0.0;

    void add(double term) {
        abs_sum += term < 0 ? -term : term;
        double t = sum + term;
        if ((sum < 0 ? -sum : sum) >= (term < 0 ? -term : term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

/// x^{-a} gamma(a,x) for a > 0, x > 0. Same algorithm split as
/// lower_incomplete_gamma but with the x^a factor cancelled analytically,
/// so it stays finite where x^a alone would overflow or underflow.
double lower_gamma_scaled(double a, double x);

/// The individual Mittag-Leffler routes, exposed so tests can compare
/// methods pairwise across the switch radii. Each returns an EvalResult
/// with an honest error estimate, or throws ConvergenceError when the route
/// is structurally unavailable (overflow, unsupported parameters).
EvalResult ml_taylor(double beta, double rho, double z);
EvalResult ml_asymptotic_auto(double beta, double rho, double z);
EvalResult ml_spectral(double beta, double rho, double z);

} // namespace detail

} // namespace ggbm
