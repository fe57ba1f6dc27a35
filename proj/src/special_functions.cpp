#include "ggbm/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ggbm/detail/gk15.hpp"

namespace ggbm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kGateRel = 1e-8;   // accuracy gate of mittag_leffler
// inner evaluations nested inside the Euler-reduction integral are gated
// tighter so the propagated estimate still clears the public gate
constexpr double kInnerGateRel = 3e-9;
// absolute acceptance floor: near a zero of E (possible for rho < 1) no
// finite relative target exists, but integrand-style callers only need
// absolute accuracy, which the estimate still reports honestly
constexpr double kGateAbs = 1e-13;
constexpr double kSpectralRelTol = 3e-10;
constexpr double kValueFloor = 1e-300;
constexpr double kLnPi = 1.1447298858494001741;
constexpr double kPi = 3.14159265358979323846;

double gate_for(double value, double gate_rel) {
    return gate_rel * std::max(std::abs(value), kValueFloor);
}

} // namespace

const char* method_name(Method m) {
    switch (m) {
        case Method::TaylorSeries: return "TaylorSeries";
        case Method::AsymptoticExpansion: return "AsymptoticExpansion";
        case Method::SpectralIntegral: return "SpectralIntegral";
        case Method::ClosedForm: return "ClosedForm";
    }
    return "Unknown";
}

MlSwitchRadii& ml_switch_radii() {
    static MlSwitchRadii radii;
    return radii;
}

// ---------------------------------------------------------------------------
// gamma family
// ---------------------------------------------------------------------------

double gamma_ln(double x) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_ln: requires x > 0, got " + std::to_string(x));
    // Lanczos approximation, g = 607/128 (Godfrey coefficient set).
    static constexpr double kG = 4.7421875;
    static constexpr double kC[15] = {
        0.99999999999999709182,     57.156235665862923517,
        -59.597960355475491248,     14.136097974741747174,
        -0.49191381609762019978,    0.33994649984811888699e-4,
        0.46523628927048575665e-4,  -0.98374475304879564677e-4,
        0.15808870322491248884e-3,  -0.21026444172410488319e-3,
        0.21743961811521264320e-3,  -0.16431810653676389022e-3,
        0.84418223983852743293e-4,  -0.26190838401581408670e-4,
        0.36899182659531622704e-5,
    };
    if (x < 0.5) return gamma_ln(x + 1.0) - std::log(x);
    double acc = kC[0];
    for (int k = 1; k < 15; ++k) acc += kC[k] / (x - 1.0 + k);
    const double t = x + kG - 0.5;
    return 0.5 * std::log(2.0 * kPi) + (x - 0.5) * std::log(t) - t + std::log(acc);
}

namespace {

// positive-term factor S in gamma(a,x) = S x^a e^{-x}, for x < a + 1
double lower_gamma_series_factor(double a, double x) {
    double ap = a, del = 1.0 / a, sum = del;
    for (int n = 0; n < 10000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) return sum;
    }
    throw ConvergenceError("lower_incomplete_gamma: series failed to converge");
}

// regularized complement Q(a,x) = Gamma(a,x)/Gamma(a) by Lentz continued
// fraction, for x >= a + 1
double upper_gamma_q(double a, double x) {
    constexpr double kTiny = 1e-30;
    double b = x + 1.0 - a, c = 1.0 / kTiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 10000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return std::exp(-x + a * std::log(x) - gamma_ln(a)) * h;
    }
    throw ConvergenceError("lower_incomplete_gamma: continued fraction failed");
}

} // namespace

double lower_incomplete_gamma(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw std::domain_error("lower_incomplete_gamma: requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // gamma(a,x) = x^a e^{-x} sum_n x^n / (a (a+1) ... (a+n)),
        // algebraically equal to the alternating small-x series but with
        // positive terms only (no cancellation for large a)
        return lower_gamma_series_factor(a, x) * std::exp(-x + a * std::log(x));
    }
    return std::exp(gamma_ln(a)) * (1.0 - upper_gamma_q(a, x));
}

namespace detail {

double lower_gamma_scaled(double a, double x) {
    if (!(a > 0.0) || !(x > 0.0))
        throw std::domain_error("lower_gamma_scaled: requires a > 0, x > 0");
    if (x < a + 1.0) return lower_gamma_series_factor(a, x) * std::exp(-x);
    return std::exp(gamma_ln(a) - a * std::log(x)) * (1.0 - upper_gamma_q(a, x));
}

double sinpi(double x) {
    double r = std::fmod(x, 2.0);  // r in (-2, 2), exact
    if (r > 1.0)
        r -= 2.0;
    else if (r < -1.0)
        r += 2.0;
    if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
    if (r > 0.5)
        r = 1.0 - r;
    else if (r < -0.5)
        r = -1.0 - r;
    return std::sin(kPi * r);
}

LogRGamma rgamma_ln(double x) {
    if (x > 0.0) return {-gamma_ln(x), 1};
    // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
    const double s = sinpi(x);
    if (s == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {std::log(std::abs(s)) + gamma_ln(1.0 - x) - kLnPi, s > 0.0 ? 1 : -1};
}

double rgamma(double x) {
    const LogRGamma lr = rgamma_ln(x);
    if (lr.sign == 0) return 0.0;
    return lr.sign * std::exp(lr.ln_abs);
}

// ---------------------------------------------------------------------------
// Mittag-Leffler routes
// ---------------------------------------------------------------------------

EvalResult ml_taylor(double beta, double rho, double z) {
    const double x = -z;
    const double ln_x = x > 0.0 ? std::log(x) : -746.0;
    KahanSum ks;
    double last_abs = 0.0;
    double max_ln = 0.0;  // terms come from exp(ln_t): rel error ~ |ln_t| eps
    bool past_peak = false;
    constexpr int kMaxTerms = 4000;
    for (int n = 0; n < kMaxTerms; ++n) {
        const LogRGamma lr = rgamma_ln(beta * n + rho);
        if (lr.sign == 0) continue;
        const double ln_t = n * ln_x + lr.ln_abs;
        // once cancellation exceeds ~16 decades no digits can survive
        if (ln_t > 40.0)
            throw ConvergenceError("ml_taylor: series peak too large for doubles");
        const double t = ((n & 1) ? -lr.sign : lr.sign) * std::exp(ln_t);
        ks.add(t);
        max_ln = std::max(max_ln, std::abs(ln_t));
        const double abs_t = std::abs(t);
        if (n > 0 && abs_t < last_abs) past_peak = true;
        last_abs = abs_t;
        if ((past_peak || x <= 1.0) && n >= 4 &&
            abs_t < 1e-4 * kEps * std::max(std::abs(ks.value()), kValueFloor)) {
            const double value = ks.value();
            const double err = (6.0 + max_ln) * kEps * ks.abs_sum + abs_t;
            return {value, err, Method::TaylorSeries};
        }
    }
    throw ConvergenceError("ml_taylor: series did not converge within term budget");
}

EvalResult ml_asymptotic_auto(double beta, double rho, double z) {
    const double x = -z;
    if (!(x > 1.0))
        throw ConvergenceError("ml_asymptotic_auto: needs |z| > 1");
    const double ln_x = std::log(x);
    constexpr int kMaxM = 50;
    // choose m minimizing the magnitude of the first omitted (nonzero) term
    int best_m = 0;
    double best_ln = std::numeric_limits<double>::infinity();
    double ln_first_omitted = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= kMaxM + 1; ++n) {
        const LogRGamma lr = rgamma_ln(rho - beta * n);
        if (lr.sign == 0) continue;
        const double ln_t = -n * ln_x + lr.ln_abs;
        if (ln_t < best_ln) {
            best_ln = ln_t;
            best_m = n - 1;
        }
    }
    if (best_m < 1) {
        best_m = 1;
        best_ln = -746.0;
    }
    ln_first_omitted = best_ln;

    KahanSum ks;
    double max_ln = 0.0;
    for (int n = 1; n <= best_m; ++n) {
        const LogRGamma lr = rgamma_ln(rho - beta * n);
        if (lr.sign == 0) continue;
        const double ln_t = -n * ln_x + lr.ln_abs;
        const double sign = ((n & 1) ? -1.0 : 1.0) * lr.sign;
        ks.add(-sign * std::exp(ln_t));  // -(z^{-n}) * rgamma
        max_ln = std::max(max_ln, n * std::abs(ln_x) + std::abs(lr.ln_abs));
    }
    // exponentially small contribution invisible to the inverse-power series
    double exp_corr = 0.0;
    const double x_pow = std::pow(x, 1.0 / beta);
    if (beta > 0.5 && beta < 1.0) {
        exp_corr = 3.0 / sinpi(beta) * std::exp(-0.5 * x_pow);
    } else if (beta == 1.0) {
        exp_corr = std::exp(-x);
    } else if (beta > 1.0) {
        const double c = std::cos(kPi / beta);  // negative for beta in (1,2)
        exp_corr = 2.0 / beta * std::pow(x, (1.0 - rho) / beta) * std::exp(x_pow * c);
    }
    const double value = ks.value();
    const double err = std::exp(ln_first_omitted) + exp_corr +
                       (6.0 + max_ln) * kEps * ks.abs_sum;
    return {value, err, Method::AsymptoticExpansion};
}

EvalResult eval_negative_axis(double beta, double rho, double z,
                              double gate_rel = kGateRel);

namespace {

// E_{beta,rho}(-x) for rho < 1 + beta by the spectral integral
//   1/(pi beta) * int_0^inf (s x)^{(1-rho)/beta} exp(-(s x)^(1/beta))
//       * [s sin(pi(1-rho)) + sin(pi(1-rho+beta))]
//       / (s^2 + 2 s cos(beta pi) + 1) ds.
// At rho = 1 this is the complete-monotonicity kernel; for rho < 1 it avoids
// the cancellation the shift identity suffers when Gamma poles suppress the
// leading asymptotic term (e.g. rho = beta).
EvalResult spectral_axis(double beta, double rho, double x) {
    if (x == 0.0) return {rgamma(rho), 4.0 * kEps, Method::SpectralIntegral};
    const double cb = std::cos(kPi * beta);
    const double inv_beta = 1.0 / beta;
    const double pw = (1.0 - rho) * inv_beta;
    const double na = sinpi(1.0 - rho);
    const double nb = sinpi(1.0 - rho + beta);
    const auto f = [&](double s) {
        const double sx = s * x;
        double ln_pref = -std::pow(sx, inv_beta);
        if (pw != 0.0) {
            if (sx <= 0.0) return 0.0;
            ln_pref += pw * std::log(sx);
        }
        if (!(ln_pref > -745.0)) return 0.0;
        return std::exp(ln_pref) * (na * s + nb) / (s * (s + 2.0 * cb) + 1.0);
    };
    // integrand support ends where (s x)^(1/beta) ~ 750; the power prefactor
    // contributes at most (1-rho) ln 760 ~ a few nats on top
    const double s_cut = std::pow(760.0, beta) / x;
    std::vector<double> mesh{0.0};
    for (double q : {1e-3, 1e-2, 0.1, 0.5, 1.0, 4.0, 30.0})
        if (q / x < s_cut) mesh.push_back(q / x);
    for (double s : {0.25, 0.5, 1.0, 2.0, 4.0})
        if (s < s_cut) mesh.push_back(s);
    if (cb < 0.0) {
        // kernel peak at s = -cos(beta pi), width sin(beta pi)
        const double p = -cb, w = sinpi(beta);
        for (double s : {p - 5 * w, p - w, p, p + w, p + 5 * w})
            if (s > 0.0 && s < s_cut) mesh.push_back(s);
    }
    mesh.push_back(s_cut);
    std::sort(mesh.begin(), mesh.end());
    mesh.erase(std::unique(mesh.begin(), mesh.end()), mesh.end());

    const auto r = integrate_adaptive_mesh(f, mesh, kSpectralRelTol, 1e-280, 400);
    const double pre = 1.0 / (kPi * beta);
    const double value = pre * r.value;
    const double err = pre * (r.abs_error + 1e-290) + 64.0 * kEps * std::abs(value);
    if (!r.converged)
        throw ConvergenceError("spectral integral did not converge");
    return {value, err, Method::SpectralIntegral};
}

// Exact ladder E_{b,r+b}(z) = (E_{b,r}(z) - 1/Gamma(r)) / z applied k times
// from r = 1, usable when rho = 1 + k b and |z| > 1 (each step divides the
// accumulated error by |z|). Returns nullopt on cancellation or a loose
// error estimate so the caller can fall back to the reduction integral.
std::optional<EvalResult> spectral_ladder(double beta, int k, double z) {
    const EvalResult base = spectral_axis(beta, 1.0, -z);
    double v = base.value;
    double err = base.abs_error_est;
    double rho_i = 1.0;
    for (int i = 0; i < k; ++i) {
        const double c = rgamma(rho_i);
        const double num = v - c;
        if (std::abs(num) < 0.05 * (std::abs(v) + std::abs(c)))
            return std::nullopt;
        const double next = num / z;
        err = (err + 2.0 * kEps * (std::abs(v) + std::abs(c))) / std::abs(z) +
              2.0 * kEps * std::abs(next);
        v = next;
        rho_i += beta;
    }
    if (err > 2e-9 * std::max(std::abs(v), kValueFloor)) return std::nullopt;
    return EvalResult{v, err, Method::SpectralIntegral};
}

// E_{beta,rho}(-x) for rho > 1 via the Euler-transform reduction
//   E_{b,r}(-x) = (1/Gamma(r-1)) int_0^1 (1-t)^{r-2} E_b(-x t^b) dt,
// substituting u = (1-t)^{sigma} when sigma = r-1 < 1 to remove the
// endpoint singularity.
EvalResult spectral_reduce(double beta, double rho, double x) {
    const double sigma = rho - 1.0;
    double max_inner_rel = 0.0;
    const auto inner = [&](double t) {
        const double arg = -x * std::pow(t, beta);
        const EvalResult r = eval_negative_axis(beta, 1.0, arg, kInnerGateRel);
        max_inner_rel = std::max(
            max_inner_rel, r.abs_error_est / std::max(std::abs(r.value), kValueFloor));
        return r.value;
    };
    // cluster points at both ends: the inner function varies fastest near
    // t = 0 for large x, the (1-t) weight near t = 1
    auto mesh = graded_mesh_toward_start(0.0, 0.5, 0.25, 10);
    const auto tail = graded_mesh_toward_end(0.5, 1.0, 0.25, 10);
    mesh.insert(mesh.end(), tail.begin() + 1, tail.end());
    AdaptiveResult q;
    if (sigma >= 1.0) {
        const auto f = [&](double t) {
            return std::pow(1.0 - t, sigma - 1.0) * inner(t);
        };
        q = integrate_adaptive_mesh(f, mesh, kSpectralRelTol, 1e-280, 300);
    } else {
        const auto f = [&](double u) {
            const double t = 1.0 - std::pow(u, 1.0 / sigma);
            return inner(t) / sigma;
        };
        q = integrate_adaptive_mesh(f, mesh, kSpectralRelTol, 1e-280, 300);
    }
    if (!q.converged)
        throw ConvergenceError("spectral Euler reduction did not converge");
    const double rg = std::exp(-gamma_ln(sigma));
    const double value = q.value * rg;
    const double err =
        (q.abs_error + max_inner_rel * std::abs(q.value)) * rg + 4.0 * kEps * std::abs(value);
    return {value, err, Method::SpectralIntegral};
}

} // namespace

EvalResult ml_spectral(double beta, double rho, double z) {
    if (!(beta > 0.0) || !(beta < 1.0))
        throw ConvergenceError("ml_spectral: requires beta in (0,1)");
    const double x = -z;
    if (rho == 1.0) return spectral_axis(beta, 1.0, x);
    if (rho > 1.0) {
        const double steps = (rho - 1.0) / beta;
        const double k = std::round(steps);
        if (x > 1.0 && k >= 1.0 && k <= 8.0 && std::abs(steps - k) < 1e-9) {
            const auto r = spectral_ladder(beta, static_cast<int>(k), z);
            if (r) return *r;
        }
        return spectral_reduce(beta, rho, x);
    }
    // rho < 1: the general-order kernel is cancellation-free over most of
    // the band; keep the shift identity
    //   E_{b,r}(z) = 1/Gamma(r) + z E_{b,r+b}(z)
    // as a fallback for where the axis integrand loses digits to sign changes
    std::optional<EvalResult> axis;
    try {
        axis = spectral_axis(beta, rho, x);
        if (axis->abs_error_est <=
            2e-9 * std::max(std::abs(axis->value), kValueFloor))
            return *axis;
    } catch (const ConvergenceError&) {
    }
    std::optional<EvalResult> unrolled;
    try {
        double shifted = rho;
        int shifts = 0;
        while (shifted < 1.0 && shifts < 4) {
            shifted += beta;
            ++shifts;
        }
        if (shifted >= 1.0) {
            // unroll the shifts from the top down
            EvalResult r = (shifted == 1.0) ? spectral_axis(beta, 1.0, x)
                                            : spectral_reduce(beta, shifted, x);
            double value = r.value;
            double err = r.abs_error_est;
            for (int i = shifts; i >= 1; --i) {
                const double rho_i = rho + beta * (i - 1);
                const double head = rgamma(rho_i);
                const double prev = value;
                value = head + z * prev;
                err = std::abs(z) * err +
                      2.0 * kEps * (std::abs(head) + std::abs(z * prev));
            }
            unrolled = EvalResult{value, err, Method::SpectralIntegral};
        }
    } catch (const ConvergenceError&) {
    }
    if (axis && unrolled) {
        const double ra =
            axis->abs_error_est / std::max(std::abs(axis->value), kValueFloor);
        const double ru = unrolled->abs_error_est /
                          std::max(std::abs(unrolled->value), kValueFloor);
        return ra <= ru ? *axis : *unrolled;
    }
    if (axis) return *axis;
    if (unrolled) return *unrolled;
    throw ConvergenceError("ml_spectral: no usable route at rho < 1");
}

} // namespace detail

namespace {

using detail::ml_asymptotic_auto;
using detail::ml_spectral;
using detail::ml_taylor;

std::optional<EvalResult> attempt(EvalResult (*route)(double, double, double),
                                  double beta, double rho, double z) {
    try {
        return route(beta, rho, z);
    } catch (const ConvergenceError&) {
        return std::nullopt;
    }
}

EvalResult closed_e13(double z) {
    // E_{1,3}(z) = (e^z - 1 - z)/z^2, stable on the negative axis
    if (std::abs(z) < 0.5) {
        detail::KahanSum ks;
        double t = 0.5;  // n = 0 term: 1/2!
        for (int n = 0; n < 40 && std::abs(t) > 1e-20; ++n) {
            ks.add(t);
            t *= z / (n + 3.0);
        }
        return {ks.value(), 4.0 * kEps * ks.abs_sum, Method::ClosedForm};
    }
    const double v = (std::expm1(z) - z) / (z * z);
    return {v, 4.0 * kEps * std::abs(v), Method::ClosedForm};
}

// beta = 1, general rho > 0: Kummer's transformation of the confluent
// hypergeometric series M(1, rho, z) gives
//   E_{1,rho}(-x) = e^{-x} (1 - (1 - rho) S) / Gamma(rho),
//   S = sum_{n>=1} x^n / (n! (n + rho - 1)),
// whose terms are all positive, so the value is well conditioned uniformly
// in x (the alternating power series is not).
EvalResult ml_beta1_kummer(double rho, double x) {
    detail::KahanSum s;
    double t = 1.0;  // x^n / n!
    int n = 1;
    for (; n <= 2000; ++n) {
        t *= x / n;
        const double term = t / (n + rho - 1.0);
        s.add(term);
        if (n > x && term < 1e-4 * kEps * s.value()) break;
    }
    const double sum = s.value();
    const double m = 1.0 - (1.0 - rho) * sum;
    const double scale = std::exp(-x) * std::abs(detail::rgamma(rho));
    const double value = std::exp(-x) * m * detail::rgamma(rho);
    const double err =
        scale * ((2.0 + n) * kEps * std::abs(1.0 - rho) * sum + 2.0 * kEps) +
        4.0 * kEps * std::abs(value);
    return {value, err, Method::TaylorSeries};
}

} // namespace

namespace detail {
namespace {

EvalResult eval_negative_axis_impl(double beta, double rho, double z,
                                   double gate_rel) {
    if (z == 0.0) {
        const double v = rgamma(rho);
        return {v, 2.0 * kEps * std::abs(v), Method::ClosedForm};
    }
    if (beta == 1.0) {
        if (rho == 1.0) {
            const double v = std::exp(z);
            return {v, 2.0 * kEps * v, Method::ClosedForm};
        }
        if (rho == 2.0) {
            const double v = std::expm1(z) / z;
            return {v, 4.0 * kEps * std::abs(v), Method::ClosedForm};
        }
        if (rho == 3.0) return closed_e13(z);
        if (rho > 1e-8 && -z <= 256.0) {
            // e^x stays representable below 256; larger x belongs to the
            // asymptotic route anyway
            const EvalResult r = ml_beta1_kummer(rho, -z);
            if (r.abs_error_est <= gate_for(r.value, gate_rel) ||
                r.abs_error_est <= kGateAbs)
                return r;
        }
    }

    const double x = -z;
    const MlSwitchRadii& radii = ml_switch_radii();
    EvalResult (*routes[3])(double, double, double);
    if (x <= radii.taylor_below) {
        routes[0] = ml_taylor;
        routes[1] = ml_spectral;
        routes[2] = ml_asymptotic_auto;
    } else if (x >= radii.asymptotic_above) {
        routes[0] = ml_asymptotic_auto;
        routes[1] = ml_spectral;
        routes[2] = ml_taylor;
    } else {
        routes[0] = ml_spectral;
        routes[1] = ml_taylor;
        routes[2] = ml_asymptotic_auto;
    }

    std::optional<EvalResult> best;
    for (auto* route : routes) {
        const auto r = attempt(route, beta, rho, z);
        if (!r) continue;
        if (r->abs_error_est <= gate_for(r->value, gate_rel) ||
            r->abs_error_est <= kGateAbs)
            return *r;
        if (!best || r->abs_error_est < best->abs_error_est) best = r;
    }
    if (best)
        throw ConvergenceError(
            "mittag_leffler: no method met the accuracy gate at beta=" +
            std::to_string(beta) + " rho=" + std::to_string(rho) +
            " z=" + std::to_string(z) + " (best abs error " +
            std::to_string(best->abs_error_est) + ")");
    throw ConvergenceError("mittag_leffler: all methods failed at beta=" +
                           std::to_string(beta) + " rho=" + std::to_string(rho) +
                           " z=" + std::to_string(z));
}

} // namespace

EvalResult eval_negative_axis(double beta, double rho, double z, double gate_rel) {
    return eval_negative_axis_impl(beta, rho, z, gate_rel);
}

} // namespace detail

EvalResult mittag_leffler(double beta, double rho, double z) {
    if (!(beta > 0.0) || !(beta < 2.0))
        throw std::domain_error("mittag_leffler: beta must be in (0,2), got " +
                                std::to_string(beta));
    if (!std::isfinite(rho) || !std::isfinite(z))
        throw std::domain_error("mittag_leffler: non-finite argument");
    if (z > 0.0)
        throw std::domain_error("mittag_leffler: only z <= 0 is supported, got " +
                                std::to_string(z));
    return detail::eval_negative_axis(beta, rho, z);
}

double mittag_leffler_asymptotic(double beta, double rho, double z, int m) {
    if (!(z < 0.0)) throw std::domain_error("mittag_leffler_asymptotic: requires z < 0");
    if (m < 1) throw std::domain_error("mittag_leffler_asymptotic: requires m >= 1");
    const double ln_x = std::log(-z);
    detail::KahanSum ks;
    for (int n = 1; n <= m; ++n) {
        const detail::LogRGamma lr = detail::rgamma_ln(rho - beta * n);
        if (lr.sign == 0) continue;
        const double mag = std::exp(-n * ln_x + lr.ln_abs);
        const double sign = ((n & 1) ? -1.0 : 1.0) * lr.sign;  // z^{-n} sign
        ks.add(-sign * mag);
    }
    return ks.value();
}

EvalResult fox_wright_2psi2(const FoxWrightParams& p, double x) {
    if (x > 0.0)
        throw std::domain_error("fox_wright_2psi2: only x <= 0 is supported");
    const double ln_x = x == 0.0 ? 0.0 : std::log(-x);
    detail::KahanSum ks;
    double last_abs = 0.0;
    double max_ln = 0.0;
    bool past_peak = false;
    constexpr int kMaxTerms = 4000;
    for (int n = 0; n < kMaxTerms; ++n) {
        const detail::LogRGamma n1 = detail::rgamma_ln(p.a1 + p.b1 * n);
        const detail::LogRGamma n2 = detail::rgamma_ln(p.a2 + p.b2 * n);
        const detail::LogRGamma d1 = detail::rgamma_ln(p.c1 + p.d1 * n);
        const detail::LogRGamma d2 = detail::rgamma_ln(p.c2 + p.d2 * n);
        if (n1.sign == 0 || n2.sign == 0)
            throw std::domain_error("fox_wright_2psi2: numerator Gamma pole");
        double t;
        int sign = (n & 1) ? -1 : 1;  // sign of x^n for x < 0
        if (d1.sign == 0 || d2.sign == 0) {
            t = 0.0;
        } else {
            const double ln_t = -n1.ln_abs - n2.ln_abs + d1.ln_abs + d2.ln_abs +
                                n * ln_x - gamma_ln(n + 1.0);
            if (ln_t > 700.0)
                throw ConvergenceError("fox_wright_2psi2: term overflow");
            sign *= n1.sign * n2.sign * d1.sign * d2.sign;
            t = sign * std::exp(ln_t);
            max_ln = std::max(max_ln, std::abs(ln_t));
        }
        if (x == 0.0 && n > 0) t = 0.0;
        ks.add(t);
        const double abs_t = std::abs(t);
        if (n > 0 && abs_t < last_abs) past_peak = true;
        last_abs = abs_t;
        if ((past_peak || -x <= 1.0) && n >= 4 &&
            abs_t < 1e-4 * kEps * std::max(std::abs(ks.value()), kValueFloor)) {
            const double value = ks.value();
            const double err = (6.0 + max_ln) * kEps * ks.abs_sum + abs_t;
            if (err > 1e-2 * std::max(std::abs(value), kValueFloor))
                throw ConvergenceError(
                    "fox_wright_2psi2: cancellation left fewer than 2 digits");
            return {value, err, Method::TaylorSeries};
        }
    }
    throw ConvergenceError("fox_wright_2psi2: series did not converge");
}

} // namespace ggbm
