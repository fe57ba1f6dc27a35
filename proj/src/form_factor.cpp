#include "ggbm/form_factor.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ggbm/quadrature.hpp"

namespace ggbm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// f_D(y; 1, 1) = 2 (e^{-x} - 1 + x) / x^2 at x = y^2; summed as
// 2 sum_j (-x)^j / (j+2)! below x = 0.5 where the closed form cancels
EvalResult debye_bm_closed(double y) {
    const double x = y * y;
    if (x < 0.5) {
        detail::KahanSum ks;
        double t = 1.0;  // j = 0 term: 2/2!
        for (int j = 0; j < 40 && std::abs(t) > 1e-20; ++j) {
            ks.add(t);
            t *= -x / (j + 3.0);
        }
        return {ks.value(), 4.0 * kEps * ks.abs_sum, Method::ClosedForm};
    }
    const double v = 2.0 * (std::expm1(-x) + x) / (x * x);
    return {v, 8.0 * kEps * std::abs(v), Method::ClosedForm};
}

// direct series with quadrature fallback, shared by debye_general and
// debye_beta1; past y^2 = 25 the alternating series loses too many digits
// in doubles, so only the integral representation is attempted there
EvalResult debye_engine(double y, const GgbmParams& params) {
    const double y2 = y * y;
    if (y2 <= 25.0) {
        try {
            const FoxWrightParams p{1.0, params.alpha, 1.0, 1.0,
                                    1.0, params.beta,  3.0, params.alpha};
            EvalResult r = fox_wright_2psi2(p, -y2);
            r.value *= 2.0;
            r.abs_error_est *= 2.0;
            if (r.abs_error_est <= 1e-9 * std::max(std::abs(r.value), 1e-300))
                return r;
        } catch (const ConvergenceError&) {
            // cancellation too deep; the quadrature below is accurate everywhere
        }
    }
    return debye_quadrature(y, params);
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

} // namespace

const char* debye_family_name(DebyeFamily f) {
    switch (f) {
        case DebyeFamily::General: return "general";
        case DebyeFamily::GreyBm: return "grey-bm";
        case DebyeFamily::FractionalBm: return "fractional-bm";
        case DebyeFamily::StandardBm: return "standard-bm";
        case DebyeFamily::AlphaOne: return "alpha-one";
    }
    return "unknown";
}

EvalResult debye_general(double y, const GgbmParams& params, DebyeRoute route) {
    require(y >= 0.0, "debye_general: requires y >= 0");
    if (y == 0.0) return {1.0, kEps, Method::ClosedForm};
    if (route == DebyeRoute::Auto) {
        if (params.beta == 1.0 && params.alpha == 1.0) return debye_bm_closed(y);
        if (params.beta == 1.0) return debye_fbm(y, params.alpha);
        if (params.alpha == params.beta) return debye_gbm(y, params.beta);
        // alpha = 1 needs no dispatch: debye_beta1 is this same engine
    }
    return debye_engine(y, params);
}

EvalResult debye_gbm(double y, double beta) {
    require(beta > 0.0 && beta <= 1.0, "debye_gbm: requires beta in (0, 1]");
    require(y >= 0.0, "debye_gbm: requires y >= 0");
    EvalResult r = mittag_leffler(beta, 3.0, -y * y);
    r.value *= 2.0;
    r.abs_error_est *= 2.0;
    return r;
}

EvalResult debye_fbm(double y, double alpha) {
    require(alpha > 0.0 && alpha < 2.0, "debye_fbm: requires alpha in (0, 2)");
    require(y > 0.0, "debye_fbm: requires y > 0 (the y -> 0 limit is 1)");
    const double x = y * y;
    const double a1 = 1.0 / alpha;
    const double a2 = 2.0 / alpha;
    const double t1 = detail::lower_gamma_scaled(a1, x);
    const double t2 = detail::lower_gamma_scaled(a2, x);
    const double v = (2.0 / alpha) * (t1 - t2);
    // incurred error sources: the exp(-x) / exp(a ln x) factors amplify the
    // rounding of their log-space arguments, plus O(terms) summation noise
    const double rel = (x + std::abs(a2 * std::log(x)) + 60.0) * kEps;
    const double err = (2.0 / alpha) * (t1 + t2) * rel + 4.0 * kEps * std::abs(v);
    return {v, err, Method::ClosedForm};
}

EvalResult debye_beta1(double y, double beta) {
    require(beta > 0.0 && beta <= 1.0, "debye_beta1: requires beta in (0, 1]");
    require(y >= 0.0, "debye_beta1: requires y >= 0");
    if (y == 0.0) return {1.0, kEps, Method::ClosedForm};
    // same strategy as debye_general, including the beta = 1 dispatch
    if (beta == 1.0) return debye_bm_closed(y);
    return debye_engine(y, GgbmParams{beta, 1.0});
}

double debye_limit_beta0(double y, BetaZeroFamily family) {
    require(y >= 0.0, "debye_limit_beta0: requires y >= 0");
    const double u = y * y;
    if (family == BetaZeroFamily::GreyBm) return 1.0 / (1.0 + u);
    // (2/u^2)((1+u) ln(1+u) - u), summed as 2 sum_j (-u)^j / ((j+1)(j+2))
    // below u = 0.5 where the closed form cancels; the j = 0 term gives the
    // y -> 0 limit value 1
    if (u < 0.5) {
        double sum = 0.0, t = 1.0;
        for (int j = 0; j < 80 && std::abs(t) > 1e-18; ++j) {
            sum += t;
            t *= -u * (j + 1.0) / (j + 3.0);
        }
        return sum;
    }
    return 2.0 * ((1.0 + u) * std::log1p(u) - u) / (u * u);
}

EvalResult form_factor(const std::vector<double>& k, int d, double n,
                       const GgbmParams& params) {
    require(d >= 1, "form_factor: requires d >= 1");
    require(static_cast<int>(k.size()) == d,
            "form_factor: k must have exactly d components");
    require(n > 0.0, "form_factor: requires n > 0");
    double k2 = 0.0;
    for (double ki : k) k2 += ki * ki;
    const double y = std::sqrt(0.5 * std::pow(n, params.alpha) * k2);
    return debye_general(y, params);
}

double end_to_end_sq(const GgbmParams& params, double n) {
    require(n > 0.0, "end_to_end_sq: requires n > 0");
    return std::pow(n, params.alpha) * std::exp(-gamma_ln(params.beta + 1.0));
}

RadiusReport radius_of_gyration_sq(const GgbmParams& params, double n) {
    const double r_e_sq = end_to_end_sq(params, n);
    const double ratio = (params.alpha + 1.0) * (params.alpha + 2.0);
    return {r_e_sq, r_e_sq / ratio, ratio, n};
}

double asymptote_gbm_coefficient(double beta) {
    require(beta > 0.0 && beta <= 1.0,
            "asymptote_gbm_coefficient: requires beta in (0, 1]");
    return 2.0 * std::exp(-gamma_ln(3.0 - beta));
}

std::pair<double, double> fit_log_asymptote(const std::vector<double>& ys,
                                            const std::vector<double>& values,
                                            double y_min) {
    require(ys.size() == values.size(),
            "fit_log_asymptote: ys and values must have equal length");
    require(y_min >= 10.0, "fit_log_asymptote: requires y_min >= 10");
    // least squares of g = y^2 f(y) against (1, ln y), centered for
    // conditioning: k2 = cov(ln y, g)/var(ln y), k1 = mean(g) - k2 mean(ln y)
    std::size_t m = 0;
    double mean_l = 0.0, mean_g = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] < y_min) continue;
        ++m;
        mean_l += std::log(ys[i]);
        mean_g += ys[i] * ys[i] * values[i];
    }
    if (m < 8)
        throw std::domain_error(
            "fit_log_asymptote: needs at least 8 points with y >= y_min");
    mean_l /= static_cast<double>(m);
    mean_g /= static_cast<double>(m);
    double s_ll = 0.0, s_lg = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (ys[i] < y_min) continue;
        const double dl = std::log(ys[i]) - mean_l;
        const double dg = ys[i] * ys[i] * values[i] - mean_g;
        s_ll += dl * dl;
        s_lg += dl * dg;
    }
    require(s_ll > 0.0, "fit_log_asymptote: degenerate grid (all y equal)");
    const double k2 = s_lg / s_ll;
    const double k1 = mean_g - k2 * mean_l;
    return {k1, k2};
}

std::pair<double, double> fit_log_asymptote(const DebyeCurve& curve,
                                            double y_min) {
    return fit_log_asymptote(curve.ys, curve.values, y_min);
}

DebyeCurve sample_debye_curve(DebyeFamily family, const GgbmParams& params,
                              std::vector<double> ys) {
    switch (family) {
        case DebyeFamily::General:
            break;
        case DebyeFamily::GreyBm:
            require(params.alpha == params.beta,
                    "sample_debye_curve: GreyBm requires alpha == beta");
            break;
        case DebyeFamily::FractionalBm:
            require(params.beta == 1.0,
                    "sample_debye_curve: FractionalBm requires beta == 1");
            break;
        case DebyeFamily::StandardBm:
            require(params.beta == 1.0 && params.alpha == 1.0,
                    "sample_debye_curve: StandardBm requires beta == alpha == 1");
            break;
        case DebyeFamily::AlphaOne:
            require(params.alpha == 1.0,
                    "sample_debye_curve: AlphaOne requires alpha == 1");
            break;
    }
    require(!ys.empty(), "sample_debye_curve: grid must be non-empty");
    require(ys.front() > 0.0, "sample_debye_curve: grid must be positive");
    for (std::size_t i = 1; i < ys.size(); ++i)
        require(ys[i] > ys[i - 1],
                "sample_debye_curve: grid must be strictly increasing");

    DebyeCurve curve{family, params, std::move(ys), {}, {}};
    curve.values.reserve(curve.ys.size());
    curve.methods.reserve(curve.ys.size());
    for (double y : curve.ys) {
        EvalResult r{};
        switch (family) {
            case DebyeFamily::General: r = debye_general(y, params); break;
            case DebyeFamily::GreyBm: r = debye_gbm(y, params.beta); break;
            case DebyeFamily::FractionalBm: r = debye_fbm(y, params.alpha); break;
            case DebyeFamily::StandardBm: r = debye_bm_closed(y); break;
            case DebyeFamily::AlphaOne: r = debye_beta1(y, params.beta); break;
        }
        curve.values.push_back(r.value);
        curve.methods.push_back(r.method);
    }

    // computed-value invariants; a violation is an evaluator defect, not a
    // caller error
    if (!(curve.values.front() <= 1.0 + 1e-12))
        throw std::runtime_error("sample_debye_curve: normalization violated");
    std::size_t tail = 0;
    while (tail < curve.ys.size() && curve.ys[tail] < 3.0) ++tail;
    for (std::size_t i = tail; i < curve.values.size(); ++i) {
        if (!(curve.values[i] > 0.0))
            throw std::runtime_error("sample_debye_curve: tail not positive");
        if (i > tail &&
            !(curve.values[i] <= curve.values[i - 1] * (1.0 + 1e-12)))
            throw std::runtime_error("sample_debye_curve: tail not decreasing");
    }
    return curve;
}

std::vector<double> log_spaced_grid(double lo, double hi, std::size_t count) {
    require(lo > 0.0 && hi > lo, "log_spaced_grid: requires 0 < lo < hi");
    require(count >= 2, "log_spaced_grid: requires count >= 2");
    std::vector<double> g(count);
    const double ll = std::log(lo), lh = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const double w = static_cast<double>(i) / static_cast<double>(count - 1);
        g[i] = std::exp(ll + (lh - ll) * w);
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

} // namespace ggbm
