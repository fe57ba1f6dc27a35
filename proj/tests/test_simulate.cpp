#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggbm/detail/fft.hpp"
#include "ggbm/form_factor.hpp"
#include "ggbm/simulate.hpp"
#include "ggbm/special_functions.hpp"

using namespace ggbm;

namespace {

constexpr double kPi = 3.14159265358979323846;

// running mean / standard error over scalar samples
struct MeanSe {
    double mean = 0.0, m2 = 0.0;
    std::int64_t n = 0;
    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    double se() const {
        return n > 1 ? std::sqrt(m2 / (static_cast<double>(n) - 1.0) /
                                 static_cast<double>(n))
                     : 0.0;
    }
};

void check_z(double got, double want, double se, double z_max = 3.0) {
    CHECK(std::abs(got - want) <= z_max * se);
}

// covariance of the cumulative sums of fractional noise at times t, s
double fbm_cov(double hurst, double t, double s) {
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) -
                  std::pow(std::abs(t - s), two_h));
}

// estimates the full covariance of the cumsum of sampler output and checks
// every entry against the fractional Brownian law within z_max errors
void check_fgn_covariance(const FgnSampler& sampler, double dt, int n_samples,
                          std::uint64_t seed, double z_max) {
    const int n = sampler.n_steps();
    PathRng rng(seed, 0);
    std::vector<double> x;
    std::vector<double> w(static_cast<std::size_t>(n));
    std::vector<MeanSe> acc(static_cast<std::size_t>(n) * n);
    for (int s = 0; s < n_samples; ++s) {
        sampler.sample(rng, x);
        double run = 0.0;
        for (int i = 0; i < n; ++i) {
            run += x[static_cast<std::size_t>(i)];
            w[static_cast<std::size_t>(i)] = run;
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j)
                acc[static_cast<std::size_t>(i) * n + j].add(
                    w[static_cast<std::size_t>(i)] *
                    w[static_cast<std::size_t>(j)]);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            const auto& a = acc[static_cast<std::size_t>(i) * n + j];
            const double want =
                fbm_cov(sampler.hurst(), (i + 1) * dt, (j + 1) * dt);
            check_z(a.mean, want, a.se(), z_max);
        }
    }
}

} // namespace

TEST_CASE("path rng streams are deterministic and well distributed") {
    PathRng a(1234, 7), b(1234, 7), c(1234, 8);
    bool same = true, differ = false;
    for (int i = 0; i < 64; ++i) {
        const double ua = a.uniform01();
        same = same && (ua == b.uniform01());
        differ = differ || (ua != c.uniform01());
    }
    CHECK(same);
    CHECK(differ);

    PathRng r(99, 0);
    MeanSe u_acc, n_acc, n2_acc;
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double u = r.uniform01();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        u_acc.add(u);
        const double g = r.normal();
        n_acc.add(g);
        n2_acc.add(g * g);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    check_z(u_acc.mean, 0.5, u_acc.se());
    check_z(n_acc.mean, 0.0, n_acc.se());
    check_z(n2_acc.mean, 1.0, n2_acc.se());

    PathRng e(5, 3);
    MeanSe e_acc;
    bool all_pos = true;
    for (int i = 0; i < 100000; ++i) {
        const double x = e.exponential();
        all_pos = all_pos && x > 0.0;
        e_acc.add(x);
    }
    CHECK(all_pos);
    check_z(e_acc.mean, 1.0, e_acc.se());
}

TEST_CASE("radix-2 fft matches the direct transform") {
    std::vector<std::complex<double>> delta(8, 0.0);
    delta[0] = 1.0;
    detail::fft_radix2(delta);
    for (const auto& v : delta) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(v.imag()) < 1e-14);
    }

    std::vector<std::complex<double>> ones(8, 1.0);
    detail::fft_radix2(ones);
    CHECK(ones[0].real() == doctest::Approx(8.0).epsilon(1e-14));
    for (std::size_t k = 1; k < 8; ++k) CHECK(std::abs(ones[k]) < 1e-12);

    // pseudo-random input vs an O(M^2) direct transform
    const std::size_t m = 16;
    std::vector<std::complex<double>> a(m);
    std::uint64_t state = 1;
    for (auto& v : a) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        const double re = static_cast<double>(state >> 40) / 16777216.0 - 0.5;
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        const double im = static_cast<double>(state >> 40) / 16777216.0 - 0.5;
        v = {re, im};
    }
    std::vector<std::complex<double>> direct(m, 0.0);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t j = 0; j < m; ++j) {
            const double ang = -2.0 * kPi * static_cast<double>(j * k) /
                               static_cast<double>(m);
            direct[k] += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
    detail::fft_radix2(a);
    for (std::size_t k = 0; k < m; ++k)
        CHECK(std::abs(a[k] - direct[k]) < 1e-12);

    std::vector<std::complex<double>> bad(12, 0.0);
    CHECK_THROWS_AS(detail::fft_radix2(bad), std::invalid_argument);
    std::vector<std::complex<double>> empty;
    CHECK_THROWS_AS(detail::fft_radix2(empty), std::invalid_argument);
}

TEST_CASE("fractional noise sampler reproduces the grid covariance") {
    SUBCASE("hurst 1/2 short-circuits to independent gaussians") {
        const FgnSampler sampler(0.5, 16, 0.25);
        CHECK(sampler.method() == FgnMethod::IidGaussian);
        PathRng rng(11, 0);
        std::vector<double> x;
        MeanSe var_acc, lag_acc;
        for (int s = 0; s < 20000; ++s) {
            sampler.sample(rng, x);
            for (int i = 0; i < 16; ++i) {
                var_acc.add(x[i] * x[i]);
                if (i > 0) lag_acc.add(x[i] * x[i - 1]);
            }
        }
        check_z(var_acc.mean, 0.25, var_acc.se());
        check_z(lag_acc.mean, 0.0, lag_acc.se());
    }

    SUBCASE("hurst 3/4 spectral route matches the covariance and lag-1 law") {
        const FgnSampler sampler(0.75, 8, 0.5);
        CHECK(sampler.method() == FgnMethod::CirculantEmbedding);
        check_fgn_covariance(sampler, 0.5, 40000, 21, 4.0);

        // increments at lag one correlate as 2^{2H-1} - 1 = sqrt(2) - 1
        PathRng rng(22, 0);
        std::vector<double> x;
        MeanSe var_acc, lag_acc;
        for (int s = 0; s < 40000; ++s) {
            sampler.sample(rng, x);
            for (int i = 0; i < 8; ++i) {
                var_acc.add(x[i] * x[i]);
                if (i > 0) lag_acc.add(x[i] * x[i - 1]);
            }
        }
        const double rho = lag_acc.mean / var_acc.mean;
        CHECK(std::abs(rho - (std::sqrt(2.0) - 1.0)) < 0.02);
    }

    SUBCASE("hurst 1/4 spectral route matches the covariance") {
        const FgnSampler sampler(0.25, 8, 0.25);
        CHECK(sampler.method() == FgnMethod::CirculantEmbedding);
        check_fgn_covariance(sampler, 0.25, 40000, 23, 4.0);
    }

    SUBCASE("cholesky fallback draws from the same law") {
        const FgnSampler sampler(0.75, 8, 0.5, false);
        CHECK(sampler.method() == FgnMethod::CholeskyFactor);
        CHECK(sampler.hurst() == 0.75);
        check_fgn_covariance(sampler, 0.5, 40000, 24, 4.0);
    }

    SUBCASE("sampling is deterministic per stream") {
        const FgnSampler s1(0.7, 32, 0.125);
        const FgnSampler s2(0.7, 32, 0.125);
        PathRng r1(77, 5), r2(77, 5);
        std::vector<double> x1, x2;
        s1.sample(r1, x1);
        s2.sample(r2, x2);
        CHECK(x1 == x2);
        std::vector<double> x3 = sample_fbm_increments(0.7, 32, 0.125, r1);
        std::vector<double> x4 = sample_fbm_increments(0.7, 32, 0.125, r2);
        CHECK(x3 == x4);
    }

    SUBCASE("constructor validates its domain") {
        CHECK_THROWS_AS(FgnSampler(0.0, 8, 0.1), std::domain_error);
        CHECK_THROWS_AS(FgnSampler(1.0, 8, 0.1), std::domain_error);
        CHECK_THROWS_AS(FgnSampler(0.5, 0, 0.1), std::domain_error);
        CHECK_THROWS_AS(FgnSampler(0.5, 8, 0.0), std::domain_error);
        CHECK_THROWS_AS(FgnSampler(0.75, 5000, 0.1, false), std::domain_error);
    }

    CHECK(std::string(fgn_method_name(FgnMethod::IidGaussian)) ==
          "iid_gaussian");
    CHECK(std::string(fgn_method_name(FgnMethod::CirculantEmbedding)) ==
          "circulant_embedding");
    CHECK(std::string(fgn_method_name(FgnMethod::CholeskyFactor)) ==
          "cholesky");
}

TEST_CASE("subordinator has the advertised transform and moments") {
    SUBCASE("beta = 1 is the constant 1 and consumes no randomness") {
        PathRng a(5, 0), b(5, 0);
        CHECK(sample_subordinator(1.0, a) == 1.0);
        CHECK(a.uniform01() == b.uniform01());
    }

    SUBCASE("beta = 1/2 moments E[Y^n] = n! / Gamma(beta n + 1)") {
        PathRng rng(314, 0);
        MeanSe m1, m2;
        bool all_pos = true;
        for (int i = 0; i < 200000; ++i) {
            const double y = sample_subordinator(0.5, rng);
            all_pos = all_pos && y > 0.0;
            m1.add(y);
            m2.add(y * y);
        }
        CHECK(all_pos);
        check_z(m1.mean, 1.0 / std::tgamma(1.5), m1.se());
        check_z(m2.mean, 2.0, m2.se());
    }

    SUBCASE("laplace transform is the one-parameter mittag-leffler") {
        std::uint64_t stream = 0;
        for (const double beta : {0.5, 0.9}) {
            for (const double s : {0.7, 1.5}) {
                PathRng rng(2718, stream++);
                MeanSe acc;
                for (int i = 0; i < 200000; ++i)
                    acc.add(std::exp(-s * sample_subordinator(beta, rng)));
                const double want = mittag_leffler(beta, 1.0, -s).value;
                check_z(acc.mean, want, acc.se());
            }
        }
    }

    SUBCASE("domain validation") {
        PathRng rng(1, 0);
        CHECK_THROWS_AS(sample_subordinator(0.0, rng), std::domain_error);
        CHECK_THROWS_AS(sample_subordinator(1.5, rng), std::domain_error);
    }
}

TEST_CASE("sampled ensembles have the right shape and are reproducible") {
    SimConfig cfg;
    cfg.params = GgbmParams(0.5, 1.2);
    cfg.d = 2;
    cfg.n_steps = 16;
    cfg.horizon = 2.0;
    cfg.n_paths = 50;
    cfg.seed = 42;

    const PathEnsemble ens = sample_paths(cfg);
    CHECK(ens.n_points() == 17);
    CHECK(ens.data.size() == 50u * 2u * 17u);
    bool origin_ok = true, finite_ok = true;
    for (std::int64_t p = 0; p < cfg.n_paths; ++p)
        for (int j = 0; j < cfg.d; ++j) {
            origin_ok = origin_ok && ens.at(p, j, 0) == 0.0;
            for (int i = 0; i <= cfg.n_steps; ++i)
                finite_ok = finite_ok && std::isfinite(ens.at(p, j, i));
        }
    CHECK(origin_ok);
    CHECK(finite_ok);

    const PathEnsemble again = sample_paths(cfg);
    CHECK(ens.data == again.data);

    // worker count must not change the ensemble
    setenv("GGBM_THREADS", "4", 1);
    CHECK(worker_count(cfg.n_paths) == 4);
    const PathEnsemble threaded = sample_paths(cfg);
    setenv("GGBM_THREADS", "1", 1);
    CHECK(worker_count(cfg.n_paths) == 1);
    const PathEnsemble serial = sample_paths(cfg);
    unsetenv("GGBM_THREADS");
    CHECK(ens.data == threaded.data);
    CHECK(ens.data == serial.data);
    CHECK(worker_count(1) == 1);

    SUBCASE("config validation") {
        SimConfig bad = cfg;
        bad.d = 0;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
        bad = cfg;
        bad.n_steps = 1;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
        bad = cfg;
        bad.horizon = 0.0;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
        bad = cfg;
        bad.n_paths = 0;
        CHECK_THROWS_AS(bad.validate(), std::domain_error);
    }
}

TEST_CASE("covariance estimates match the two-time law") {
    SUBCASE("grey case beta 1/2, alpha 1") {
        SimConfig cfg;
        cfg.params = GgbmParams(0.5, 1.0);
        cfg.d = 1;
        cfg.n_steps = 32;
        cfg.horizon = 1.0;
        cfg.n_paths = 20000;
        cfg.seed = 101;
        const PathEnsemble ens = sample_paths(cfg);

        // E[B(t)B(s)] = (t^a + s^a - |t-s|^a) / (2 Gamma(beta+1))
        const double gb1 = std::tgamma(1.5);
        const McEstimate c_ts = estimate_covariance(ens, 32, 16);
        check_z(c_ts.value, 0.5 / gb1, c_ts.std_error);
        CHECK(c_ts.n_samples == 20000);
        const McEstimate c_st = estimate_covariance(ens, 16, 32);
        CHECK(c_st.value == c_ts.value);
        const McEstimate var1 = estimate_covariance(ens, 32, 32);
        check_z(var1.value, 1.0 / gb1, var1.std_error);
        const McEstimate zero = estimate_covariance(ens, 0, 16);
        CHECK(zero.value == 0.0);
    }

    SUBCASE("gaussian case beta 1, alpha 3/2") {
        SimConfig cfg;
        cfg.params = GgbmParams(1.0, 1.5);
        cfg.d = 1;
        cfg.n_steps = 32;
        cfg.horizon = 1.0;
        cfg.n_paths = 20000;
        cfg.seed = 102;
        const PathEnsemble ens = sample_paths(cfg);
        // (1 + 0.5^1.5 - 0.5^1.5) / 2 = 1/2
        const McEstimate c = estimate_covariance(ens, 32, 16);
        check_z(c.value, 0.5, c.std_error);
        const McEstimate v = estimate_covariance(ens, 32, 32);
        check_z(v.value, 1.0, v.std_error);
    }
}

TEST_CASE("moment estimates match the even and odd laws") {
    SimConfig cfg;
    cfg.params = GgbmParams(0.5, 1.0);
    cfg.d = 1;
    cfg.n_steps = 32;
    cfg.horizon = 1.0;
    cfg.n_paths = 20000;
    cfg.seed = 103;
    const PathEnsemble ens = sample_paths(cfg);

    // E[B(t)^{2n}] = (2n)! / (2^n Gamma(beta n + 1)) t^{alpha n}
    const McEstimate m2 = estimate_even_moment(ens, 32, 2);
    check_z(m2.value, 1.0 / std::tgamma(1.5), m2.std_error);
    const McEstimate m4 = estimate_even_moment(ens, 32, 4);
    check_z(m4.value, 6.0, m4.std_error);

    const McEstimate o1 = estimate_odd_moment(ens, 32, 1);
    check_z(o1.value, 0.0, o1.std_error);
    const McEstimate o3 = estimate_odd_moment(ens, 32, 3);
    check_z(o3.value, 0.0, o3.std_error);
    const McEstimate at0 = estimate_odd_moment(ens, 0, 1);
    CHECK(at0.value == 0.0);
    CHECK(at0.std_error == 0.0);

    SimConfig gauss = cfg;
    gauss.params = GgbmParams(1.0, 1.5);
    gauss.seed = 104;
    const PathEnsemble gens = sample_paths(gauss);
    const McEstimate g4 = estimate_even_moment(gens, 32, 4);
    check_z(g4.value, 3.0, g4.std_error);

    CHECK_THROWS_AS(estimate_even_moment(ens, 32, 3), std::domain_error);
    CHECK_THROWS_AS(estimate_even_moment(ens, 32, 0), std::domain_error);
    CHECK_THROWS_AS(estimate_odd_moment(ens, 32, 2), std::domain_error);
    CHECK_THROWS_AS(estimate_odd_moment(ens, 33, 1), std::domain_error);
    CHECK_THROWS_AS(estimate_covariance(ens, -1, 0), std::domain_error);
}

TEST_CASE("characteristic function matches the law and is isotropic") {
    SimConfig cfg;
    cfg.params = GgbmParams(0.5, 0.5);
    cfg.d = 2;
    cfg.n_steps = 16;
    cfg.horizon = 1.0;
    cfg.n_paths = 20000;
    cfg.seed = 105;
    const PathEnsemble ens = sample_paths(cfg);

    // Re E[e^{i(k,B(t))}] = E_beta(-|k|^2 t^alpha / 2)
    const double want = mittag_leffler(0.5, 1.0, -0.5).value;
    const McEstimate axis = estimate_char_fn(ens, {1.0, 0.0}, 16);
    check_z(axis.value, want, axis.std_error);
    const double r = 1.0 / std::sqrt(2.0);
    const McEstimate diag = estimate_char_fn(ens, {r, r}, 16);
    check_z(diag.value, want, diag.std_error);
    const McEstimate at0 = estimate_char_fn(ens, {1.0, 0.0}, 0);
    CHECK(at0.value == 1.0);
    CHECK(at0.std_error == 0.0);

    CHECK_THROWS_AS(estimate_char_fn(ens, {1.0}, 16), std::domain_error);
    PathEnsemble broken = ens;
    broken.data.pop_back();
    CHECK_THROWS_AS(estimate_char_fn(broken, {1.0, 0.0}, 16),
                    std::domain_error);
}

TEST_CASE("monte carlo form factor agrees with the analytic curve") {
    const double k_val = std::sqrt(2.0);  // horizon 1 makes y = 1

    SUBCASE("zero wavevector gives exactly one") {
        SimConfig cfg;
        cfg.params = GgbmParams(1.0, 1.0);
        cfg.d = 1;
        cfg.n_steps = 32;
        cfg.horizon = 1.0;
        cfg.n_paths = 100;
        cfg.seed = 106;
        const PathEnsemble ens = sample_paths(cfg);
        const McEstimate f0 = mc_form_factor(ens, {0.0});
        CHECK(f0.value == 1.0);
        CHECK(f0.std_error == 0.0);
        CHECK_THROWS_AS(mc_form_factor(ens, {0.0, 0.0}), std::domain_error);
    }

    SUBCASE("brownian case converges to the closed form") {
        SimConfig cfg;
        cfg.params = GgbmParams(1.0, 1.0);
        cfg.d = 1;
        cfg.n_steps = 64;
        cfg.horizon = 1.0;
        cfg.n_paths = 20000;
        cfg.seed = 107;
        const PathEnsemble fine = sample_paths(cfg);
        const double want = debye_general(1.0, GgbmParams(1.0, 1.0)).value;
        const McEstimate f_fine = mc_form_factor(fine, {k_val});
        check_z(f_fine.value, want, f_fine.std_error);

        // halving the grid must not grow the error beyond combined noise
        SimConfig coarse = cfg;
        coarse.n_steps = 32;
        const McEstimate f_coarse =
            mc_form_factor(sample_paths(coarse), {k_val});
        CHECK(std::abs(f_fine.value - want) <=
              std::abs(f_coarse.value - want) +
                  3.0 * (f_fine.std_error + f_coarse.std_error));
    }

    SUBCASE("grey case converges to the mittag-leffler form") {
        SimConfig cfg;
        cfg.params = GgbmParams(0.5, 0.5);
        cfg.d = 1;
        cfg.n_steps = 64;
        cfg.horizon = 1.0;
        cfg.n_paths = 20000;
        cfg.seed = 108;
        const PathEnsemble ens = sample_paths(cfg);
        const double want = debye_gbm(1.0, 0.5).value;
        const McEstimate f = mc_form_factor(ens, {k_val});
        check_z(f.value, want, f.std_error);
    }
}

TEST_CASE("increments are stationary and the law is self-similar") {
    SimConfig cfg;
    cfg.params = GgbmParams(0.5, 1.2);
    cfg.d = 1;
    cfg.n_steps = 32;
    cfg.horizon = 1.0;
    cfg.n_paths = 20000;
    cfg.seed = 109;
    const PathEnsemble ens = sample_paths(cfg);

    // E[(B(t+h) - B(t))^{2n}] = (2n)!/(2^n Gamma(beta n + 1)) h^{alpha n}
    // depends on h only; h = 0.25 is 8 grid steps
    auto increment_moment = [&](int i_lo, int i_hi, int order) {
        MeanSe acc;
        for (std::int64_t p = 0; p < cfg.n_paths; ++p) {
            const double delta = ens.at(p, 0, i_hi) - ens.at(p, 0, i_lo);
            acc.add(std::pow(delta, order));
        }
        return acc;
    };
    const double h_a = std::pow(0.25, 1.2);
    for (const int order : {2, 4}) {
        const MeanSe early = increment_moment(4, 12, order);
        const MeanSe late = increment_moment(20, 28, order);
        CHECK(std::abs(early.mean - late.mean) <=
              3.0 * (early.se() + late.se()));
        const double want = order == 2 ? h_a / std::tgamma(1.5)
                                       : 6.0 * h_a * h_a;
        check_z(early.mean, want, early.se());
    }

    // E[B(2t)^2] = 2^alpha E[B(t)^2]
    const McEstimate half = estimate_covariance(ens, 8, 8);
    const McEstimate full = estimate_covariance(ens, 16, 16);
    const double scale = std::pow(2.0, 1.2);
    CHECK(std::abs(full.value - scale * half.value) <=
          3.0 * (full.std_error + scale * half.std_error));
}
