#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ggbm/ensemble_io.hpp"
#include "ggbm/form_factor.hpp"
#include "ggbm/params.hpp"
#include "ggbm/simulate.hpp"
#include "ggbm/special_functions.hpp"
#include "ggbm/validation.hpp"

namespace {

using nlohmann::json;

// Exit-code contract shared with the test-suite and documented in the README:
// 0 success, 1 validation failure, 2 usage/domain error, 3 I/O error.
constexpr int kExitValidationFailed = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

// The beta -> 0 limit curves are closed forms evaluated to a few ulp; CSV
// rows for them carry this relative bound instead of a truncation estimate.
constexpr double kLimitCurveRelErr = 2e-15;

enum class CurveScale { Linear, LogLog };

/// One Debye-curve job: family, parameters, and grid description.
struct CurveRequest {
    ggbm::DebyeFamily family = ggbm::DebyeFamily::General;
    double beta = 0.5;
    double alpha = 1.0;
    double y_min = 0.05;
    double y_max = 100.0;
    std::size_t points = 200;
    CurveScale scale = CurveScale::LogLog;
};

int fail(int code, const std::string& what) {
    std::cerr << json{{"error", what}}.dump() << "\n";
    return code;
}

json eval_json(const ggbm::EvalResult& r) {
    return json{{"value", r.value},
                {"abs_error_est", r.abs_error_est},
                {"method", ggbm::method_name(r.method)}};
}

json estimate_json(const ggbm::McEstimate& e, double expected) {
    json j{{"estimate", e.value},
           {"std_error", e.std_error},
           {"n_samples", e.n_samples},
           {"expected", expected}};
    j["z"] = e.std_error > 0.0 ? json((e.value - expected) / e.std_error)
                               : json();
    return j;
}

/// Effective (beta, alpha) for a family given the flags; the constrained
/// coordinate of the specialized families is pinned here.
ggbm::GgbmParams family_params(const CurveRequest& req) {
    switch (req.family) {
        case ggbm::DebyeFamily::GreyBm:
            return {req.beta, req.beta};
        case ggbm::DebyeFamily::FractionalBm:
            return {1.0, req.alpha};
        case ggbm::DebyeFamily::StandardBm:
            return {1.0, 1.0};
        case ggbm::DebyeFamily::AlphaOne:
            return {req.beta, 1.0};
        case ggbm::DebyeFamily::General:
            break;
    }
    return {req.beta, req.alpha};
}

ggbm::EvalResult eval_family(ggbm::DebyeFamily family,
                             const ggbm::GgbmParams& params, double y) {
    switch (family) {
        case ggbm::DebyeFamily::GreyBm:
            return ggbm::debye_gbm(y, params.beta);
        case ggbm::DebyeFamily::FractionalBm:
            return ggbm::debye_fbm(y, params.alpha);
        case ggbm::DebyeFamily::AlphaOne:
            return ggbm::debye_beta1(y, params.beta);
        case ggbm::DebyeFamily::StandardBm:
        case ggbm::DebyeFamily::General:
            break;
    }
    return ggbm::debye_general(y, params);
}

std::vector<double> curve_grid(const CurveRequest& req) {
    if (!(req.y_min > 0.0) || !(req.y_min < req.y_max))
        throw std::domain_error("curve: requires 0 < y_min < y_max");
    if (req.points < 2)
        throw std::domain_error("curve: requires points >= 2");
    if (req.scale == CurveScale::LogLog)
        return ggbm::log_spaced_grid(req.y_min, req.y_max, req.points);
    std::vector<double> ys(req.points);
    const double step =
        (req.y_max - req.y_min) / static_cast<double>(req.points - 1);
    for (std::size_t i = 0; i < req.points; ++i)
        ys[i] = req.y_min + step * static_cast<double>(i);
    ys.back() = req.y_max;
    return ys;
}

void write_curve_csv(std::ostream& os, ggbm::DebyeFamily family,
                     const ggbm::GgbmParams& params,
                     const std::vector<double>& ys) {
    os << "y,f_D,method,abs_err\n";
    char row[160];
    for (double y : ys) {
        const auto r = eval_family(family, params, y);
        std::snprintf(row, sizeof row, "%.17g,%.17g,%s,%.3e\n", y, r.value,
                      ggbm::method_name(r.method), r.abs_error_est);
        os << row;
    }
}

void write_limit_csv(std::ostream& os, ggbm::BetaZeroFamily family,
                     const std::vector<double>& ys) {
    os << "y,f_D,method,abs_err\n";
    char row[160];
    for (double y : ys) {
        const double v = ggbm::debye_limit_beta0(y, family);
        std::snprintf(row, sizeof row, "%.17g,%.17g,%s,%.3e\n", y, v,
                      ggbm::method_name(ggbm::Method::ClosedForm),
                      kLimitCurveRelErr * std::abs(v));
        os << row;
    }
}

int run_ml(double beta, double rho, double z) {
    const auto r = ggbm::mittag_leffler(beta, rho, z);
    json out{{"beta", beta}, {"rho", rho}, {"z", z}};
    out.update(eval_json(r));
    std::cout << out.dump(2) << "\n";
    return 0;
}

int run_curve(const CurveRequest& req, const std::string& out_path) {
    const auto params = family_params(req);
    const auto ys = curve_grid(req);
    if (out_path == "-") {
        write_curve_csv(std::cout, req.family, params, ys);
        if (!std::cout)
            throw std::runtime_error("curve: write to standard output failed");
        return 0;
    }
    std::ofstream os(out_path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("curve: cannot open " + out_path);
    write_curve_csv(os, req.family, params, ys);
    os.flush();
    if (!os)
        throw std::runtime_error("curve: write failed: " + out_path);
    return 0;
}

struct FigureJob {
    std::string file;
    ggbm::DebyeFamily family;
    double beta;
    double alpha;
    bool beta_zero_limit = false;
};

/// The parameter sets behind the three shipped figure data sets: the general
/// family on a (beta, alpha) grid; the grey-Brownian diagonal alpha = beta
/// with the Brownian member on top; and the alpha = 1 family bracketed by
/// its Brownian and beta -> 0 end members.
std::vector<FigureJob> figure_jobs() {
    auto name = [](const char* prefix, const char* tag, double b) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%s_%s_beta%g.csv", prefix, tag, b);
        return std::string(buf);
    };
    std::vector<FigureJob> jobs;
    for (double b : {0.5, 1.0})
        for (double a : {0.5, 1.0, 1.5}) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "fig1_ggbm_beta%g_alpha%g.csv", b,
                          a);
            jobs.push_back({buf, ggbm::DebyeFamily::General, b, a});
        }
    for (double b : {0.2, 0.4, 0.6, 0.8, 1.0})
        jobs.push_back(
            {name("fig2", "grey-bm", b), ggbm::DebyeFamily::GreyBm, b, b});
    for (double b : {1.0 / 3.0, 2.0 / 3.0, 1.0})
        jobs.push_back(
            {name("fig3", "alpha-one", b), ggbm::DebyeFamily::AlphaOne, b, 1.0});
    jobs.push_back({"fig3_alpha-one_beta0_limit.csv",
                    ggbm::DebyeFamily::AlphaOne, 0.0, 1.0, true});
    return jobs;
}

int run_figures(const std::string& out_dir, std::size_t points) {
    const auto ys = ggbm::log_spaced_grid(0.05, 100.0, points);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("figures: cannot create directory " +
                                 out_dir + ": " + ec.message());
    json curves = json::array();
    for (const auto& job : figure_jobs()) {
        const auto path = std::filesystem::path(out_dir) / job.file;
        std::ofstream os(path, std::ios::trunc);
        if (!os)
            throw std::runtime_error("figures: cannot open " + path.string());
        if (job.beta_zero_limit)
            write_limit_csv(os, ggbm::BetaZeroFamily::AlphaOne, ys);
        else
            write_curve_csv(os, job.family,
                            ggbm::GgbmParams(job.beta, job.alpha), ys);
        os.flush();
        if (!os)
            throw std::runtime_error("figures: write failed: " +
                                     path.string());
        curves.push_back(
            {{"file", job.file},
             {"family", job.beta_zero_limit
                            ? "alpha-one-beta0-limit"
                            : ggbm::debye_family_name(job.family)},
             {"beta", job.beta},
             {"alpha", job.alpha}});
    }
    const json manifest{{"grid",
                         {{"scale", "loglog"},
                          {"points", points},
                          {"y_min", 0.05},
                          {"y_max", 100.0}}},
                        {"curves", curves}};
    const auto manifest_path =
        std::filesystem::path(out_dir) / "manifest.json";
    std::ofstream os(manifest_path, std::ios::trunc);
    if (!os)
        throw std::runtime_error("figures: cannot open " +
                                 manifest_path.string());
    os << manifest.dump(2) << "\n";
    os.flush();
    if (!os)
        throw std::runtime_error("figures: write failed: " +
                                 manifest_path.string());
    std::cout << json{{"out_dir", out_dir},
                      {"curves", curves.size()},
                      {"manifest", manifest_path.string()}}
                     .dump(2)
              << "\n";
    return 0;
}

int run_validate(const std::string& level, bool inject_ml_fault,
                 std::int64_t mc_paths, std::uint64_t mc_seed) {
    if (inject_ml_fault)
        ggbm::ml_switch_radii().taylor_below = 0.1;
    ggbm::ValidationOptions opts;
    opts.include_mc = level == "full";
    opts.mc_paths = mc_paths;
    opts.mc_seed = mc_seed;
    const auto results = ggbm::run_validation(opts);
    json checks = json::array();
    std::size_t n_failed = 0;
    for (const auto& c : results) {
        if (!c.passed) ++n_failed;
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"observed", c.observed},
                          {"limit", c.limit},
                          {"detail", c.detail}});
    }
    const bool ok = ggbm::all_passed(results);
    std::cout << json{{"level", level},
                      {"checks", checks},
                      {"n_checks", results.size()},
                      {"n_failed", n_failed},
                      {"all_passed", ok}}
                     .dump(2)
              << "\n";
    return ok ? 0 : kExitValidationFailed;
}

int run_simulate(const ggbm::SimConfig& cfg, const std::string& out_path) {
    cfg.validate();
    const auto ens = ggbm::sample_paths(cfg);
    ggbm::save_ensemble(ens, out_path);

    const double beta = cfg.params.beta;
    const double alpha = cfg.params.alpha;
    const double dt = cfg.horizon / cfg.n_steps;
    auto t_of = [&](int idx) { return dt * idx; };
    auto cov_expected = [&](double t, double s) {
        return (std::pow(t, alpha) + std::pow(s, alpha) -
                std::pow(std::abs(t - s), alpha)) /
               (2.0 * std::tgamma(beta + 1.0));
    };
    // E[B(t)^{2n}] = (2n)! / (2^n Gamma(beta n + 1)) t^{alpha n}
    auto even_expected = [&](int order, double t) {
        const int n = order / 2;
        double fact = 1.0;
        for (int i = 2; i <= order; ++i) fact *= i;
        return fact / (std::pow(2.0, n) * std::tgamma(beta * n + 1.0)) *
               std::pow(t, alpha * n);
    };

    // Quarter-horizon covariance grid; indices deduplicated for tiny grids.
    std::vector<int> idx;
    for (int q = 1; q <= 4; ++q) {
        const int i = (cfg.n_steps * q) / 4;
        if (i >= 1 && (idx.empty() || idx.back() != i)) idx.push_back(i);
    }

    json cov = json::array();
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = a; b < idx.size(); ++b) {
            const double t = t_of(idx[b]), s = t_of(idx[a]);
            json row{{"t", t}, {"s", s}};
            row.update(estimate_json(
                ggbm::estimate_covariance(ens, idx[b], idx[a]),
                cov_expected(t, s)));
            cov.push_back(row);
        }

    const int last = cfg.n_steps;
    json moments = json::array();
    for (int order = 1; order <= 4; ++order) {
        const double t = t_of(last);
        json row{{"order", order}, {"t", t}};
        const auto est = order % 2 == 0
                             ? ggbm::estimate_even_moment(ens, last, order)
                             : ggbm::estimate_odd_moment(ens, last, order);
        row.update(estimate_json(
            est, order % 2 == 0 ? even_expected(order, t) : 0.0));
        moments.push_back(row);
    }

    json var_row{{"t", t_of(last)}};
    var_row.update(estimate_json(ggbm::estimate_covariance(ens, last, last),
                                 cov_expected(t_of(last), t_of(last))));

    const ggbm::FgnSampler probe(cfg.params.hurst(), cfg.n_steps, dt);
    const json summary{
        {"config",
         {{"beta", beta},
          {"alpha", alpha},
          {"d", cfg.d},
          {"n_steps", cfg.n_steps},
          {"horizon", cfg.horizon},
          {"n_paths", cfg.n_paths},
          {"seed", cfg.seed}}},
        {"ensemble_path", out_path},
        {"sidecar_path", out_path + ".json"},
        {"fgn_method", ggbm::fgn_method_name(probe.method())},
        {"variance", var_row},
        {"covariance", cov},
        {"moments", moments}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_formfactor(const std::vector<double>& k, double n, bool n_given,
                   double beta, double alpha, const std::string& mc_path) {
    const int d = static_cast<int>(k.size());
    const ggbm::GgbmParams params(beta, alpha);
    json out{{"k", k}, {"d", d}, {"beta", beta}, {"alpha", alpha}};
    if (!mc_path.empty()) {
        const auto ens = ggbm::load_ensemble(mc_path);
        if (ens.config.d != d)
            throw std::domain_error(
                "formfactor: k has " + std::to_string(d) +
                " components but the ensemble is " +
                std::to_string(ens.config.d) + "-dimensional");
        if (ens.config.params.beta != beta ||
            ens.config.params.alpha != alpha)
            throw std::domain_error(
                "formfactor: (beta, alpha) do not match the ensemble");
        if (n_given && n != ens.config.horizon)
            throw std::domain_error(
                "formfactor: --n must equal the ensemble horizon for the "
                "Monte Carlo comparison");
        n = ens.config.horizon;
        const auto analytic = ggbm::form_factor(k, d, n, params);
        const auto est = ggbm::mc_form_factor(ens, k);
        out["n"] = n;
        out["analytic"] = eval_json(analytic);
        json mc{{"estimate", est.value},
                {"std_error", est.std_error},
                {"n_paths", est.n_samples}};
        mc["z"] = est.std_error > 0.0
                      ? json((est.value - analytic.value) / est.std_error)
                      : json();
        out["mc"] = mc;
    } else {
        if (!n_given)
            throw std::domain_error("formfactor: --n is required without --mc");
        out["n"] = n;
        out["analytic"] = eval_json(ggbm::form_factor(k, d, n, params));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Debye functions, form factors, and Monte Carlo path "
                 "sampling for generalized grey Brownian motion"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ml
    double ml_beta = 0.0, ml_rho = 1.0, ml_z = 0.0;
    auto* ml = app.add_subcommand(
        "ml", "Evaluate the Mittag-Leffler function E_{beta,rho}(z), z <= 0");
    ml->add_option("--beta", ml_beta, "series parameter, in (0, 2)")
        ->required();
    ml->add_option("--rho", ml_rho, "second parameter (default 1)");
    ml->add_option("--z", ml_z, "argument, z <= 0")->required();
    ml->callback([&] { exit_code = run_ml(ml_beta, ml_rho, ml_z); });

    // curve
    CurveRequest req;
    std::string curve_out = "-";
    std::string preset;
    std::string fig_dir = "figures";
    auto* curve = app.add_subcommand(
        "curve", "Sample a Debye-function curve to CSV (y,f_D,method,abs_err)");
    const std::map<std::string, ggbm::DebyeFamily> family_map{
        {"general", ggbm::DebyeFamily::General},
        {"grey-bm", ggbm::DebyeFamily::GreyBm},
        {"fractional-bm", ggbm::DebyeFamily::FractionalBm},
        {"standard-bm", ggbm::DebyeFamily::StandardBm},
        {"alpha-one", ggbm::DebyeFamily::AlphaOne}};
    const std::map<std::string, CurveScale> scale_map{
        {"linear", CurveScale::Linear}, {"loglog", CurveScale::LogLog}};
    auto* fam_opt =
        curve->add_option("--family", req.family, "Debye family")
            ->transform(CLI::CheckedTransformer(family_map, CLI::ignore_case))
            ->default_str("general");
    auto* beta_opt = curve->add_option("--beta", req.beta, "beta in (0, 1]");
    auto* alpha_opt =
        curve->add_option("--alpha", req.alpha, "alpha in (0, 2)");
    curve->add_option("--y-min", req.y_min, "grid start (default 0.05)");
    curve->add_option("--y-max", req.y_max, "grid end (default 100)");
    curve->add_option("--points", req.points, "grid size (default 200)");
    curve->add_option("--scale", req.scale, "linear|loglog (default loglog)")
        ->transform(CLI::CheckedTransformer(scale_map, CLI::ignore_case));
    curve->add_option("--out", curve_out,
                      "output CSV path, '-' for standard output");
    curve->add_option("--preset", preset,
                      "'figures' writes the shipped figure data sets")
        ->check(CLI::IsMember({"figures"}));
    curve->add_option("--out-dir", fig_dir,
                      "output directory for --preset figures");
    curve->callback([&] {
        if (!preset.empty()) {
            exit_code = run_figures(fig_dir, req.points);
            return;
        }
        // The specialized families pin one coordinate; reject flags that
        // contradict the pinned value instead of silently overriding them.
        const auto p = family_params(req);
        if (beta_opt->count() > 0 && req.beta != p.beta)
            throw std::domain_error(
                "curve: --beta contradicts the requested family");
        if (alpha_opt->count() > 0 && req.alpha != p.alpha)
            throw std::domain_error(
                "curve: --alpha contradicts the requested family");
        (void)fam_opt;
        exit_code = run_curve(req, curve_out);
    });

    // validate
    std::string level = "fast";
    bool inject_ml_fault = false;
    std::int64_t mc_paths = 20000;
    std::uint64_t mc_seed = 1;
    auto* validate = app.add_subcommand(
        "validate", "Run the cross-check suite and print a JSON report");
    validate->add_option("level", level, "fast skips Monte Carlo; full runs it")
        ->check(CLI::IsMember({"fast", "full"}));
    auto* seed_opt = validate->add_option(
        "--seed", mc_seed, "Monte Carlo seed (required for level full)");
    validate->add_option("--paths", mc_paths,
                         "Monte Carlo paths per check (default 20000)");
    validate->add_flag(
        "--inject-ml-fault", inject_ml_fault,
        "diagnostic: corrupt the Mittag-Leffler switch radii first to "
        "demonstrate the suite reports the misrouting as a failing check");
    validate->callback([&] {
        if (level == "full" && seed_opt->count() == 0)
            throw CLI::RequiredError("validate full: --seed");
        exit_code = run_validate(level, inject_ml_fault, mc_paths, mc_seed);
    });

    // simulate
    double sim_beta = 0.5, sim_alpha = 1.0, sim_horizon = 1.0;
    int sim_d = 1, sim_steps = 256;
    std::int64_t sim_paths = 0;
    std::uint64_t sim_seed = 0;
    std::string sim_out = "ensemble.bin";
    auto* simulate = app.add_subcommand(
        "simulate",
        "Sample a path ensemble, write it to disk, and print a summary");
    simulate->add_option("--beta", sim_beta, "beta in (0, 1]")->required();
    simulate->add_option("--alpha", sim_alpha, "alpha in (0, 2)")->required();
    simulate->add_option("--d", sim_d, "spatial dimension (default 1)");
    simulate->add_option("--steps", sim_steps, "time steps (default 256)");
    simulate->add_option("--horizon", sim_horizon, "time horizon (default 1)");
    simulate->add_option("--paths", sim_paths, "number of paths")->required();
    simulate->add_option("--seed", sim_seed, "RNG seed")->required();
    simulate->add_option("--out", sim_out,
                         "ensemble output path (default ensemble.bin)");
    simulate->callback([&] {
        ggbm::SimConfig cfg;
        cfg.params = ggbm::GgbmParams(sim_beta, sim_alpha);
        cfg.d = sim_d;
        cfg.n_steps = sim_steps;
        cfg.horizon = sim_horizon;
        cfg.n_paths = sim_paths;
        cfg.seed = sim_seed;
        exit_code = run_simulate(cfg, sim_out);
    });

    // formfactor
    std::vector<double> ff_k;
    double ff_n = 0.0, ff_beta = 0.0, ff_alpha = 0.0;
    std::string ff_mc;
    auto* formfactor = app.add_subcommand(
        "formfactor",
        "Analytic form factor S(k), optionally cross-checked against a "
        "sampled ensemble");
    formfactor->add_option("--k", ff_k, "wave-vector components")
        ->required()
        ->expected(-1);
    auto* n_opt = formfactor->add_option(
        "--n", ff_n, "chain length (defaults to the ensemble horizon)");
    formfactor->add_option("--beta", ff_beta, "beta in (0, 1]")->required();
    formfactor->add_option("--alpha", ff_alpha, "alpha in (0, 2)")->required();
    formfactor->add_option("--mc", ff_mc,
                           "ensemble file for the Monte Carlo comparison");
    formfactor->callback([&] {
        exit_code = run_formfactor(ff_k, ff_n, n_opt->count() > 0, ff_beta,
                                   ff_alpha, ff_mc);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitDomain;
    } catch (const ggbm::ConvergenceError& e) {
        return fail(kExitDomain, e.what());
    } catch (const std::domain_error& e) {
        return fail(kExitDomain, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(kExitDomain, e.what());
    } catch (const std::exception& e) {
        return fail(kExitIo, e.what());
    }
    return exit_code;
}
