#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

#include "ggbm/params.hpp"

// Adaptive panel integration on a 7-15 Gauss-Kronrod pair. Internal engine
// behind both the public quadrature API and the spectral Mittag-Leffler
// route; kept header-only so both translation units share one definition.

namespace ggbm::detail {

struct PanelResult {
    double kronrod;
    double gauss;
    double resabs;  // integral of |f|
    double resasc;  // integral of |f - mean|, for error scaling
};

// QUADPACK dqk15 abscissae/weights on [-1, 1].
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639207, 0.949107912342758524526, 0.864864423359769072790,
    0.741531185599394439864, 0.586087235467691130294, 0.405845151377397166907,
    0.207784955007898467601, 0.0,
};
inline constexpr double kGk15WeightsK[8] = {
    0.022935322010529224964, 0.063092092629978553291, 0.104790010322250183840,
    0.140653259715525918745, 0.169004726639267902827, 0.190350578064785409913,
    0.204432940075298892414, 0.209482141084727828013,
};
inline constexpr double kGauss7Weights[4] = {
    0.129484966168869693271, 0.279705391489276667901, 0.381830050505118944950,
    0.417959183673469387755,
};

template <typename F>
PanelResult gk15_panel(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kGk15Nodes[i]);
        fv[14 - i] = f(c + h * kGk15Nodes[i]);
    }
    fv[7] = f(c);

    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        resk += kGk15WeightsK[i] * (fv[i] + fv[14 - i]);
        resabs += kGk15WeightsK[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    resk += kGk15WeightsK[7] * fv[7];
    resabs += kGk15WeightsK[7] * std::abs(fv[7]);
    for (int i = 0; i < 4; ++i) {
        // Gauss-7 nodes are the odd-index Kronrod abscissae.
        if (i < 3)
            resg += kGauss7Weights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
        else
            resg += kGauss7Weights[3] * fv[7];
    }

    const double mean = 0.5 * resk;
    double resasc = kGk15WeightsK[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kGk15WeightsK[i] *
                  (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));

    return {resk * h, resg * h, resabs * std::abs(h), resasc * std::abs(h)};
}

inline double gk15_panel_error(const PanelResult& p) {
    double err = std::abs(p.kronrod - p.gauss);
    if (p.resasc != 0.0 && err != 0.0) {
        const double scaled = std::pow(200.0 * err / p.resasc, 1.5);
        err = p.resasc * std::min(1.0, scaled);
    }
    const double eps_floor = 50.0 * 2.2204460492503131e-16 * p.resabs;
    return std::max(err, eps_floor);
}

struct AdaptiveResult {
    double value;
    double abs_error;
    int panels;
    bool converged;
};

/// Adaptive refinement over an initial mesh: repeatedly bisect the panel with
/// the largest error estimate until sum(err) <= max(abs_tol, rel_tol*|value|)
/// or the panel budget is exhausted.
template <typename F>
AdaptiveResult integrate_adaptive_mesh(const F& f, const std::vector<double>& mesh,
                                       double rel_tol, double abs_tol,
                                       int max_panels) {
    struct Panel {
        double a, b, value, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0;
    int n_panels = 0;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i) {
        const PanelResult pr = gk15_panel(f, mesh[i], mesh[i + 1]);
        const double e = gk15_panel_error(pr);
        heap.push({mesh[i], mesh[i + 1], pr.kronrod, e});
        total += pr.kronrod;
        total_err += e;
        ++n_panels;
    }
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) &&
           n_panels < max_panels && !heap.empty()) {
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // panel narrower than machine resolution; cannot refine further
            heap.push({worst.a, worst.b, worst.value, 0.0});
            total_err -= worst.err;
            continue;
        }
        const PanelResult left = gk15_panel(f, worst.a, mid);
        const PanelResult right = gk15_panel(f, mid, worst.b);
        const double el = gk15_panel_error(left);
        const double er = gk15_panel_error(right);
        total += left.kronrod + right.kronrod - worst.value;
        total_err += el + er - worst.err;
        heap.push({worst.a, mid, left.kronrod, el});
        heap.push({mid, worst.b, right.kronrod, er});
        ++n_panels;
    }
    const bool ok = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return {total, total_err, n_panels, ok};
}

/// Mesh of panel boundaries on [a, b], geometrically graded (given ratio)
/// toward `a`; `levels` grading steps, innermost boundary at a + span*ratio^levels.
inline std::vector<double> graded_mesh_toward_start(double a, double b,
                                                    double ratio, int levels) {
    std::vector<double> mesh;
    mesh.push_back(a);
    const double span = b - a;
    for (int i = levels; i >= 1; --i) mesh.push_back(a + span * std::pow(ratio, i));
    mesh.push_back(b);
    return mesh;
}

inline std::vector<double> graded_mesh_toward_end(double a, double b, double ratio,
                                                  int levels) {
    std::vector<double> mesh;
    mesh.push_back(a);
    const double span = b - a;
    for (int i = 1; i <= levels; ++i) mesh.push_back(b - span * std::pow(ratio, i));
    mesh.push_back(b);
    std::sort(mesh.begin(), mesh.end());
    return mesh;
}

} // namespace ggbm::detail
