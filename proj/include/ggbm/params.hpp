#pragma once

#include <stdexcept>
#include <string>

namespace ggbm {

/// Thrown when an evaluator cannot reach its accuracy gate.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter pair of the process B^{beta,alpha}.
///
/// beta in (0,1] controls the non-Gaussian mixing (beta=1: Gaussian),
/// alpha in (0,2) controls the variance growth t^alpha (Hurst index alpha/2).
/// Special families: beta=alpha=1 Brownian motion, beta=1 fractional Brownian
/// motion, alpha=beta grey Brownian motion.
struct GgbmParams {
    double beta;
    double alpha;

    GgbmParams(double beta_, double alpha_) : beta(beta_), alpha(alpha_) { validate(); }

    double hurst() const { return 0.5 * alpha; }

    bool is_gaussian() const { return beta == 1.0; }
    bool is_grey() const { return alpha == beta; }

    void validate() const {
        if (!(beta > 0.0) || !(beta <= 1.0))
            throw std::domain_error("GgbmParams: beta must be in (0, 1], got " +
                                    std::to_string(beta));
        if (!(alpha > 0.0) || !(alpha < 2.0))
            throw std::domain_error("GgbmParams: alpha must be in (0, 2), got " +
                                    std::to_string(alpha));
    }
};

} // namespace ggbm
