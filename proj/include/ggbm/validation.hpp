#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ggbm {

/// One row of the validation report. `observed` is the worst metric the
/// check measured (relative error, absolute difference, or |z|-score but
/// always "smaller is better"), `limit` the threshold it was held to.
struct CheckResult {
    std::string name;
    bool passed;
    double observed;
    double limit;
    std::string detail;
};

struct ValidationOptions {
    /// false = fast mode (analytic cross-checks only), true adds the
    /// Monte Carlo suite.
    bool include_mc = false;
    std::int64_t mc_paths = 20000;
    std::uint64_t mc_seed = 1;
};

/// Runs the cross-check matrix: reference values and closed forms for the
/// Mittag-Leffler evaluator, family consistency of the Debye evaluators,
/// series vs quadrature vs double integral, the Euler-transform identity
/// grid, tail asymptote constants, radius identities, the small-beta limit
/// curves, and (in full mode) Monte Carlo law checks. A check that throws
/// is reported as failed with the exception text.
std::vector<CheckResult> run_validation(const ValidationOptions& opts);

bool all_passed(const std::vector<CheckResult>& results);

} // namespace ggbm
