#pragma once

#include <cstddef>
#include <span>

namespace amdp {

/// Aitken delta-squared estimate of the limit of a sequence from its last
/// three terms. Falls back to the last term when the differences do not
/// contract geometrically.
double aitken_limit(std::span<const double> seq);

/// How the second half of a nonnegative sequence behaves.
struct TailTrend {
    std::size_t from = 0;  ///< first index of the inspected range
    std::size_t to = 0;    ///< last index of the inspected range
    double floor = 0.0;    ///< min over the range
    double limit = 0.0;    ///< extrapolated limit (Aitken), or the last term
    bool nondecreasing = false;
    /// floor > abs_min and the sequence is nondecreasing or extrapolates to
    /// at least half its floor.
    bool sustained = false;
};

/// Inspects the second half of `magnitudes` (values expected >= 0).
TailTrend tail_trend(std::span<const double> magnitudes, double abs_min = 1e-9);

} // namespace amdp
