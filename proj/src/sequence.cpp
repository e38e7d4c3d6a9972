#include "amdp/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace amdp {

namespace {

// A step at the rounding resolution of the values carries no trend.
bool settled(double d, double value) {
    return std::fabs(d) <= 8.0 * std::numeric_limits<double>::epsilon() * std::fabs(value);
}

} // namespace

double aitken_limit(std::span<const double> seq) {
    if (seq.empty()) return 0.0;
    const std::size_t n = seq.size();
    if (n < 3) return seq[n - 1];
    const double s0 = seq[n - 3], s1 = seq[n - 2], s2 = seq[n - 1];
    const double d1 = s1 - s0, d2 = s2 - s1;
    if (d2 == 0.0 || settled(d2, s2)) return s2;
    const double ratio = d2 / d1;
    if (!(std::fabs(ratio) < 1.0) || !std::isfinite(ratio)) return s2;
    // s2 + d2 * ratio / (1 - ratio), written to stay exact for dyadic sequences.
    return s2 - d2 * d2 / (d2 - d1);
}

TailTrend tail_trend(std::span<const double> magnitudes, double abs_min) {
    TailTrend out;
    if (magnitudes.empty()) return out;
    const std::size_t n = magnitudes.size();
    out.from = n / 2;
    out.to = n - 1;
    const auto tail = magnitudes.subspan(out.from);
    out.floor = *std::min_element(tail.begin(), tail.end());
    out.nondecreasing = std::is_sorted(tail.begin(), tail.end());
    out.limit = out.nondecreasing ? tail.back() : aitken_limit(tail);
    if (!out.nondecreasing && tail.size() >= 3) {
        // A strictly shrinking sequence whose differences do not contract has
        // no positive limit certificate.
        const double d1 = tail[tail.size() - 2] - tail[tail.size() - 3];
        const double d2 = tail.back() - tail[tail.size() - 2];
        if (d1 != 0.0 && !settled(d2, tail.back()) && !(std::fabs(d2 / d1) < 1.0))
            out.limit = -HUGE_VAL;
    }
    out.sustained = out.floor > abs_min && (out.nondecreasing || out.limit >= 0.5 * out.floor);
    return out;
}

} // namespace amdp
