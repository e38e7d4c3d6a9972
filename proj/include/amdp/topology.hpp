#pragma once

#include "amdp/model.hpp"
#include "amdp/occupation.hpp"
#include "amdp/strategy.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amdp {

/// A trajectory prefix (x0, a1, x1, ..., aT, xT).
using Path = std::vector<std::uint64_t>;

/// The marginal of a strategic measure on length-T prefixes.
struct PrefixMeasure {
    int horizon = 0;
    std::map<Path, double> paths;
    double pruned_mass = 0.0;
    double epsilon_path = 0.0;

    double total() const;
};

struct PrefixOptions {
    /// Paths whose probability drops below this are pruned (0 = exact).
    double epsilon_path = 0.0;
    std::size_t max_paths = 1'000'000;
};

/// Depth-first enumeration of all positive-probability prefixes. Throws
/// SupportExplosion when more than max_paths prefixes are produced.
PrefixMeasure prefix_measure(const ValidatedModel& model, const Strategy& pi,
                             const InitialDistribution& init, int horizon,
                             const PrefixOptions& opts = {});

/// Half the L1 distance over the union of supports, plus half of each
/// measure's pruned mass. Throws HorizonMismatch.
double prefix_tv_distance(const PrefixMeasure& p, const PrefixMeasure& q);

/// Drops the last (a, x) pair of every prefix.
PrefixMeasure marginalize_last(const PrefixMeasure& p);

/// sum_{t=1}^T P(X_{t-1} = x, A_t = a), excluding x = 0.
OccupationMeasure occupation_from_prefix(const PrefixMeasure& p);

using TestFunction = Integrand;

/// d = 1, d^j for j <= max_j, and pair indicators 1{x = j, a = b} for
/// j <= max_j and every model action b.
std::vector<TestFunction> default_tests(const ValidatedModel& model, State max_j);

enum class WeakVerdict { converged_to_candidate, diverges_from_candidate, inconclusive };

struct WeakTestResult {
    std::string test;
    std::vector<double> integrals;
    double candidate = 0.0;
    double oscillation = 0.0;    ///< max - min of the integrals over the last half
    double max_deviation = 0.0;  ///< over the last half
    double min_deviation = 0.0;  ///< over the last half
    WeakVerdict verdict = WeakVerdict::inconclusive;
};

struct WeakLimitReport {
    std::vector<WeakTestResult> tests;
    bool all_converged = false;
    std::optional<std::string> witness;  ///< first test that diverges
};

/// Per test: converged when the last-half deviation never exceeds tol,
/// diverges when it stays above 10 * tol over the whole last half.
WeakLimitReport weak_limit_report(const std::vector<OccupationMeasure>& sequence,
                                  const OccupationMeasure& candidate,
                                  const std::vector<TestFunction>& tests, double tol);

struct DiscontinuityCertificate {
    std::string family;
    std::string limit_strategy;
    int tv_family_index = 0;
    std::vector<std::pair<int, double>> tv_distances;  ///< (T, TV)
    std::string test;
    std::vector<std::pair<int, double>> integrals;     ///< (n, integral of test)
    double limit_integral = 0.0;   ///< integral under the limit strategy
    double sequence_limit = 0.0;   ///< extrapolated limit of the integrals
    double gap = 0.0;              ///< |sequence_limit - limit_integral|
    double gap_floor = 0.0;        ///< min deviation over the last half
    double tol = 0.0;
    bool valid = false;
    std::string note;
};

/// Strategic-measure convergence evidence (prefix TV at each T for family
/// member max(T_list)) together with occupation non-convergence evidence
/// (integral gap over the family's index range).
DiscontinuityCertificate discontinuity_witness(const ValidatedModel& model,
                                               const StrategyFamily& family,
                                               const Strategy& limit,
                                               const InitialDistribution& init,
                                               const std::vector<int>& horizons,
                                               const TestFunction& test, double tol);

const char* to_string(WeakVerdict v);

} // namespace amdp
