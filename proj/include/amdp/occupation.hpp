#pragma once

#include "amdp/model.hpp"
#include "amdp/strategy.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>

namespace amdp {

/// Expected state-action visit counts on (X \ {0}) x A.
struct OccupationMeasure {
    std::map<std::pair<State, Action>, double> entries;
    double total_mass = 0.0;
    /// Upper bound on occupation not attributed because of truncation.
    /// +inf when no bound is available (then `bound_certified` is false).
    double unresolved_bound = 0.0;
    bool bound_certified = true;
    bool non_absorbing_warning = false;
    /// Initial mass dropped by truncating an infinite-support initial law.
    double init_deficit = 0.0;
    /// Forward pass: epochs accumulated. Stationary solve: window size used.
    long steps = 0;
    /// Forward pass: mass still on X \ {0} after the last epoch.
    double surviving_mass = 0.0;

    double at(State x, Action a) const;
    /// eta(x) = eta({x} x A).
    double marginal(State x) const;
};

struct ForwardOptions {
    long horizon_cap = 1'000'000;
    /// Stop once the certified remaining occupation falls below this; 0
    /// disables early stopping (the pass then runs exactly horizon_cap epochs).
    double tail_tol = 1e-12;
    /// Number of epochs over which the decay ratio of surviving mass is observed.
    int decay_window = 16;
    /// Bound on expected remaining occupation per unit of surviving mass,
    /// used when the pass stops at horizon_cap.
    std::optional<double> continuation_bound;
};

struct StationaryOptions {
    /// States 1..window are solved for; 0 picks the window automatically.
    State window = 0;
    /// Largest automatic window tried.
    State max_window = 1 << 14;
    double leak_tol = 1e-12;
    double solver_tol = 1e-13;
    long max_sweeps = 100'000;
    std::optional<double> continuation_bound;
};

/// Accumulates m_{t-1}(x) pi_t(a|x) over t = 1..T.
OccupationMeasure occupation_forward(const ValidatedModel& model, const Strategy& pi,
                                     const InitialDistribution& init, const ForwardOptions& opts = {});

/// Same, from an explicit sub-probability `start` at epoch 1 of `pi`.
OccupationMeasure occupation_forward_from(const ValidatedModel& model, const Strategy& pi,
                                          const StateMass& start, const ForwardOptions& opts = {});

/// Solves eta = nu + eta P_pi on the states reachable under pi inside the
/// window, by Gauss-Seidel with self-loop elimination, then splits by the
/// action kernel. Throws TruncationLeak if more than leak_tol mass leaves
/// the window.
OccupationMeasure occupation_stationary(const ValidatedModel& model, const Strategy& pi,
                                        const InitialDistribution& init,
                                        const StationaryOptions& opts = {});

OccupationMeasure occupation_stationary_from(const ValidatedModel& model, const Strategy& pi,
                                             const StateMass& start,
                                             const StationaryOptions& opts = {});

/// Stationary solve for stationary strategies, forward pass otherwise.
OccupationMeasure occupation(const ValidatedModel& model, const Strategy& pi,
                             const InitialDistribution& init);

/// A bounded function of (state, action) with its declared sup-norm bound.
struct Integrand {
    std::function<double(State, Action)> g;
    double bound = 1.0;
    std::string name;
};

Integrand constant_integrand(double value);
/// d^j(x, a) = 1{x = j}.
Integrand state_indicator(State j);
/// 1{x = j, a = b}.
Integrand pair_indicator(State j, Action b);

/// A value with an error bar; `certified` is false when the bar is the
/// +inf sentinel or rests on an uncertified continuation estimate.
struct BoundedValue {
    double value = 0.0;
    double error_bound = 0.0;
    bool certified = true;
};

/// sum g(x,a) eta(x,a), error bar bound * unresolved_bound.
BoundedValue integrate(const OccupationMeasure& eta, const Integrand& g);

/// E[T_0] = total mass of the occupation measure. For truncated initial
/// laws the dropped mass is not included; see OccupationMeasure::init_deficit.
BoundedValue expected_hitting_time(const ValidatedModel& model, const Strategy& pi,
                                   const InitialDistribution& init);

/// One epoch of the state process under pi_t, restricted to X \ {0}.
StateMass step_distribution(const ValidatedModel& model, const Strategy& pi, const StateMass& m,
                            int t);

/// E[sum_{t >= n} 1{X_t != 0}]: propagates n epochs, then takes the expected
/// hitting time of the surviving sub-distribution under the n-times shifted
/// strategy.
BoundedValue tail_mass_from(const ValidatedModel& model, const Strategy& pi,
                            const InitialDistribution& init, int n);

/// Occupation accumulated from epoch n+1 on: sum_{t > n} P(X_{t-1}, A_t).
OccupationMeasure tail_occupation(const ValidatedModel& model, const Strategy& pi,
                                  const InitialDistribution& init, int n);

/// Mass of the finite initial support on X \ {0}.
StateMass transient_part(const InitSupport& s);

} // namespace amdp
