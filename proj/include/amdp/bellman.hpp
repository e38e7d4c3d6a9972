#pragma once

#include "amdp/model.hpp"
#include "amdp/occupation.hpp"
#include "amdp/strategy.hpp"

#include "amdp/numeric.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace amdp {

/// Running cost c(x, a). The cemetery is costless: c(0, .) = 0 regardless of
/// the evaluator.
struct CostFunction {
    std::function<double(State, Action)> evaluator;
    /// sup |c| over transient pairs; +inf when unbounded or unknown.
    double bound = kInf;
    std::string name;

    double operator()(State x, Action a) const { return x == kAbsorbing ? 0.0 : evaluator(x, a); }
    double positive(State x, Action a) const { return std::max((*this)(x, a), 0.0); }
    double negative(State x, Action a) const { return std::max(-(*this)(x, a), 0.0); }
    Integrand as_integrand() const;
};

/// c(x, a) = value for x >= 1.
CostFunction constant_cost(double value);

/// Default distance kept between evaluated states and the window bound.
inline constexpr State kDefaultMargin = 40;

/// A value function on states 0..window.
struct ValueWindow {
    State window = 0;
    std::vector<double> values;  ///< index = state
    std::string boundary_policy;
    double residual = 0.0;       ///< last-sweep max relative change
    long sweeps = 0;
    /// Iterates moved monotonically away from the start value (nondecreasing
    /// for maximisation of nonnegative rewards, nonincreasing for
    /// minimisation of nonpositive costs).
    bool monotone = true;

    double at(State x) const;
};

struct SolverOptions {
    State window = 60;
    double tol = 1e-14;
    long max_sweeps = 100'000;
    State margin = kDefaultMargin;
    /// States the caller will read; each must satisfy x + margin <= window.
    std::vector<State> eval;
};

/// Minimal nonnegative solution of
///   w(x) = max_a [1 + sum_{y != 0} p(y|x,a) w(y)],  w(0) = 0,
/// on 1..window with w = 0 beyond it, via Gauss-Seidel with self-loop
/// elimination starting from w = 0.
ValueWindow sup_hitting(const ValidatedModel& model, const SolverOptions& opts = {});

/// Same scheme with min over actions and c(x,a) in place of 1. Requires c to
/// be sign-definite on the window.
ValueWindow inf_cost(const ValidatedModel& model, const CostFunction& c,
                     const SolverOptions& opts = {});

/// integrate(occupation(pi, init), c).
BoundedValue policy_value(const ValidatedModel& model, const Strategy& pi, const CostFunction& c,
                          const InitialDistribution& init);

/// Residual v(x) - c(x,a) - sum_y p(y|x,a) v(y), compensated.
double bellman_residual(const ValidatedModel& model, const CostFunction& c,
                        const std::function<double(State)>& v, State x, Action a);

enum class DubinsSavageVerdict { satisfied_up_to_horizon, violated };

struct DubinsSavageReport {
    std::map<State, double> residuals;  ///< first equality, per checked state
    double max_abs_residual = 0.0;
    std::vector<double> expectations;   ///< e_n = E^phi_x[v*(X_n)], n = 0..N
    double floor = 0.0;                 ///< min |e_n| over the witnessed range
    double limit = 0.0;                 ///< extrapolated limit of e_n
    std::size_t witness_from = 0, witness_to = 0;
    DubinsSavageVerdict verdict = DubinsSavageVerdict::satisfied_up_to_horizon;
};

DubinsSavageReport dubins_savage_check(const ValidatedModel& model, const Strategy& phi,
                                       const CostFunction& c, const ValueWindow& vstar, State x,
                                       int horizon, State margin = kDefaultMargin);

struct GaResult {
    double value = 0.0;        ///< +inf when divergence is witnessed
    bool diverges = false;
    double growth_rate = 0.0;  ///< ratio of the last two terms of the init sum
    double error_bound = 0.0;  ///< bound on the truncated part when finite
    /// Partial sums of sum_i P0(i) W(i) over the (truncated) support.
    std::vector<double> partial_sums;
    ValueWindow values;        ///< W = sup-Bellman values for running cost c^-
};

/// sup_pi E[sum_t c^-(X_{t-1}, A_t)] integrated against init.
GaResult condition_ga(const ValidatedModel& model, const CostFunction& c,
                      const InitialDistribution& init, const SolverOptions& opts = {});

/// Upper bound on inf_{N >= n} inf_pi sum_{t=n+1}^N E[c(X_{t-1}, A_t)] from
/// family member n. For c <= 0 the block sums decrease in N, so the bound is
/// the whole tail cost of that member after epoch n.
BoundedValue condition_c_witness(const ValidatedModel& model, const CostFunction& c,
                                 const InitialDistribution& init, const StrategyFamily& family,
                                 int n);

const char* to_string(DubinsSavageVerdict v);

} // namespace amdp

namespace amdp::detail {

enum class Sense { maximize, minimize };

/// One-step problem solved on a state window by the monotone Gauss-Seidel
/// scheme shared by the Bellman and Lyapunov solvers.
struct WindowProblem {
    std::function<double(State, Action)> reward;
    Sense sense = Sense::maximize;
    double boundary_value = 0.0;  ///< value assumed for states beyond the window
    double floor = -kInf;         ///< lower clamp applied to every update
    double start_value = 0.0;     ///< initial iterate on 1..window
    double value_at_zero = 0.0;
    std::string boundary_policy;
};

ValueWindow solve_window(const ValidatedModel& model, const WindowProblem& problem,
                         const SolverOptions& opts);

} // namespace amdp::detail
