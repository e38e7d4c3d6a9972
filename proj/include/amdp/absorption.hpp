#pragma once

#include "amdp/bellman.hpp"
#include "amdp/model.hpp"
#include "amdp/sequence.hpp"
#include "amdp/strategy.hpp"

#include <functional>
#include <string>
#include <vector>

namespace amdp {

/// sup over all first-n decision rules of E[terminal(X_n)], by n-step
/// backward induction on states 0..window (terminal beyond the window is 0).
double sup_expected_terminal(const ValidatedModel& model, const StateMass& start, int n,
                             const std::function<double(State)>& terminal, State window);

/// sup over all strategies of E[sum_{t >= n} 1{X_t != 0}], computed as
/// sup E[w*(X_n)] with w* from sup_hitting on a window that keeps every
/// state reachable in n epochs at least `margin` below its bound.
double exact_sup_tail(const ValidatedModel& model, const InitialDistribution& init, int n,
                      const SolverOptions& opts = {});

struct IdentityGate {
    int horizon = 0;
    std::size_t strategies = 0;  ///< deterministic Markov strategies enumerated
    double max_deviation = 0.0;
};

/// Checks sup_pi E[sum_{t=n}^H 1{X_t != 0}] = sup E[W_{H-n}(X_n)] on a
/// 3-state, 2-action cyclic model by enumerating every deterministic Markov
/// strategy of the given horizon, for each n in 0..H and each start state.
IdentityGate tail_identity_gate(int horizon = 4);

enum class TailVerdict { uniformly_absorbing_up_to_horizon, not_uniformly_absorbing_witnessed };

struct TailRow {
    int n = 0;
    double family_sup_tail = 0.0;
    int argmax_member = 0;
    double exact_sup_tail = 0.0;
};

struct TailProfile {
    std::vector<TailRow> rows;
    TailTrend trend;  ///< of family_sup_tail over the second half of the range
    TailVerdict verdict = TailVerdict::uniformly_absorbing_up_to_horizon;
};

/// For each n in [n_lo, n_hi]: the largest tail over the family members and
/// the exact supremum. The verdict is "witnessed" when the family tail keeps
/// a positive floor over the second half of the range.
TailProfile uniform_tail_profile(const ValidatedModel& model, const InitialDistribution& init,
                                 const StrategyFamily& family, int n_lo, int n_hi,
                                 const SolverOptions& opts = {});

struct LyapunovCandidate {
    std::function<double(State)> mu;
    std::string name;
};

/// mu(0) = 1, mu(x) = 2 + 2^x.
LyapunovCandidate mu_pow2_plus2();
/// mu(0) = 1, mu(x) = 2^x.
LyapunovCandidate mu_pow2();

enum class LyapunovVerdict { passes_up_to_horizon, fails_a, fails_c_witnessed };

struct SlackEntry {
    State state;
    Action action;
    double slack;  ///< mu(x) - 1 - sum_{y >= 1} p(y|x,a) mu(y)
};

struct ConditionCSequence {
    std::string strategy;
    State start;
    std::vector<double> values;  ///< e_t = E[mu(X_t) 1{tau_0 > t}], t = 0..T
    TailTrend trend;
    bool witnessed = false;      ///< nonvanishing floor sustained
};

struct LyapunovReport {
    std::vector<SlackEntry> condition_a;
    double min_slack = 0.0;
    std::string condition_b = "automatic: finite action set";
    std::vector<ConditionCSequence> condition_c;
    /// Initial state 0 was requested and skipped (tau_0 differs from T_0 there).
    bool skipped_zero = false;
    LyapunovVerdict verdict = LyapunovVerdict::passes_up_to_horizon;
};

/// Checks condition (a) on states 1..window, reports (b) as automatic, and
/// computes the condition (c) sequences for every (strategy, start state).
LyapunovReport lyapunov_verify(const ValidatedModel& model, const LyapunovCandidate& mu,
                               const std::vector<Strategy>& strategies,
                               const std::vector<State>& states, int horizon, State window);

/// Least function >= 1 satisfying condition (a) on 1..window, with mu = 1
/// beyond the window. Every candidate satisfying (a) dominates it there.
ValueWindow minimal_condition_a(const ValidatedModel& model, const SolverOptions& opts = {});

const char* to_string(TailVerdict v);
const char* to_string(LyapunovVerdict v);

} // namespace amdp
