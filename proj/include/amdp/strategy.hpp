#pragma once

#include "amdp/model.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace amdp {

/// Action taken at the absorbing state by every strategy. It affects no
/// computed quantity.
inline constexpr Action kAbsorbingAction = 1;

/// Sparse action kernel pi_t(.|x), sorted by action.
struct ActionDistribution {
    std::vector<std::pair<Action, double>> probs;

    static ActionDistribution point(Action a) { return {{{a, 1.0}}}; }
    /// Throws InvalidArgument unless probabilities lie in [0,1] and sum to 1
    /// within 1e-12. Sorts and drops zero entries.
    static ActionDistribution make(std::vector<std::pair<Action, double>> probs);

    double sum() const;
    double prob(Action a) const;
    bool operator==(const ActionDistribution&) const = default;
};

class Strategy {
public:
    struct DeterministicStationary {
        std::function<Action(State)> rule;
    };
    struct RandomizedStationary {
        std::function<ActionDistribution(State)> rule;
    };
    /// Kernels indexed by decision epoch t >= 1; `offset` counts shifts.
    struct Markov {
        std::function<ActionDistribution(int, State)> rule;
        int offset = 0;
    };
    using Kind = std::variant<DeterministicStationary, RandomizedStationary, Markov>;

    static Strategy deterministic(std::function<Action(State)> rule, std::string name);
    static Strategy randomized(std::function<ActionDistribution(State)> rule, std::string name);
    static Strategy markov(std::function<ActionDistribution(int, State)> rule, std::string name);

    const Kind& kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool is_stationary() const { return !std::holds_alternative<Markov>(kind_); }
    bool is_deterministic() const { return std::holds_alternative<DeterministicStationary>(kind_); }

    /// pi_t(.|x); t >= 1.
    ActionDistribution at(int t, State x) const;

    /// phi(x) for deterministic stationary strategies.
    Action action(State x) const;

private:
    Strategy(Kind k, std::string name) : kind_(std::move(k)), name_(std::move(name)) {}
    friend Strategy shift_strategy(const Strategy&, State, Action);

    Kind kind_;
    std::string name_;
};

/// phi^n(x) = 2 for 1 <= x <= n, 1 for x > n.
Strategy threshold_strategy(int n);

/// phi(x) = 2 for every x >= 1.
Strategy all_two_strategy();

/// Deterministic stationary strategy from an explicit table with a fallback.
Strategy stationary_table(std::map<State, Action> table, Action default_action);

/// The shifted strategy after the first step (z, b). Stationary strategies
/// are returned unchanged; Markov kernels are re-indexed t -> t+1. The pair
/// (z, b) is not read by these classes.
Strategy shift_strategy(const Strategy& pi, State z, Action b);

ActionDistribution action_distribution(const Strategy& pi, int t, State x);

/// Throws InvalidArgument if pi_t(.|x) uses an action the model lacks.
void check_strategy_actions(const ValidatedModel& model, const ActionDistribution& d);

struct StrategyFamily {
    int lo = 0;
    int hi = 0;
    std::function<Strategy(int)> generator;
    std::string name;

    Strategy at(int n) const;
};

/// {phi^n : lo <= n <= hi}.
StrategyFamily threshold_family(int lo, int hi);

/// Family whose every member is `pi`.
StrategyFamily constant_family(const Strategy& pi, int lo, int hi);

} // namespace amdp
