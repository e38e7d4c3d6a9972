#include "amdp/strategy.hpp"

#include "amdp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace amdp {

ActionDistribution ActionDistribution::make(std::vector<std::pair<Action, double>> probs) {
    std::sort(probs.begin(), probs.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (i > 0 && probs[i].first == probs[i - 1].first)
            throw InvalidArgument("action " + std::to_string(probs[i].first) + " listed twice");
        if (!(probs[i].second >= 0.0 && probs[i].second <= 1.0))
            throw InvalidArgument("action probability outside [0,1]");
        sum += probs[i].second;
    }
    if (std::fabs(sum - 1.0) > kRowSumTol)
        throw InvalidArgument("action distribution sums to " + std::to_string(sum));
    std::erase_if(probs, [](const auto& p) { return p.second == 0.0; });
    return ActionDistribution{std::move(probs)};
}

double ActionDistribution::sum() const {
    double s = 0.0;
    for (const auto& [a, p] : probs) s += p;
    return s;
}

double ActionDistribution::prob(Action a) const {
    for (const auto& [b, p] : probs)
        if (b == a) return p;
    return 0.0;
}

Strategy Strategy::deterministic(std::function<Action(State)> rule, std::string name) {
    return Strategy(DeterministicStationary{std::move(rule)}, std::move(name));
}

Strategy Strategy::randomized(std::function<ActionDistribution(State)> rule, std::string name) {
    return Strategy(RandomizedStationary{std::move(rule)}, std::move(name));
}

Strategy Strategy::markov(std::function<ActionDistribution(int, State)> rule, std::string name) {
    return Strategy(Markov{std::move(rule), 0}, std::move(name));
}

ActionDistribution Strategy::at(int t, State x) const {
    if (t < 1) throw InvalidArgument("decision epochs start at t = 1");
    if (x == kAbsorbing) return ActionDistribution::point(kAbsorbingAction);
    return std::visit(
        [&](const auto& k) -> ActionDistribution {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, DeterministicStationary>)
                return ActionDistribution::point(k.rule(x));
            else if constexpr (std::is_same_v<K, RandomizedStationary>)
                return k.rule(x);
            else
                return k.rule(t + k.offset, x);
        },
        kind_);
}

Action Strategy::action(State x) const {
    const auto* d = std::get_if<DeterministicStationary>(&kind_);
    if (!d) throw InvalidArgument("strategy " + name_ + " is not deterministic stationary");
    if (x == kAbsorbing) return kAbsorbingAction;
    return d->rule(x);
}

Strategy threshold_strategy(int n) {
    if (n < 0) throw InvalidArgument("threshold index must be >= 0");
    const State bound = static_cast<State>(n);
    return Strategy::deterministic([bound](State x) -> Action { return x <= bound ? 2 : 1; },
                                   "phi:" + std::to_string(n));
}

Strategy all_two_strategy() {
    return Strategy::deterministic([](State) -> Action { return 2; }, "all2");
}

Strategy stationary_table(std::map<State, Action> table, Action default_action) {
    return Strategy::deterministic(
        [table = std::move(table), default_action](State x) {
            const auto it = table.find(x);
            return it == table.end() ? default_action : it->second;
        },
        "table");
}

Strategy shift_strategy(const Strategy& pi, State, Action) {
    if (pi.is_stationary()) return pi;
    Strategy shifted = pi;
    auto& m = std::get<Strategy::Markov>(shifted.kind_);
    ++m.offset;
    return shifted;
}

ActionDistribution action_distribution(const Strategy& pi, int t, State x) { return pi.at(t, x); }

void check_strategy_actions(const ValidatedModel& model, const ActionDistribution& d) {
    for (const auto& [a, p] : d.probs)
        if (!model.has_action(a))
            throw InvalidArgument("strategy uses action " + std::to_string(a) +
                                  " outside the model's action set");
}

Strategy StrategyFamily::at(int n) const {
    if (n < lo || n > hi)
        throw InvalidArgument("family index " + std::to_string(n) + " outside [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return generator(n);
}

StrategyFamily threshold_family(int lo, int hi) {
    if (lo < 0 || hi < lo) throw InvalidArgument("bad threshold family range");
    return StrategyFamily{lo, hi, [](int n) { return threshold_strategy(n); }, "phi"};
}

StrategyFamily constant_family(const Strategy& pi, int lo, int hi) {
    if (hi < lo) throw InvalidArgument("bad family range");
    return StrategyFamily{lo, hi, [pi](int) { return pi; }, "const:" + pi.name()};
}

} // namespace amdp
