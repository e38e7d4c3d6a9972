#include "amdp/occupation.hpp"

#include "amdp/errors.hpp"
#include "amdp/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

namespace amdp {

double OccupationMeasure::at(State x, Action a) const {
    const auto it = entries.find({x, a});
    return it == entries.end() ? 0.0 : it->second;
}

double OccupationMeasure::marginal(State x) const {
    CompensatedSum s;
    for (auto it = entries.lower_bound({x, 0}); it != entries.end() && it->first.first == x; ++it)
        s.add(it->second);
    return s.value();
}

StateMass transient_part(const InitSupport& s) {
    StateMass out;
    for (const auto& [x, m] : s.mass)
        if (x != kAbsorbing && m > 0.0) out.emplace_back(x, m);
    return out;
}

namespace {

void finalize_total(OccupationMeasure& eta) {
    CompensatedSum s;
    for (const auto& [key, m] : eta.entries) s.add(m);
    eta.total_mass = s.value();
}

// ---------------------------------------------------------------------------
// Forward pass. Rows and successor links are cached per visited state so a
// step costs no hashing once the support has been seen.

struct Node;

struct Slot {
    Action action = 0;
    bool loaded = false;
    bool used = false;
    std::vector<std::pair<Node*, double>> successors;  // excluding state 0
    CompensatedSum eta;
};

struct Node {
    State state = 0;
    std::vector<Slot> slots;  // one per model action
    bool policy_cached = false;
    std::vector<std::pair<std::size_t, double>> policy;  // (slot, probability)
};

class NodeTable {
public:
    NodeTable(const ValidatedModel& model, const Strategy& pi) : model_(model), pi_(pi) {}

    Node* get(State x) {
        auto& slot = nodes_[x];
        if (!slot) {
            slot = std::make_unique<Node>();
            slot->state = x;
            for (Action a : model_.actions()) { Slot s; s.action = a; slot->slots.push_back(std::move(s)); }
        }
        return slot.get();
    }

    Slot& load(Node& node, std::size_t i) {
        Slot& s = node.slots[i];
        if (!s.loaded) {
            for (const auto& tr : model_.row(node.state, s.action))
                if (tr.next != kAbsorbing) s.successors.emplace_back(get(tr.next), tr.prob);
            s.loaded = true;
        }
        return s;
    }

    const std::vector<std::pair<std::size_t, double>>& policy(Node& node, int t) {
        if (node.policy_cached) return node.policy;
        const ActionDistribution d = pi_.at(t, node.state);
        check_strategy_actions(model_, d);
        node.policy.clear();
        for (const auto& [a, p] : d.probs) {
            const auto acts = model_.actions();
            const auto idx = static_cast<std::size_t>(std::find(acts.begin(), acts.end(), a) - acts.begin());
            node.policy.emplace_back(idx, p);
        }
        node.policy_cached = pi_.is_stationary();
        return node.policy;
    }

    template <class F>
    void for_each_node(F&& f) const {
        for (const auto& [x, node] : nodes_) f(*node);
    }

private:
    const ValidatedModel& model_;
    const Strategy& pi_;
    std::unordered_map<State, std::unique_ptr<Node>> nodes_;
};

struct Contribution {
    State state;
    std::size_t seq;
    Node* node;
    double mass;
};

} // namespace

OccupationMeasure occupation_forward_from(const ValidatedModel& model, const Strategy& pi,
                                          const StateMass& start, const ForwardOptions& opts) {
    if (opts.horizon_cap < 1) throw InvalidArgument("horizon_cap must be >= 1");
    if (opts.decay_window < 1) throw InvalidArgument("decay_window must be >= 1");

    NodeTable table(model, pi);
    std::vector<std::pair<Node*, double>> current;
    for (const auto& [x, m] : start)
        if (x != kAbsorbing && m > 0.0) current.emplace_back(table.get(x), m);

    OccupationMeasure eta;
    const int k = opts.decay_window;
    std::vector<double> history(2 * static_cast<std::size_t>(k) + 1, 0.0);  // ring buffer of s_t
    auto hist = [&](long t) -> double& { return history[static_cast<std::size_t>(t % static_cast<long>(history.size()))]; };
    {
        double s0 = 0.0;
        for (const auto& [n, m] : current) s0 += m;
        hist(0) = s0;
        eta.surviving_mass = s0;
    }

    std::vector<Contribution> contributions;
    bool resolved = current.empty();
    long t = 0;
    while (!resolved && t < opts.horizon_cap) {
        ++t;
        contributions.clear();
        std::size_t seq = 0;
        for (const auto& [node, m] : current) {
            for (const auto& [slot_index, pa] : table.policy(*node, static_cast<int>(t))) {
                Slot& slot = table.load(*node, slot_index);
                const double mass = m * pa;
                slot.eta.add(mass);
                slot.used = true;
                for (const auto& [next, p] : slot.successors)
                    contributions.push_back({next->state, seq++, next, mass * p});
            }
        }
        if (contributions.size() > 1)
            std::sort(contributions.begin(), contributions.end(),
                      [](const Contribution& l, const Contribution& r) {
                          return l.state != r.state ? l.state < r.state : l.seq < r.seq;
                      });
        current.clear();
        double surviving = 0.0;
        for (const auto& c : contributions) {
            if (!current.empty() && current.back().first == c.node)
                current.back().second += c.mass;
            else
                current.emplace_back(c.node, c.mass);
        }
        std::erase_if(current, [](const auto& e) { return e.second == 0.0; });
        for (const auto& [n, m] : current) surviving += m;
        hist(t) = surviving;
        eta.surviving_mass = surviving;
        eta.steps = t;

        if (surviving == 0.0) {
            resolved = true;
            break;
        }
        if (opts.tail_tol > 0.0 && t >= 2 * k && t % k == 0) {
            const double s_prev2 = hist(t - 2 * k), s_prev = hist(t - k);
            if (s_prev > 0.0 && s_prev2 > 0.0) {
                // Per-epoch decay ratios over the last two windows.
                const double r_cur = std::exp(std::log(surviving / s_prev) / k);
                const double r_prev = std::exp(std::log(s_prev / s_prev2) / k);
                if (r_cur < 1.0 && r_prev < 1.0 && r_cur - r_prev <= 0.5 * (1.0 - r_cur)) {
                    const double r = std::max(r_cur, r_prev);
                    const double one_minus_r = -std::expm1(std::log(std::max(surviving / s_prev, s_prev / s_prev2)) / k);
                    const double bound = surviving * r / one_minus_r;
                    if (bound < opts.tail_tol) {
                        eta.unresolved_bound = bound;
                        resolved = true;
                    }
                }
            }
        }
    }

    if (!resolved) {
        if (opts.continuation_bound) {
            eta.unresolved_bound = eta.surviving_mass * *opts.continuation_bound;
        } else {
            eta.unresolved_bound = kInf;
            eta.bound_certified = false;
        }
        if (eta.unresolved_bound > opts.tail_tol) eta.non_absorbing_warning = true;
    }

    table.for_each_node([&](const Node& node) {
        for (const auto& slot : node.slots)
            if (slot.used) eta.entries[{node.state, slot.action}] = slot.eta.value();
    });
    finalize_total(eta);
    return eta;
}

OccupationMeasure occupation_forward(const ValidatedModel& model, const Strategy& pi,
                                     const InitialDistribution& init, const ForwardOptions& opts) {
    const InitSupport s = init.support();
    OccupationMeasure eta = occupation_forward_from(model, pi, transient_part(s), opts);
    eta.init_deficit = s.deficit;
    return eta;
}

namespace {

// ---------------------------------------------------------------------------
// Stationary balance solve on a fixed window.

struct WindowSolve {
    std::vector<State> states;
    std::vector<double> eta;  // marginal per state
    std::vector<ActionDistribution> kernels;
    double leak = 0.0;
    bool infinite = false;
};

WindowSolve solve_window(const ValidatedModel& model, const Strategy& pi, const StateMass& start,
                         State window, const StationaryOptions& opts) {
    WindowSolve ws;
    double start_leak = 0.0;
    std::unordered_map<State, std::size_t> index;
    std::vector<State> frontier;
    for (const auto& [x, m] : start) {
        if (x == kAbsorbing || m <= 0.0) continue;
        if (x > window) {
            start_leak += m;
            continue;
        }
        if (index.emplace(x, 0).second) frontier.push_back(x);
    }
    // Reachable set under pi inside the window.
    std::vector<State> order;
    std::unordered_map<State, std::vector<std::pair<State, double>>> policy_rows;
    while (!frontier.empty()) {
        const State x = frontier.back();
        frontier.pop_back();
        order.push_back(x);
        const ActionDistribution d = pi.at(1, x);
        check_strategy_actions(model, d);
        std::map<State, double> combined;
        for (const auto& [a, pa] : d.probs)
            for (const auto& tr : model.row(x, a)) combined[tr.next] += pa * tr.prob;
        auto& pr = policy_rows[x];
        for (const auto& [y, p] : combined) {
            pr.emplace_back(y, p);
            if (y != kAbsorbing && y <= window && index.emplace(y, 0).second) frontier.push_back(y);
        }
    }
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
    const std::size_t n = order.size();

    std::vector<double> nu(n, 0.0), escape(n, 0.0), leak_out(n, 0.0);
    std::vector<std::vector<std::pair<std::size_t, double>>> preds(n);
    for (const auto& [x, m] : start)
        if (x != kAbsorbing && x <= window && m > 0.0) nu[index.at(x)] += m;
    ws.kernels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const State x = order[i];
        ws.kernels.push_back(pi.at(1, x));
        CompensatedSum esc, out;
        for (const auto& [y, p] : policy_rows[x]) {
            if (y == x) continue;
            esc.add(p);
            if (y == kAbsorbing) continue;
            if (y > window)
                out.add(p);
            else
                preds[index.at(y)].emplace_back(i, p);
        }
        escape[i] = esc.value();
        leak_out[i] = out.value();
    }

    std::vector<double> eta(n, 0.0);
    bool forward = true;
    double change = kInf;
    long sweeps = 0;
    while (change > opts.solver_tol) {
        if (++sweeps > opts.max_sweeps) throw NoConvergence("occupation_stationary", sweeps - 1, change);
        change = 0.0;
        for (std::size_t step = 0; step < n; ++step) {
            const std::size_t j = forward ? step : n - 1 - step;
            CompensatedSum inflow;
            inflow.add(nu[j]);
            for (const auto& [i, p] : preds[j]) inflow.add(eta[i] * p);
            const double in = inflow.value();
            double next;
            if (escape[j] > 0.0)
                next = in / escape[j];
            else
                next = in > 0.0 ? kInf : 0.0;
            change = std::max(change, relative_change(eta[j], next));
            eta[j] = next;
        }
        forward = !forward;
        if (std::any_of(eta.begin(), eta.end(), [](double v) { return std::isinf(v); })) {
            ws.infinite = true;
            break;
        }
    }
    CompensatedSum leak;
    leak.add(start_leak);
    for (std::size_t i = 0; i < n; ++i)
        if (leak_out[i] > 0.0) leak.add(eta[i] * leak_out[i]);
    ws.states = std::move(order);
    ws.eta = std::move(eta);
    ws.leak = leak.value();
    return ws;
}

} // namespace

OccupationMeasure occupation_stationary_from(const ValidatedModel& model, const Strategy& pi,
                                             const StateMass& start, const StationaryOptions& opts) {
    if (!pi.is_stationary())
        throw InvalidArgument("occupation_stationary needs a stationary strategy");
    State window = opts.window;
    const bool automatic = window == 0;
    if (automatic) {
        State top = 0;
        for (const auto& [x, m] : start) top = std::max(top, x);
        window = std::max<State>(64, top + 64);
    }
    WindowSolve ws = solve_window(model, pi, start, window, opts);
    while (automatic && ws.leak > 0.0 && !ws.infinite && window < opts.max_window) {
        window = std::min(opts.max_window, 2 * window);
        ws = solve_window(model, pi, start, window, opts);
    }

    OccupationMeasure eta;
    eta.steps = static_cast<long>(window);
    if (ws.leak > 0.0) {
        if (ws.leak > opts.leak_tol) throw TruncationLeak(ws.leak, opts.leak_tol);
        if (opts.continuation_bound) {
            eta.unresolved_bound = ws.leak * *opts.continuation_bound;
        } else {
            eta.unresolved_bound = kInf;
            eta.bound_certified = false;
        }
    }
    if (ws.infinite) eta.non_absorbing_warning = true;
    for (std::size_t i = 0; i < ws.states.size(); ++i) {
        if (ws.eta[i] == 0.0) continue;
        for (const auto& [a, pa] : ws.kernels[i].probs)
            eta.entries[{ws.states[i], a}] = ws.eta[i] * pa;
    }
    finalize_total(eta);
    return eta;
}

OccupationMeasure occupation_stationary(const ValidatedModel& model, const Strategy& pi,
                                        const InitialDistribution& init,
                                        const StationaryOptions& opts) {
    const InitSupport s = init.support();
    OccupationMeasure eta = occupation_stationary_from(model, pi, transient_part(s), opts);
    eta.init_deficit = s.deficit;
    return eta;
}

OccupationMeasure occupation(const ValidatedModel& model, const Strategy& pi,
                             const InitialDistribution& init) {
    if (pi.is_stationary()) return occupation_stationary(model, pi, init);
    return occupation_forward(model, pi, init);
}

Integrand constant_integrand(double value) {
    return Integrand{[value](State, Action) { return value; }, std::fabs(value),
                     "const:" + std::to_string(value)};
}

Integrand state_indicator(State j) {
    return Integrand{[j](State x, Action) { return x == j ? 1.0 : 0.0; }, 1.0,
                     "d" + std::to_string(j)};
}

Integrand pair_indicator(State j, Action b) {
    return Integrand{[j, b](State x, Action a) { return x == j && a == b ? 1.0 : 0.0; }, 1.0,
                     "pair:" + std::to_string(j) + "," + std::to_string(b)};
}

BoundedValue integrate(const OccupationMeasure& eta, const Integrand& g) {
    CompensatedSum s;
    for (const auto& [key, m] : eta.entries) {
        const double v = g.g(key.first, key.second);
        if (v != 0.0) s.add(v * m);
    }
    BoundedValue out;
    out.value = s.value();
    if (eta.unresolved_bound > 0.0 && g.bound > 0.0)
        out.error_bound = g.bound * eta.unresolved_bound;
    out.certified = eta.bound_certified;
    return out;
}

BoundedValue expected_hitting_time(const ValidatedModel& model, const Strategy& pi,
                                   const InitialDistribution& init) {
    const OccupationMeasure eta = occupation(model, pi, init);
    return BoundedValue{eta.total_mass, eta.unresolved_bound, eta.bound_certified};
}

StateMass step_distribution(const ValidatedModel& model, const Strategy& pi, const StateMass& m,
                            int t) {
    std::map<State, CompensatedSum> next;
    for (const auto& [x, mass] : m) {
        if (x == kAbsorbing || mass == 0.0) continue;
        const ActionDistribution d = pi.at(t, x);
        check_strategy_actions(model, d);
        for (const auto& [a, pa] : d.probs)
            for (const auto& tr : model.row(x, a))
                if (tr.next != kAbsorbing) next[tr.next].add(mass * pa * tr.prob);
    }
    StateMass out;
    for (const auto& [y, s] : next)
        if (s.value() != 0.0) out.emplace_back(y, s.value());
    return out;
}

OccupationMeasure tail_occupation(const ValidatedModel& model, const Strategy& pi,
                                  const InitialDistribution& init, int n) {
    if (n < 0) throw InvalidArgument("tail index must be >= 0");
    const InitSupport s = init.support();
    StateMass m = transient_part(s);
    Strategy shifted = pi;
    for (int t = 1; t <= n && !m.empty(); ++t) {
        m = step_distribution(model, pi, m, t);
        shifted = shift_strategy(shifted, 0, 0);
    }
    OccupationMeasure eta;
    if (!m.empty())
        eta = shifted.is_stationary() ? occupation_stationary_from(model, shifted, m)
                                      : occupation_forward_from(model, shifted, m);
    eta.init_deficit = s.deficit;
    return eta;
}

BoundedValue tail_mass_from(const ValidatedModel& model, const Strategy& pi,
                            const InitialDistribution& init, int n) {
    const OccupationMeasure eta = tail_occupation(model, pi, init, n);
    return BoundedValue{eta.total_mass, eta.unresolved_bound, eta.bound_certified};
}

} // namespace amdp
