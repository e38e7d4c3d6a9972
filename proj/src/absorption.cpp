#include "amdp/absorption.hpp"

#include "amdp/errors.hpp"
#include "amdp/numeric.hpp"
#include "amdp/occupation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace amdp {

double sup_expected_terminal(const ValidatedModel& model, const StateMass& start, int n,
                             const std::function<double(State)>& terminal, State window) {
    if (n < 0) throw InvalidArgument("n must be >= 0");
    std::vector<double> v(static_cast<std::size_t>(window) + 1, 0.0);
    for (State x = 1; x <= window; ++x)
        if (model.has_state(x)) v[static_cast<std::size_t>(x)] = terminal(x);
    auto at = [&](const std::vector<double>& w, State y) {
        return y > window ? 0.0 : w[static_cast<std::size_t>(y)];
    };
    for (int k = 0; k < n; ++k) {
        std::vector<double> next(v.size(), 0.0);
        for (State x = 1; x <= window; ++x) {
            if (!model.has_state(x)) continue;
            double best = -kInf;
            for (Action a : model.actions()) {
                CompensatedDot s;
                for (const auto& tr : model.row(x, a))
                    if (tr.next != kAbsorbing) s.add_product(tr.prob, at(v, tr.next));
                best = std::max(best, s.value());
            }
            next[static_cast<std::size_t>(x)] = best;
        }
        v = std::move(next);
    }
    CompensatedDot total;
    for (const auto& [x, m] : start)
        if (x != kAbsorbing) total.add_product(m, at(v, x));
    return total.value();
}

double exact_sup_tail(const ValidatedModel& model, const InitialDistribution& init, int n,
                      const SolverOptions& opts) {
    if (n < 0) throw InvalidArgument("n must be >= 0");
    const StateMass start = transient_part(init.support());
    if (start.empty()) return 0.0;
    State top = 0;
    for (const auto& [x, m] : start) top = std::max(top, x);
    // States reachable in n epochs from `top` lie below top + n for skip-free
    // models; the margin absorbs the zero boundary of the w* window.
    SolverOptions o = opts;
    o.window = std::max(opts.window, top + static_cast<State>(n) + opts.margin);
    o.eval = {top + static_cast<State>(n)};
    const ValueWindow w = sup_hitting(model, o);
    return sup_expected_terminal(
        model, start, n, [&w](State x) { return w.at(x); }, w.window);
}

namespace {

ValidatedModel gate_model() {
    ModelSpec spec;
    spec.name = "gate";
    spec.actions = {1, 2};
    TableTransitions t;
    t.entries = {
        {1, 1, {{0, 0.25}, {1, 0.25}, {2, 0.5}}},
        {1, 2, {{0, 0.625}, {2, 0.375}}},
        {2, 1, {{0, 0.125}, {1, 0.875}}},
        {2, 2, {{0, 0.5}, {1, 0.25}, {2, 0.25}}},
    };
    spec.transitions = t;
    return validate_model(spec);
}

} // namespace

IdentityGate tail_identity_gate(int horizon) {
    if (horizon < 1 || horizon > 8) throw InvalidArgument("gate horizon must lie in 1..8");
    const ValidatedModel model = gate_model();
    const std::size_t H = static_cast<std::size_t>(horizon);
    const std::size_t count = std::size_t{1} << (2 * H);

    // W[k][x]: best expected number of transient epochs among X_0..X_k.
    std::vector<std::array<double, 3>> W(H + 1);
    W[0] = {0.0, 1.0, 1.0};
    for (std::size_t k = 1; k <= H; ++k)
        for (State x = 1; x <= 2; ++x) {
            double best = 0.0;
            for (Action a : {Action{1}, Action{2}}) {
                double s = 0.0;
                for (const auto& tr : model.row(x, a)) s += tr.prob * W[k - 1][tr.next];
                best = std::max(best, s);
            }
            W[k][x] = 1.0 + best;
        }

    IdentityGate gate;
    gate.horizon = horizon;
    gate.strategies = count;
    for (State x0 = 1; x0 <= 2; ++x0) {
        for (std::size_t n = 0; n <= H; ++n) {
            double brute = 0.0;
            for (std::size_t code = 0; code < count; ++code) {
                // Bits 2(t-1) and 2(t-1)+1 pick the epoch-t action at states 1 and 2.
                std::array<double, 3> dist{0.0, 0.0, 0.0};
                dist[x0] = 1.0;
                double total = n == 0 ? 1.0 : 0.0;
                for (std::size_t t = 1; t <= H; ++t) {
                    std::array<double, 3> next{0.0, 0.0, 0.0};
                    next[0] = dist[0];
                    for (State x = 1; x <= 2; ++x) {
                        const Action a = 1 + ((code >> (2 * (t - 1) + (x - 1))) & 1);
                        for (const auto& tr : model.row(x, a)) next[tr.next] += dist[x] * tr.prob;
                    }
                    dist = next;
                    if (t >= n) total += dist[1] + dist[2];
                }
                brute = std::max(brute, total);
            }
            const std::size_t k = H - n;
            const double dp = sup_expected_terminal(
                model, {{x0, 1.0}}, static_cast<int>(n),
                [&W, k](State x) { return W[k][x]; }, 2);
            gate.max_deviation = std::max(gate.max_deviation, std::fabs(brute - dp));
        }
    }
    return gate;
}

TailProfile uniform_tail_profile(const ValidatedModel& model, const InitialDistribution& init,
                                 const StrategyFamily& family, int n_lo, int n_hi,
                                 const SolverOptions& opts) {
    if (n_lo < 0 || n_hi < n_lo) throw InvalidArgument("bad tail range");
    TailProfile profile;
    std::vector<double> family_values;
    for (int n = n_lo; n <= n_hi; ++n) {
        TailRow row;
        row.n = n;
        row.argmax_member = family.lo;
        row.family_sup_tail = -kInf;
        for (int m = family.lo; m <= family.hi; ++m) {
            const double v = tail_mass_from(model, family.at(m), init, n).value;
            if (v > row.family_sup_tail) {
                row.family_sup_tail = v;
                row.argmax_member = m;
            }
        }
        row.exact_sup_tail = exact_sup_tail(model, init, n, opts);
        family_values.push_back(row.family_sup_tail);
        profile.rows.push_back(row);
    }
    profile.trend = tail_trend(family_values);
    profile.verdict = profile.trend.sustained ? TailVerdict::not_uniformly_absorbing_witnessed
                                              : TailVerdict::uniformly_absorbing_up_to_horizon;
    return profile;
}

LyapunovCandidate mu_pow2_plus2() {
    return {[](State x) { return x == kAbsorbing ? 1.0 : 2.0 + std::ldexp(1.0, static_cast<int>(std::min<State>(x, 4096))); },
            "pow2plus2"};
}

LyapunovCandidate mu_pow2() {
    return {[](State x) { return x == kAbsorbing ? 1.0 : std::ldexp(1.0, static_cast<int>(std::min<State>(x, 4096))); },
            "pow2"};
}

LyapunovReport lyapunov_verify(const ValidatedModel& model, const LyapunovCandidate& mu,
                               const std::vector<Strategy>& strategies,
                               const std::vector<State>& states, int horizon, State window) {
    if (horizon < 0) throw InvalidArgument("horizon must be >= 0");
    auto eval = [&](State x) {
        const double v = mu.mu(x);
        if (!std::isfinite(v)) throw EvaluationOverflow(x, v);
        if (v < 1.0) throw InvalidArgument("Lyapunov candidate below 1 at state " + std::to_string(x));
        return v;
    };

    LyapunovReport rep;
    rep.min_slack = kInf;
    bool fails_a = false;
    for (State x = 1; x <= window; ++x) {
        if (!model.has_state(x)) continue;
        const double mux = eval(x);
        for (Action a : model.actions()) {
            CompensatedDot s;
            s.add(mux);
            s.add(-1.0);
            for (const auto& tr : model.row(x, a))
                if (tr.next != kAbsorbing) s.add_product(-tr.prob, eval(tr.next));
            const double slack = s.value();
            rep.condition_a.push_back({x, a, slack});
            rep.min_slack = std::min(rep.min_slack, slack);
            if (slack < -1e-9 * std::max(1.0, mux)) fails_a = true;
        }
    }

    bool fails_c = false;
    for (const auto& phi : strategies) {
        if (!phi.is_deterministic())
            throw InvalidArgument("condition (c) is checked on deterministic stationary strategies");
        for (State x0 : states) {
            if (x0 == kAbsorbing) {
                rep.skipped_zero = true;
                continue;
            }
            ConditionCSequence seq;
            seq.strategy = phi.name();
            seq.start = x0;
            StateMass m{{x0, 1.0}};
            for (int t = 0; t <= horizon; ++t) {
                if (t > 0) m = step_distribution(model, phi, m, t);
                CompensatedDot e;
                for (const auto& [y, mass] : m) e.add_product(mass, eval(y));
                seq.values.push_back(e.value());
            }
            seq.trend = tail_trend(seq.values);
            seq.witnessed = seq.trend.sustained;
            fails_c |= seq.witnessed;
            rep.condition_c.push_back(std::move(seq));
        }
    }
    if (fails_a)
        rep.verdict = LyapunovVerdict::fails_a;
    else if (fails_c)
        rep.verdict = LyapunovVerdict::fails_c_witnessed;
    return rep;
}

ValueWindow minimal_condition_a(const ValidatedModel& model, const SolverOptions& opts) {
    detail::WindowProblem p;
    p.reward = [](State, Action) { return 1.0; };
    p.sense = detail::Sense::maximize;
    p.boundary_value = 1.0;
    p.floor = 1.0;
    p.start_value = 1.0;
    p.value_at_zero = 1.0;
    p.boundary_policy = "one beyond window (least admissible value)";
    return detail::solve_window(model, p, opts);
}

const char* to_string(TailVerdict v) {
    return v == TailVerdict::not_uniformly_absorbing_witnessed ? "not_uniformly_absorbing_witnessed"
                                                               : "uniformly_absorbing_up_to_horizon";
}

const char* to_string(LyapunovVerdict v) {
    switch (v) {
    case LyapunovVerdict::fails_a: return "fails_a";
    case LyapunovVerdict::fails_c_witnessed: return "fails_c_witnessed";
    default: return "passes_up_to_horizon";
    }
}

} // namespace amdp
