#include "amdp/bellman.hpp"

#include "amdp/errors.hpp"
#include "amdp/numeric.hpp"
#include "amdp/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace amdp {

Integrand CostFunction::as_integrand() const {
    auto self = *this;
    return Integrand{[self](State x, Action a) { return self(x, a); }, bound, name};
}

CostFunction constant_cost(double value) {
    std::ostringstream os;
    os << "const:" << value;
    return CostFunction{[value](State, Action) { return value; }, std::fabs(value), os.str()};
}

double ValueWindow::at(State x) const {
    if (x > window) throw WindowTooSmall(x, window, 0);
    return values[static_cast<std::size_t>(x)];
}

namespace detail {

namespace {

struct ActionRow {
    double reward = 0.0;
    double escape = 0.0;  // sum of p(y|x,a) over y != x
    std::vector<std::pair<State, double>> others;  // y != 0, y != x
};

double eliminate(double numerator, double escape) {
    if (escape > 0.0) return numerator / escape;
    if (numerator > 0.0) return kInf;
    if (numerator < 0.0) return -kInf;
    return 0.0;
}

} // namespace

ValueWindow solve_window(const ValidatedModel& model, const WindowProblem& problem,
                         const SolverOptions& opts) {
    if (opts.window < 1) throw InvalidArgument("window must be >= 1");
    for (State x : opts.eval)
        if (x + opts.margin > opts.window) throw WindowTooSmall(x, opts.window, opts.margin);

    const State L = opts.window;
    ValueWindow vw;
    vw.window = L;
    vw.boundary_policy = problem.boundary_policy;
    vw.values.assign(static_cast<std::size_t>(L) + 1, problem.start_value);
    vw.values[0] = problem.value_at_zero;

    std::vector<State> states;
    std::vector<std::vector<ActionRow>> rows;
    for (State x = 1; x <= L; ++x) {
        if (!model.has_state(x)) {
            vw.values[static_cast<std::size_t>(x)] = 0.0;
            continue;
        }
        states.push_back(x);
        auto& per_action = rows.emplace_back();
        for (Action a : model.actions()) {
            ActionRow ar;
            ar.reward = problem.reward(x, a);
            CompensatedSum esc;
            for (const auto& tr : model.row(x, a)) {
                if (tr.next == x) continue;
                esc.add(tr.prob);
                if (tr.next != kAbsorbing) ar.others.emplace_back(tr.next, tr.prob);
            }
            ar.escape = esc.value();
            per_action.push_back(std::move(ar));
        }
    }

    auto value_of = [&](State y) {
        if (y > L) return problem.boundary_value;
        return vw.values[static_cast<std::size_t>(y)];
    };
    const bool maximize = problem.sense == Sense::maximize;

    bool descending = true;
    double change = kInf;
    while (change > opts.tol) {
        if (vw.sweeps >= opts.max_sweeps) throw NoConvergence("bellman sweep", vw.sweeps, change);
        ++vw.sweeps;
        change = 0.0;
        for (std::size_t step = 0; step < states.size(); ++step) {
            const std::size_t i = descending ? states.size() - 1 - step : step;
            const State x = states[i];
            double best = maximize ? -kInf : kInf;
            for (const auto& ar : rows[i]) {
                CompensatedDot num;
                num.add(ar.reward);
                for (const auto& [y, p] : ar.others) num.add_product(p, value_of(y));
                const double cand = eliminate(num.value(), ar.escape);
                best = maximize ? std::max(best, cand) : std::min(best, cand);
            }
            best = std::max(best, problem.floor);
            double& slot = vw.values[static_cast<std::size_t>(x)];
            const double slack = 1e-15 * std::max(1.0, std::fabs(slot));
            if (maximize ? best < slot - slack : best > slot + slack) vw.monotone = false;
            change = std::max(change, relative_change(slot, best));
            slot = best;
        }
        descending = !descending;
    }
    vw.residual = change;
    return vw;
}

} // namespace detail

ValueWindow sup_hitting(const ValidatedModel& model, const SolverOptions& opts) {
    detail::WindowProblem p;
    p.reward = [](State, Action) { return 1.0; };
    p.sense = detail::Sense::maximize;
    p.boundary_policy = "zero beyond window (minimal-solution iteration from below)";
    return detail::solve_window(model, p, opts);
}

ValueWindow inf_cost(const ValidatedModel& model, const CostFunction& c, const SolverOptions& opts) {
    bool has_pos = false, has_neg = false;
    for (State x = 1; x <= opts.window; ++x) {
        if (!model.has_state(x)) continue;
        for (Action a : model.actions()) {
            const double v = c(x, a);
            has_pos |= v > 0.0;
            has_neg |= v < 0.0;
        }
    }
    if (has_pos && has_neg)
        throw SignIndefiniteCost("cost " + c.name + " takes both signs on the window");
    detail::WindowProblem p;
    p.reward = [&c](State x, Action a) { return c(x, a); };
    p.sense = detail::Sense::minimize;
    p.boundary_policy = "zero beyond window";
    return detail::solve_window(model, p, opts);
}

BoundedValue policy_value(const ValidatedModel& model, const Strategy& pi, const CostFunction& c,
                          const InitialDistribution& init) {
    return integrate(occupation(model, pi, init), c.as_integrand());
}

double bellman_residual(const ValidatedModel& model, const CostFunction& c,
                        const std::function<double(State)>& v, State x, Action a) {
    CompensatedDot s;
    s.add(v(x));
    s.add(-c(x, a));
    for (const auto& tr : model.row(x, a)) s.add_product(-tr.prob, v(tr.next));
    return s.value();
}

DubinsSavageReport dubins_savage_check(const ValidatedModel& model, const Strategy& phi,
                                       const CostFunction& c, const ValueWindow& vstar, State x,
                                       int horizon, State margin) {
    if (!phi.is_deterministic())
        throw InvalidArgument("Dubins-Savage check needs a deterministic stationary strategy");
    if (horizon < 0) throw InvalidArgument("horizon must be >= 0");
    const State L = vstar.window;
    if (x + margin > L) throw WindowTooSmall(x, L, margin);

    DubinsSavageReport rep;
    auto v = [&](State y) { return vstar.at(y); };
    for (State s = 1; s + margin <= L; ++s) {
        if (!model.has_state(s)) continue;
        const double r = bellman_residual(model, c, v, s, phi.action(s));
        rep.residuals[s] = r;
        rep.max_abs_residual = std::max(rep.max_abs_residual, std::fabs(r));
    }

    StateMass m{{x, 1.0}};
    std::vector<double> magnitudes;
    for (int n = 0; n <= horizon; ++n) {
        if (n > 0) m = step_distribution(model, phi, m, n);
        CompensatedDot e;
        for (const auto& [y, mass] : m) {
            if (y + margin > L) throw WindowTooSmall(y, L, margin);
            e.add_product(mass, vstar.at(y));
        }
        rep.expectations.push_back(e.value());
        magnitudes.push_back(std::fabs(e.value()));
    }
    const TailTrend tt = tail_trend(magnitudes);
    rep.floor = tt.floor;
    rep.witness_from = tt.from;
    rep.witness_to = tt.to;
    rep.limit = aitken_limit(std::span<const double>(rep.expectations).subspan(tt.from));
    rep.verdict = tt.sustained ? DubinsSavageVerdict::violated
                               : DubinsSavageVerdict::satisfied_up_to_horizon;
    return rep;
}

GaResult condition_ga(const ValidatedModel& model, const CostFunction& c,
                      const InitialDistribution& init, const SolverOptions& opts) {
    const InitSupport support = init.support();
    State top = 0;
    for (const auto& [x, m] : support.mass) top = std::max(top, x);

    SolverOptions o = opts;
    o.window = std::max(opts.window, top + opts.margin);
    o.eval.clear();
    for (const auto& [x, m] : support.mass)
        if (x != kAbsorbing) o.eval.push_back(x);

    detail::WindowProblem p;
    p.reward = [&c](State x, Action a) { return c.negative(x, a); };
    p.sense = detail::Sense::maximize;
    p.boundary_policy = "zero beyond window (minimal-solution iteration from below)";

    GaResult out;
    out.values = detail::solve_window(model, p, o);

    CompensatedSum sum;
    std::vector<double> terms;
    for (const auto& [x, m] : support.mass) {
        const double term = x == kAbsorbing ? 0.0 : m * out.values.at(x);
        terms.push_back(term);
        sum.add(term);
        out.partial_sums.push_back(sum.value());
    }
    out.value = sum.value();
    if (std::isinf(out.value)) {
        out.diverges = true;
        return out;
    }
    if (support.truncated && terms.size() >= 2) {
        const double last = terms.back(), prev = terms[terms.size() - 2];
        out.growth_rate = prev > 0.0 ? last / prev : 0.0;
        if (out.growth_rate >= 1.0) {
            out.diverges = true;
            out.value = kInf;
        } else if (out.growth_rate > 0.0) {
            out.error_bound = last * out.growth_rate / (1.0 - out.growth_rate);
        }
    }
    return out;
}

BoundedValue condition_c_witness(const ValidatedModel& model, const CostFunction& c,
                                 const InitialDistribution& init, const StrategyFamily& family,
                                 int n) {
    const OccupationMeasure eta = tail_occupation(model, family.at(n), init, n);
    for (const auto& [key, m] : eta.entries)
        if (c(key.first, key.second) > 0.0)
            throw SignIndefiniteCost("condition (C) witness needs c <= 0 on transient states");
    return integrate(eta, c.as_integrand());
}

const char* to_string(DubinsSavageVerdict v) {
    return v == DubinsSavageVerdict::violated ? "violated" : "satisfied_up_to_horizon";
}

} // namespace amdp
