#include "amdp/topology.hpp"

#include "amdp/errors.hpp"
#include "amdp/numeric.hpp"
#include "amdp/sequence.hpp"

#include <algorithm>
#include <cmath>

namespace amdp {

double PrefixMeasure::total() const {
    CompensatedSum s;
    for (const auto& [path, p] : paths) s.add(p);
    return s.value();
}

namespace {

class PrefixEnumerator {
public:
    PrefixEnumerator(const ValidatedModel& model, const Strategy& pi, int horizon,
                     const PrefixOptions& opts, PrefixMeasure& out)
        : model_(model), pi_(pi), horizon_(horizon), opts_(opts), out_(out) {}

    void run(Path& path, double prob, int t) {
        if (t == horizon_) {
            if (out_.paths.size() >= opts_.max_paths) throw SupportExplosion(opts_.max_paths);
            out_.paths[path] += prob;
            return;
        }
        const State x = path.back();
        const ActionDistribution d = pi_.at(t + 1, x);
        if (x != kAbsorbing) check_strategy_actions(model_, d);
        for (const auto& [a, pa] : d.probs) {
            const Row row = x == kAbsorbing ? Row{{kAbsorbing, 1.0}} : model_.row(x, a);
            for (const auto& tr : row) {
                const double q = prob * pa * tr.prob;
                if (q == 0.0) continue;
                if (q < opts_.epsilon_path) {
                    out_.pruned_mass += q;
                    continue;
                }
                path.push_back(a);
                path.push_back(tr.next);
                run(path, q, t + 1);
                path.pop_back();
                path.pop_back();
            }
        }
    }

private:
    const ValidatedModel& model_;
    const Strategy& pi_;
    int horizon_;
    const PrefixOptions& opts_;
    PrefixMeasure& out_;
};

} // namespace

PrefixMeasure prefix_measure(const ValidatedModel& model, const Strategy& pi,
                             const InitialDistribution& init, int horizon,
                             const PrefixOptions& opts) {
    if (horizon < 0) throw InvalidArgument("prefix horizon must be >= 0");
    PrefixMeasure out;
    out.horizon = horizon;
    out.epsilon_path = opts.epsilon_path;
    const InitSupport s = init.support();
    out.pruned_mass = s.deficit;
    PrefixEnumerator e(model, pi, horizon, opts, out);
    for (const auto& [x, m] : s.mass) {
        if (m < opts.epsilon_path) {
            out.pruned_mass += m;
            continue;
        }
        Path path{x};
        e.run(path, m, 0);
    }
    return out;
}

double prefix_tv_distance(const PrefixMeasure& p, const PrefixMeasure& q) {
    if (p.horizon != q.horizon) throw HorizonMismatch(p.horizon, q.horizon);
    CompensatedSum l1;
    auto ip = p.paths.begin();
    auto iq = q.paths.begin();
    while (ip != p.paths.end() || iq != q.paths.end()) {
        if (iq == q.paths.end() || (ip != p.paths.end() && ip->first < iq->first)) {
            l1.add(std::fabs(ip->second));
            ++ip;
        } else if (ip == p.paths.end() || iq->first < ip->first) {
            l1.add(std::fabs(iq->second));
            ++iq;
        } else {
            l1.add(std::fabs(ip->second - iq->second));
            ++ip;
            ++iq;
        }
    }
    return 0.5 * l1.value() + 0.5 * (p.pruned_mass + q.pruned_mass);
}

PrefixMeasure marginalize_last(const PrefixMeasure& p) {
    if (p.horizon < 1) throw InvalidArgument("cannot marginalize a horizon-0 prefix measure");
    PrefixMeasure out;
    out.horizon = p.horizon - 1;
    out.pruned_mass = p.pruned_mass;
    out.epsilon_path = p.epsilon_path;
    std::map<Path, CompensatedSum> acc;
    for (const auto& [path, prob] : p.paths) {
        Path head(path.begin(), path.end() - 2);
        acc[std::move(head)].add(prob);
    }
    for (auto& [path, s] : acc) out.paths.emplace(path, s.value());
    return out;
}

OccupationMeasure occupation_from_prefix(const PrefixMeasure& p) {
    std::map<std::pair<State, Action>, CompensatedSum> acc;
    for (const auto& [path, prob] : p.paths) {
        for (int t = 1; t <= p.horizon; ++t) {
            const State x = path[static_cast<std::size_t>(2 * (t - 1))];
            const Action a = path[static_cast<std::size_t>(2 * t - 1)];
            if (x != kAbsorbing) acc[{x, a}].add(prob);
        }
    }
    OccupationMeasure eta;
    CompensatedSum total;
    for (const auto& [key, s] : acc) {
        eta.entries[key] = s.value();
        total.add(s.value());
    }
    eta.total_mass = total.value();
    eta.steps = p.horizon;
    return eta;
}

std::vector<TestFunction> default_tests(const ValidatedModel& model, State max_j) {
    std::vector<TestFunction> tests;
    auto one = constant_integrand(1.0);
    one.name = "const";
    tests.push_back(std::move(one));
    for (State j = 1; j <= max_j; ++j) tests.push_back(state_indicator(j));
    for (State j = 1; j <= max_j; ++j)
        for (Action b : model.actions()) tests.push_back(pair_indicator(j, b));
    return tests;
}

WeakLimitReport weak_limit_report(const std::vector<OccupationMeasure>& sequence,
                                  const OccupationMeasure& candidate,
                                  const std::vector<TestFunction>& tests, double tol) {
    if (sequence.empty()) throw InvalidArgument("weak_limit_report needs a nonempty sequence");
    WeakLimitReport rep;
    rep.all_converged = true;
    const std::size_t from = sequence.size() / 2;
    for (const auto& g : tests) {
        WeakTestResult r;
        r.test = g.name;
        r.candidate = integrate(candidate, g).value;
        for (const auto& eta : sequence) r.integrals.push_back(integrate(eta, g).value);
        double lo = kInf, hi = -kInf;
        r.min_deviation = kInf;
        for (std::size_t i = from; i < r.integrals.size(); ++i) {
            const double v = r.integrals[i];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
            const double dev = std::fabs(v - r.candidate);
            r.max_deviation = std::max(r.max_deviation, dev);
            r.min_deviation = std::min(r.min_deviation, dev);
        }
        r.oscillation = hi - lo;
        if (r.max_deviation <= tol)
            r.verdict = WeakVerdict::converged_to_candidate;
        else if (r.min_deviation > 10.0 * tol)
            r.verdict = WeakVerdict::diverges_from_candidate;
        if (r.verdict != WeakVerdict::converged_to_candidate) rep.all_converged = false;
        if (r.verdict == WeakVerdict::diverges_from_candidate && !rep.witness) rep.witness = r.test;
        rep.tests.push_back(std::move(r));
    }
    return rep;
}

DiscontinuityCertificate discontinuity_witness(const ValidatedModel& model,
                                               const StrategyFamily& family,
                                               const Strategy& limit,
                                               const InitialDistribution& init,
                                               const std::vector<int>& horizons,
                                               const TestFunction& test, double tol) {
    if (horizons.empty()) throw InvalidArgument("discontinuity_witness needs at least one horizon");
    DiscontinuityCertificate cert;
    cert.family = family.name;
    cert.limit_strategy = limit.name();
    cert.test = test.name;
    cert.tol = tol;
    cert.tv_family_index = *std::max_element(horizons.begin(), horizons.end());

    const Strategy member = family.at(cert.tv_family_index);
    bool tv_ok = true;
    for (int T : horizons) {
        const double tv = prefix_tv_distance(prefix_measure(model, member, init, T),
                                             prefix_measure(model, limit, init, T));
        cert.tv_distances.emplace_back(T, tv);
        tv_ok &= tv <= tol;
    }

    cert.limit_integral = integrate(occupation(model, limit, init), test).value;
    std::vector<double> values;
    for (int n = family.lo; n <= family.hi; ++n) {
        const double v = integrate(occupation(model, family.at(n), init), test).value;
        cert.integrals.emplace_back(n, v);
        values.push_back(v);
    }
    const std::size_t from = values.size() / 2;
    cert.gap_floor = kInf;
    for (std::size_t i = from; i < values.size(); ++i)
        cert.gap_floor = std::min(cert.gap_floor, std::fabs(values[i] - cert.limit_integral));
    cert.sequence_limit = aitken_limit(std::span<const double>(values).subspan(from));
    cert.gap = std::fabs(cert.sequence_limit - cert.limit_integral);
    cert.valid = tv_ok && cert.gap_floor > 10.0 * tol;
    cert.note =
        "strategic-measure convergence is evidenced by total variation of finite-horizon prefix "
        "marginals at the listed horizons; occupation non-convergence is shown for this sequence, "
        "this limit and this test function only";
    return cert;
}

const char* to_string(WeakVerdict v) {
    switch (v) {
    case WeakVerdict::converged_to_candidate: return "converged_to_candidate";
    case WeakVerdict::diverges_from_candidate: return "diverges_from_candidate";
    default: return "inconclusive";
    }
}

} // namespace amdp
