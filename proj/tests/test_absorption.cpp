#include <doctest.h>

#include "amdp/absorption.hpp"
#include "amdp/errors.hpp"
#include "oracles.hpp"

#include <array>
#include <cmath>

using namespace amdp;

namespace {

double p2(int k) { return std::ldexp(1.0, k); }

const auto ex1 = make_builtin("example1");
const auto uni = make_builtin("example1_uniform");
const auto ex2 = make_builtin("example2");
const auto d1 = InitialDistribution::point(1);

// Best expected number of transient epochs among X_0..X_k from each state,
// by direct recursion over a finite table model on states 0..k_states.
std::vector<std::vector<double>> horizon_values(const ValidatedModel& m, int k_states, int H) {
    std::vector<std::vector<double>> W(static_cast<std::size_t>(H) + 1,
                                       std::vector<double>(static_cast<std::size_t>(k_states) + 1, 0.0));
    for (int x = 1; x <= k_states; ++x) W[0][static_cast<std::size_t>(x)] = 1.0;
    for (int k = 1; k <= H; ++k)
        for (int x = 1; x <= k_states; ++x) {
            double best = 0.0;
            for (Action a : m.actions()) {
                double s = 0.0;
                for (const auto& t : m.row(static_cast<State>(x), a))
                    s += t.prob * W[static_cast<std::size_t>(k - 1)][t.next];
                best = std::max(best, s);
            }
            W[static_cast<std::size_t>(k)][static_cast<std::size_t>(x)] = 1.0 + best;
        }
    return W;
}

} // namespace

TEST_CASE("built-in identity gate") {
    const auto g = tail_identity_gate(4);
    CHECK(g.horizon == 4);
    CHECK(g.strategies == 256);
    CHECK(g.max_deviation <= 1e-12);
    CHECK_THROWS_AS(tail_identity_gate(0), InvalidArgument);
}

TEST_CASE("identity gate: brute force over deterministic Markov strategies on random models") {
    std::mt19937 rng(4242);
    const int k = 3, H = 4;
    for (int trial = 0; trial < 12; ++trial) {
        const auto model = validate_model(oracle::random_model(rng, k, 2, 0.05));
        const auto W = horizon_values(model, k, H);
        // every map (epoch, state) -> action: 2^(k*H) strategies
        const std::size_t count = std::size_t{1} << (k * H);
        for (int x0 = 1; x0 <= k; ++x0)
            for (int n = 0; n <= H; ++n) {
                double brute = 0.0;
                for (std::size_t code = 0; code < count; ++code) {
                    std::vector<double> dist(static_cast<std::size_t>(k) + 1, 0.0);
                    dist[static_cast<std::size_t>(x0)] = 1.0;
                    double total = n == 0 ? 1.0 : 0.0;
                    for (int t = 1; t <= H; ++t) {
                        std::vector<double> next(dist.size(), 0.0);
                        next[0] = dist[0];
                        for (int x = 1; x <= k; ++x) {
                            const Action a = 1 + ((code >> (k * (t - 1) + (x - 1))) & 1);
                            for (const auto& tr : model.row(static_cast<State>(x), a))
                                next[tr.next] += dist[static_cast<std::size_t>(x)] * tr.prob;
                        }
                        dist = next;
                        if (t >= n)
                            for (int x = 1; x <= k; ++x) total += dist[static_cast<std::size_t>(x)];
                    }
                    brute = std::max(brute, total);
                }
                const auto& Wk = W[static_cast<std::size_t>(H - n)];
                const double dp = sup_expected_terminal(model, {{static_cast<State>(x0), 1.0}}, n,
                                                        [&Wk](State x) { return Wk[x]; }, static_cast<State>(k));
                CHECK(std::fabs(brute - dp) <= 1e-12);
            }
    }
}

TEST_CASE("exact sup tail, example1") {
    for (int n = 0; n <= 30; ++n) CHECK(std::fabs(exact_sup_tail(ex1, d1, n) - (2.0 + p2(1 - n))) <= 1e-9);
    CHECK(std::fabs(exact_sup_tail(ex1, d1, 0) - 4.0) <= 1e-9);
}

TEST_CASE("exact sup tail, example1_uniform") {
    for (int n = 0; n <= 30; ++n) CHECK(exact_sup_tail(uni, d1, n) == doctest::Approx(p2(1 - n)).epsilon(1e-9));
}

TEST_CASE("exact sup tail at 0 is the w* integral; nonincreasing in n") {
    const auto init = InitialDistribution::table({{1, 0.5}, {3, 0.25}, {6, 0.25}});
    SolverOptions o;
    o.window = 80;
    o.eval = {1, 3, 6};
    const auto w = sup_hitting(ex1, o);
    const double integral = 0.5 * w.at(1) + 0.25 * w.at(3) + 0.25 * w.at(6);
    CHECK(exact_sup_tail(ex1, init, 0) == doctest::Approx(integral).epsilon(1e-9));
    double prev = kInf;
    for (int n = 0; n <= 20; ++n) {
        const double v = exact_sup_tail(ex1, init, n);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("tail profile, example1: floor 2, witnessed") {
    const auto prof = uniform_tail_profile(ex1, d1, threshold_family(0, 30), 1, 30);
    REQUIRE(prof.rows.size() == 30);
    for (const auto& r : prof.rows) {
        CHECK(r.family_sup_tail >= 2.0 - 1e-9);
        CHECK(r.family_sup_tail <= r.exact_sup_tail + 1e-9);
        CHECK(r.exact_sup_tail == doctest::Approx(2.0 + p2(1 - r.n)).epsilon(1e-9));
    }
    CHECK(prof.verdict == TailVerdict::not_uniformly_absorbing_witnessed);
    CHECK(prof.trend.sustained);
}

TEST_CASE("tail profile, example1_uniform: decays") {
    const auto prof = uniform_tail_profile(uni, d1, threshold_family(0, 30), 1, 30);
    for (const auto& r : prof.rows) {
        CHECK(r.family_sup_tail == doctest::Approx(p2(1 - r.n)).epsilon(1e-9));
        CHECK(r.family_sup_tail <= r.exact_sup_tail + 1e-9);
    }
    CHECK(prof.verdict == TailVerdict::uniformly_absorbing_up_to_horizon);
}

TEST_CASE("tail profile from the absorbing state is zero") {
    const auto prof = uniform_tail_profile(ex1, InitialDistribution::point(0), threshold_family(0, 5), 0, 10);
    for (const auto& r : prof.rows) {
        CHECK(r.family_sup_tail == 0.0);
        CHECK(r.exact_sup_tail == 0.0);
    }
    CHECK(prof.verdict == TailVerdict::uniformly_absorbing_up_to_horizon);
}

TEST_CASE("Lyapunov candidate 2 + 2^x on example1") {
    const auto rep = lyapunov_verify(ex1, mu_pow2_plus2(), {all_two_strategy()}, {1, 2, 3, 4}, 50, 60);
    // 2 + 2^x is exact in binary64 for x <= 51; beyond that mu itself rounds
    // and slacks are only meaningful relative to mu(x).
    for (const auto& s : rep.condition_a) {
        const double expected = s.action == 1 ? p2(1 - static_cast<int>(s.state)) : 0.0;
        if (s.state <= 50)
            CHECK(std::fabs(s.slack - expected) <= 1e-12);
        else
            CHECK(std::fabs(s.slack - expected) <= 1e-12 * mu_pow2_plus2().mu(s.state));
    }
    REQUIRE(rep.condition_c.size() == 4);
    const auto& from1 = rep.condition_c.front();
    CHECK(from1.start == 1);
    for (std::size_t t = 0; t < from1.values.size(); ++t) CHECK(from1.values[t] == 2.0 + p2(1 - static_cast<int>(t)));
    for (const auto& seq : rep.condition_c) {
        CHECK(seq.witnessed);
        for (double e : seq.values) CHECK(e >= p2(static_cast<int>(seq.start)));
    }
    CHECK(rep.verdict == LyapunovVerdict::fails_c_witnessed);
    CHECK(rep.condition_b.find("automatic") != std::string::npos);
}

TEST_CASE("Lyapunov candidate 2^x on example2 passes") {
    const auto rep = lyapunov_verify(ex2, mu_pow2(), {threshold_strategy(0)}, {1, 2, 3, 5}, 300, 60);
    CHECK(rep.verdict == LyapunovVerdict::passes_up_to_horizon);
    for (const auto& s : rep.condition_a) CHECK(std::fabs(s.slack) <= 1e-12 * p2(static_cast<int>(s.state)));
    for (const auto& seq : rep.condition_c) {
        CHECK_FALSE(seq.witnessed);
        if (seq.start == 3)
            for (std::size_t n = 0; n <= 40; ++n)
                CHECK(seq.values[n] == doctest::Approx(8.0 * std::pow(7.0 / 8.0, static_cast<double>(n))).epsilon(1e-12));
    }
    // consistent with uniform absorption from each point
    // 2^x (1 - 2^-x)^n < 1e-9 at n = 200 for x <= 3
    for (State x : {State{1}, State{2}, State{3}}) {
        const auto prof = uniform_tail_profile(ex2, InitialDistribution::point(x), constant_family(threshold_strategy(0), 0, 0), 0, 200);
        CHECK(prof.verdict == TailVerdict::uniformly_absorbing_up_to_horizon);
        CHECK(prof.rows.back().exact_sup_tail < 1e-9);
    }
}

TEST_CASE("Lyapunov condition (a) failure and skipped zero") {
    const auto rep = lyapunov_verify(ex1, mu_pow2(), {all_two_strategy()}, {0, 1}, 10, 60);
    CHECK(rep.verdict == LyapunovVerdict::fails_a);
    CHECK(rep.min_slack < -1e-9);
    CHECK(rep.skipped_zero);
}

TEST_CASE("overflowing candidate") {
    CHECK_THROWS_AS(lyapunov_verify(ex1, mu_pow2(), {all_two_strategy()}, {1}, 5, 1100), EvaluationOverflow);
}

TEST_CASE("minimal condition (a) solution") {
    SolverOptions o;
    o.window = 60;
    for (State x = 1; x <= 20; ++x) o.eval.push_back(x);
    const auto m1 = minimal_condition_a(ex1, o);
    for (State x = 1; x <= 20; ++x) {
        CHECK(m1.at(x) >= 1.0 + p2(static_cast<int>(x)) - 1e-9);
        CHECK(m1.at(x) == doctest::Approx(2.0 + p2(static_cast<int>(x))).epsilon(1e-9));
        // any passing candidate dominates it
        CHECK(mu_pow2_plus2().mu(x) >= m1.at(x) - 1e-9);
    }
    const auto mu = minimal_condition_a(uni, o);
    for (State x = 1; x <= 20; ++x) CHECK(mu.at(x) == doctest::Approx(2.0).epsilon(1e-12));

    ModelSpec one;
    one.name = "one";
    one.actions = {1};
    one.transitions = TableTransitions{{{0, 1, {{0, 1.0}}}, {1, 1, {{0, 1.0}}}}};
    SolverOptions small;
    small.window = 1;
    small.margin = 0;
    const auto m = minimal_condition_a(validate_model(one), small);
    CHECK(m.at(1) == 1.0);
}
