#include <doctest.h>

#include "amdp/bellman.hpp"
#include "amdp/errors.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace amdp;

namespace {

double p2(int k) { return std::ldexp(1.0, k); }

const auto ex1 = make_builtin("example1");
const auto uni = make_builtin("example1_uniform");
const auto ex2 = make_builtin("example2");
const auto d1 = InitialDistribution::point(1);

SolverOptions eval_opts(State window, State last) {
    SolverOptions o;
    o.window = window;
    for (State x = 1; x <= last; ++x) o.eval.push_back(x);
    return o;
}

} // namespace

TEST_CASE("w* on example1 is 2 + 2^x") {
    const auto w = sup_hitting(ex1, eval_opts(60, 20));
    CHECK(w.at(0) == 0.0);
    for (State x = 1; x <= 20; ++x) {
        const double ref = 2.0 + p2(static_cast<int>(x));
        CHECK(std::fabs(w.at(x) - ref) / ref <= 1e-9);
    }
    CHECK(w.residual >= 0.0);
    CHECK(w.monotone);
    CHECK(w.boundary_policy.find("zero") != std::string::npos);
}

TEST_CASE("w* on example1_uniform is 2 everywhere") {
    const auto w = sup_hitting(uni, eval_opts(60, 20));
    CHECK(w.at(0) == 0.0);
    for (State x = 1; x <= 20; ++x) CHECK(w.at(x) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("the closed form satisfies the w* equation exactly") {
    // residual of v = 2 + 2^x in w = 1 + max_a sum_y p w(y), i.e. c = -1 sign-flipped
    const auto v = [](State x) { return x == 0 ? 0.0 : -(2.0 + p2(static_cast<int>(x))); };
    for (State x = 1; x <= 40; ++x) {
        // action 2 attains the minimum of the cost form
        CHECK(bellman_residual(ex1, constant_cost(-1.0), v, x, 2) == 0.0);
        // action 1 has slack 2^{1-x} in the cost form
        CHECK(bellman_residual(ex1, constant_cost(-1.0), v, x, 1) == doctest::Approx(-p2(1 - static_cast<int>(x))).epsilon(1e-12));
    }
}

TEST_CASE("v* under unit running reward") {
    const auto v = inf_cost(ex1, constant_cost(-1.0), eval_opts(60, 20));
    CHECK(v.at(0) == 0.0);
    CHECK(std::fabs(v.at(1) + 4.0) <= 1e-9);
    const auto w = sup_hitting(ex1, eval_opts(60, 20));
    for (State x = 0; x <= 20; ++x) CHECK(std::fabs(v.at(x) + w.at(x)) <= 1e-12 * std::max(1.0, w.at(x)));

    const auto zero = inf_cost(ex1, constant_cost(0.0), eval_opts(60, 20));
    for (State x = 0; x <= 60; ++x) CHECK(zero.at(x) == 0.0);

    const auto pos = inf_cost(ex1, constant_cost(1.0), eval_opts(60, 20));
    for (State x = 1; x <= 20; ++x) CHECK(pos.at(x) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("solver errors") {
    CHECK_THROWS_AS(sup_hitting(ex1, eval_opts(30, 20)), WindowTooSmall);
    CostFunction mixed{[](State x, Action) { return x % 2 ? 1.0 : -1.0; }, 1.0, "mixed"};
    CHECK_THROWS_AS(inf_cost(ex1, mixed, eval_opts(60, 5)), SignIndefiniteCost);
}

TEST_CASE("policy values") {
    const auto c = constant_cost(-1.0);
    CHECK(policy_value(ex1, all_two_strategy(), c, d1).value == -2.0);
    for (int n = 0; n <= 40; ++n)
        CHECK(policy_value(ex1, threshold_strategy(n), c, d1).value == -4.0 + p2(1 - n));
    CHECK(policy_value(ex1, threshold_strategy(3), constant_cost(0.0), d1).value == 0.0);
    CHECK(policy_value(ex2, threshold_strategy(0), constant_cost(0.0), InitialDistribution::point(7)).value == 0.0);
}

TEST_CASE("no family member attains v*(1)") {
    const auto v = inf_cost(ex1, constant_cost(-1.0), eval_opts(60, 1));
    double prev = 0.0;
    for (int n = 0; n <= 40; ++n) {
        const double val = policy_value(ex1, threshold_strategy(n), constant_cost(-1.0), d1).value;
        CHECK(val > -4.0);
        if (n > 0) CHECK(val < prev);
        prev = val;
    }
    CHECK(prev - v.at(1) <= 1e-11);
}

TEST_CASE("Dubins-Savage conditions along all-two") {
    const auto c = constant_cost(-1.0);
    const int N = 30;
    const auto v = inf_cost(ex1, c, eval_opts(N + 1 + kDefaultMargin + 8, N + 1));
    const auto r = dubins_savage_check(ex1, all_two_strategy(), c, v, 1, N);
    CHECK(r.max_abs_residual <= 1e-9);
    for (const auto& [x, res] : r.residuals) CHECK(std::fabs(res) <= 1e-9 * (2.0 + p2(static_cast<int>(x))));
    REQUIRE(r.expectations.size() == static_cast<std::size_t>(N) + 1);
    CHECK(r.expectations[0] == doctest::Approx(v.at(1)).epsilon(1e-15));
    for (int n = 0; n <= N; ++n)
        CHECK(r.expectations[static_cast<std::size_t>(n)] == doctest::Approx(-p2(1 - n) - 2.0).epsilon(1e-9));
    CHECK(r.verdict == DubinsSavageVerdict::violated);
    CHECK(r.floor >= 2.0 - 1e-9);
    CHECK(r.limit == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(r.witness_from <= r.witness_to);
}

TEST_CASE("Dubins-Savage is satisfied where absorption is uniform") {
    const auto c = constant_cost(-1.0);
    const auto v = inf_cost(uni, c, eval_opts(100, 50));
    const auto r = dubins_savage_check(uni, all_two_strategy(), c, v, 1, 40);
    CHECK(r.verdict == DubinsSavageVerdict::satisfied_up_to_horizon);
    CHECK(std::fabs(r.expectations.back()) < 1e-9);
}

TEST_CASE("GA") {
    const auto ga = condition_ga(ex1, constant_cost(-1.0), d1);
    CHECK_FALSE(ga.diverges);
    CHECK(std::fabs(ga.value - 4.0) <= 1e-9);

    const auto nonneg = condition_ga(ex1, constant_cost(1.0), d1);
    CHECK(nonneg.value == 0.0);

    const auto geo = condition_ga(ex2, constant_cost(-1.0), InitialDistribution::geometric(0.4));
    CHECK(geo.diverges);
    CHECK(std::isinf(geo.value));
    CHECK(geo.growth_rate == doctest::Approx(1.2).epsilon(1e-6));
    REQUIRE(geo.partial_sums.size() >= 10);
    for (std::size_t N = 1; N <= 10; ++N)
        CHECK(geo.partial_sums[N - 1] == doctest::Approx(4.0 * (std::pow(1.2, static_cast<double>(N)) - 1.0)).epsilon(1e-9));
}

TEST_CASE("condition (C) witness") {
    const auto fam = threshold_family(0, 30);
    for (int n = 0; n <= 30; ++n) {
        CHECK(condition_c_witness(ex1, constant_cost(-1.0), d1, fam, n).value <= -2.0 + 1e-9);
        CHECK(condition_c_witness(ex1, constant_cost(0.0), d1, fam, n).value == 0.0);
        CHECK(condition_c_witness(uni, constant_cost(-1.0), d1, fam, n).value == doctest::Approx(-p2(1 - n)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(condition_c_witness(ex1, constant_cost(1.0), d1, fam, 3), SignIndefiniteCost);
}

TEST_CASE("property: window solver agrees with plain value iteration on random models") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = 2 + trial % 5;
        const auto model = validate_model(oracle::random_model(rng, k, 1 + trial % 3));
        SolverOptions o;
        o.window = static_cast<State>(k);
        o.margin = 0;
        const auto w = sup_hitting(model, o);
        const auto ref = oracle::sup_values(model, k, 1.0, 5000);
        const auto v = inf_cost(model, constant_cost(-1.0), o);
        for (int x = 1; x <= k; ++x) {
            CHECK(w.at(static_cast<State>(x)) == doctest::Approx(ref[static_cast<std::size_t>(x)]).epsilon(1e-10));
            CHECK(v.at(static_cast<State>(x)) == doctest::Approx(-ref[static_cast<std::size_t>(x)]).epsilon(1e-10));
        }
        CHECK(w.monotone);
    }
}
