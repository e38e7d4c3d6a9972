#include <doctest.h>

#include "amdp/errors.hpp"
#include "amdp/occupation.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace amdp;

namespace {

double p2(int k) { return std::ldexp(1.0, k); }

double entry_sum(const OccupationMeasure& eta) {
    double s = 0.0;
    for (const auto& [k, v] : eta.entries) s += v;
    return s;
}

void check_invariants(const OccupationMeasure& eta) {
    for (const auto& [k, v] : eta.entries) {
        CHECK(k.first != kAbsorbing);
        CHECK(v >= 0.0);
    }
    CHECK(eta.total_mass == doctest::Approx(entry_sum(eta)).epsilon(1e-9));
}

const auto ex1 = make_builtin("example1");
const auto uni = make_builtin("example1_uniform");
const auto ex2 = make_builtin("example2");
const auto d1 = InitialDistribution::point(1);

} // namespace

TEST_CASE("closed form under phi^n, both computation paths") {
    for (int n = 0; n <= 12; ++n) {
        const auto phin = threshold_strategy(n);
        ForwardOptions fo;
        fo.horizon_cap = 100'000'000;
        for (const auto& eta : {occupation_stationary(ex1, phin, d1), occupation_forward(ex1, phin, d1, fo)}) {
            check_invariants(eta);
            for (State x = 1; x <= static_cast<State>(n); ++x)
                CHECK(eta.at(x, 2) == doctest::Approx(p2(1 - static_cast<int>(x))).epsilon(1e-12));
            CHECK(eta.at(static_cast<State>(n) + 1, 1) == doctest::Approx(2.0).epsilon(1e-12));
            CHECK(eta.total_mass == doctest::Approx(4.0 - p2(1 - n)).epsilon(1e-12));
        }
    }
}

TEST_CASE("stationary solve is exact in binary floating point") {
    for (int n = 0; n <= 40; ++n) {
        const auto eta = occupation_stationary(ex1, threshold_strategy(n), d1);
        for (State x = 1; x <= static_cast<State>(n); ++x) CHECK(eta.at(x, 2) == p2(1 - static_cast<int>(x)));
        CHECK(eta.at(static_cast<State>(n) + 1, 1) == 2.0);
        CHECK(eta.entries.size() == static_cast<std::size_t>(n) + 1);
        CHECK(eta.total_mass == 4.0 - p2(1 - n));
        CHECK(eta.unresolved_bound == 0.0);
    }
}

TEST_CASE("forward pass, phi^4 with cap 10^4") {
    ForwardOptions fo;
    fo.horizon_cap = 10'000;
    const auto eta = occupation_forward(ex1, threshold_strategy(4), d1, fo);
    for (State x = 1; x <= 4; ++x) CHECK(eta.at(x, 2) == doctest::Approx(p2(1 - static_cast<int>(x))).epsilon(1e-12));
    CHECK(eta.at(5, 1) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(eta.marginal(6) == 0.0);
    CHECK(eta.unresolved_bound <= 1e-12);
    CHECK(eta.bound_certified);
}

TEST_CASE("start at the absorbing state") {
    const auto d0 = InitialDistribution::point(0);
    for (const auto& pi : {all_two_strategy(), threshold_strategy(3)}) {
        const auto a = occupation_forward(ex1, pi, d0);
        const auto b = occupation_stationary(ex1, pi, d0);
        CHECK(a.entries.empty());
        CHECK(b.entries.empty());
        CHECK(a.total_mass == 0.0);
        CHECK(b.total_mass == 0.0);
    }
}

TEST_CASE("explicit windows") {
    SUBCASE("all-two on L = 64") {
        StationaryOptions so;
        so.window = 64;
        const auto eta = occupation_stationary(ex1, all_two_strategy(), d1, so);
        for (State x = 1; x <= 20; ++x) CHECK(eta.at(x, 2) == p2(1 - static_cast<int>(x)));
        CHECK(eta.total_mass == doctest::Approx(2.0).epsilon(1e-15));
    }
    SUBCASE("phi^n on L = n + 2") {
        for (int n = 0; n <= 20; ++n) {
            StationaryOptions so;
            so.window = static_cast<State>(n) + 2;
            CHECK(occupation_stationary(ex1, threshold_strategy(n), d1, so).total_mass == 4.0 - p2(1 - n));
        }
    }
    SUBCASE("example2 on L = x0 + 1") {
        for (State x0 = 1; x0 <= 20; ++x0) {
            StationaryOptions so;
            so.window = x0 + 1;
            const auto eta = occupation_stationary(ex2, threshold_strategy(0), InitialDistribution::point(x0), so);
            CHECK(eta.total_mass == p2(static_cast<int>(x0)));
        }
    }
    SUBCASE("upward leak beyond tolerance") {
        StationaryOptions so;
        so.window = 5;
        CHECK_THROWS_AS(occupation_stationary(ex1, all_two_strategy(), d1, so), TruncationLeak);
    }
}

TEST_CASE("integrals") {
    for (int n = 1; n <= 10; ++n) {
        const auto eta = occupation(ex1, threshold_strategy(n), d1);
        for (State j = 1; j <= static_cast<State>(n); ++j)
            CHECK(integrate(eta, state_indicator(j)).value == p2(1 - static_cast<int>(j)));
    }
    const auto phi = occupation(ex1, all_two_strategy(), d1);
    CHECK(integrate(phi, constant_integrand(1.0)).value == 2.0);
    CHECK(integrate(phi, constant_integrand(0.0)).value == 0.0);
    CHECK(integrate(phi, pair_indicator(3, 2)).value == 0.25);
    CHECK(integrate(phi, pair_indicator(3, 1)).value == 0.0);
}

TEST_CASE("expected hitting times") {
    CHECK(expected_hitting_time(ex1, all_two_strategy(), d1).value == 2.0);
    CHECK(expected_hitting_time(ex2, threshold_strategy(0), InitialDistribution::point(5)).value == 32.0);
    for (std::size_t N = 1; N <= 31; ++N) {
        const auto init = InitialDistribution::geometric_terms(0.4, N);
        const double oracle = 4.0 * (std::pow(1.2, static_cast<double>(N)) - 1.0);
        const auto eta = occupation(ex2, threshold_strategy(0), init);
        CHECK(eta.total_mass == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(eta.init_deficit == doctest::Approx(std::pow(0.6, static_cast<double>(N))).epsilon(1e-12));
    }
    CHECK(expected_hitting_time(ex2, threshold_strategy(0), InitialDistribution::geometric_terms(0.4, 31)).value > 1000.0);
}

TEST_CASE("tail masses") {
    for (int n = 0; n <= 30; ++n) {
        CHECK(tail_mass_from(ex1, threshold_strategy(n), d1, n).value >= 2.0);
        CHECK(tail_mass_from(ex1, threshold_strategy(n), InitialDistribution::point(0), n).value == 0.0);
        for (const auto& pi : {all_two_strategy(), threshold_strategy(3), threshold_strategy(n)})
            CHECK(tail_mass_from(uni, pi, d1, n).value == p2(1 - n));
    }
}

TEST_CASE("tail from 0 is the hitting time; decomposition at every n") {
    for (const auto& pi : {threshold_strategy(5), all_two_strategy(), threshold_strategy(0)}) {
        const double hit = expected_hitting_time(ex1, pi, d1).value;
        CHECK(tail_mass_from(ex1, pi, d1, 0).value == doctest::Approx(hit).epsilon(1e-12));
        for (int n = 1; n <= 12; ++n) {
            ForwardOptions head;
            head.horizon_cap = n;
            head.tail_tol = 0.0;
            const double before = occupation_forward(ex1, pi, d1, head).total_mass;
            CHECK(before + tail_mass_from(ex1, pi, d1, n).value == doctest::Approx(hit).epsilon(1e-9));
        }
    }
}

TEST_CASE("tail occupation of phi^n after epoch n sits on state n+1") {
    for (int n = 0; n <= 15; ++n) {
        const auto eta = tail_occupation(ex1, threshold_strategy(n), d1, n);
        CHECK(eta.entries.size() == 1);
        CHECK(eta.at(static_cast<State>(n) + 1, 1) == 2.0);
    }
}

TEST_CASE("Markov strategies run through the forward pass") {
    // pi_t = phi^t: X_{t-1} <= t, so the action is always 2.
    const auto pi = Strategy::markov(
        [](int t, State x) { return ActionDistribution::point(threshold_strategy(t).action(x)); }, "phi_t");
    const auto eta = occupation(ex1, pi, d1);
    const auto ref = occupation(ex1, all_two_strategy(), d1);
    for (State x = 1; x <= 20; ++x) CHECK(eta.at(x, 2) == doctest::Approx(ref.at(x, 2)).epsilon(1e-12));
    CHECK(eta.total_mass == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(occupation_stationary(ex1, pi, d1), InvalidArgument);
}

TEST_CASE("horizon cap without a certificate is flagged") {
    ForwardOptions fo;
    fo.horizon_cap = 100;
    const auto eta = occupation_forward(ex1, threshold_strategy(20), d1, fo);
    CHECK(eta.non_absorbing_warning);
    CHECK_FALSE(eta.bound_certified);
    CHECK(std::isinf(eta.unresolved_bound));

    fo.continuation_bound = 2.0 + p2(21);
    const auto bounded = occupation_forward(ex1, threshold_strategy(20), d1, fo);
    CHECK(std::isfinite(bounded.unresolved_bound));
    CHECK(bounded.unresolved_bound == doctest::Approx(bounded.surviving_mass * (2.0 + p2(21))));
    // the missing mass is really there
    CHECK(bounded.total_mass + bounded.unresolved_bound >= 4.0 - p2(-19));
}

TEST_CASE("property: both paths match a dense linear solve on random models") {
    std::mt19937 rng(20240611);
    for (int trial = 0; trial < 40; ++trial) {
        const int k = 2 + trial % 6;
        const int na = 1 + trial % 3;
        const auto model = validate_model(oracle::random_model(rng, k, na));
        const auto pi = oracle::random_strategy(rng, k, na);
        std::vector<double> nu(static_cast<std::size_t>(k), 0.0);
        StateMass init;
        for (int x = 1; x <= k; ++x) {
            nu[static_cast<std::size_t>(x - 1)] = 1.0 / k;
            init.emplace_back(static_cast<State>(x), 1.0 / k);
        }
        const auto ref = oracle::occupation(model, pi, k, nu);
        const auto solved = occupation_stationary(model, pi, InitialDistribution::table(init));
        ForwardOptions fo;
        fo.horizon_cap = 10'000'000;
        const auto fwd = occupation_forward(model, pi, InitialDistribution::table(init), fo);
        check_invariants(solved);
        check_invariants(fwd);
        for (const auto& [key, v] : ref) {
            CHECK(solved.at(key.first, key.second) == doctest::Approx(v).epsilon(1e-10));
            CHECK(fwd.at(key.first, key.second) == doctest::Approx(v).epsilon(1e-9));
        }
    }
}
