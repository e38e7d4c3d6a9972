#include <doctest.h>

#include "amdp/errors.hpp"
#include "amdp/topology.hpp"
#include "oracles.hpp"

#include <cmath>

using namespace amdp;

namespace {

double p2(int k) { return std::ldexp(1.0, k); }

const auto ex1 = make_builtin("example1");
const auto uni = make_builtin("example1_uniform");
const auto ex2 = make_builtin("example2");
const auto d1 = InitialDistribution::point(1);

std::vector<OccupationMeasure> family_occupations(const ValidatedModel& m, int lo, int hi) {
    std::vector<OccupationMeasure> out;
    for (int n = lo; n <= hi; ++n) out.push_back(occupation(m, threshold_strategy(n), d1));
    return out;
}

} // namespace

TEST_CASE("prefixes of all-two, T = 3") {
    const auto pm = prefix_measure(ex1, all_two_strategy(), d1, 3);
    const std::map<Path, double> expected{
        {{1, 2, 0, 1, 0, 1, 0}, 0.5},
        {{1, 2, 2, 2, 0, 1, 0}, 0.25},
        {{1, 2, 2, 2, 3, 2, 0}, 0.125},
        {{1, 2, 2, 2, 3, 2, 4}, 0.125},
    };
    CHECK(pm.paths == expected);
    CHECK(pm.total() == 1.0);
    CHECK(pm.pruned_mass == 0.0);
    // phi^n agrees with all-two on prefixes of length <= n
    CHECK(prefix_measure(ex1, threshold_strategy(3), d1, 3).paths == expected);
}

TEST_CASE("longest all-two prefix has probability 2^-T") {
    for (int T = 1; T <= 12; ++T) {
        const auto pm = prefix_measure(ex1, all_two_strategy(), d1, T);
        CHECK(pm.paths.size() == static_cast<std::size_t>(T) + 1);
        Path longest{1};
        for (int t = 1; t <= T; ++t) {
            longest.push_back(2);
            longest.push_back(static_cast<std::uint64_t>(t) + 1);
        }
        CHECK(pm.paths.at(longest) == p2(-T));
    }
}

TEST_CASE("horizon 0 is the initial law") {
    const auto pm = prefix_measure(ex1, all_two_strategy(), InitialDistribution::table({{1, 0.25}, {4, 0.75}}), 0);
    CHECK(pm.paths == std::map<Path, double>{{{1}, 0.25}, {{4}, 0.75}});
}

TEST_CASE("example2 from 3, T = 2") {
    const auto pm = prefix_measure(ex2, threshold_strategy(0), InitialDistribution::point(3), 2);
    const std::map<Path, double> expected{
        {{3, 1, 3, 1, 3}, 49.0 / 64},
        {{3, 1, 3, 1, 0}, 7.0 / 64},
        {{3, 1, 0, 1, 0}, 1.0 / 8},
    };
    CHECK(pm.paths == expected);
}

TEST_CASE("total variation between prefix laws") {
    const auto phi = all_two_strategy();
    for (int T = 0; T <= 6; ++T) {
        const auto p = prefix_measure(ex1, phi, d1, T);
        CHECK(prefix_tv_distance(p, p) == 0.0);
    }
    CHECK(prefix_tv_distance(prefix_measure(ex1, threshold_strategy(0), d1, 1), prefix_measure(ex1, phi, d1, 1)) == 1.0);
    for (int n = 0; n <= 8; ++n)
        for (int T = 0; T <= 10; ++T) {
            const double tv = prefix_tv_distance(prefix_measure(ex1, threshold_strategy(n), d1, T),
                                                 prefix_measure(ex1, phi, d1, T));
            // phi^n and phi first differ at state n+1, reached by epoch n+1 with probability 2^-n
            CHECK(tv == (T <= n ? 0.0 : p2(-n)));
        }
    CHECK_THROWS_AS(prefix_tv_distance(prefix_measure(ex1, phi, d1, 2), prefix_measure(ex1, phi, d1, 3)),
                    HorizonMismatch);
}

TEST_CASE("property: TV is a metric on random models") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 15; ++trial) {
        const int k = 2 + trial % 3;
        const auto model = validate_model(oracle::random_model(rng, k, 2));
        const auto a = prefix_measure(model, oracle::random_strategy(rng, k, 2), d1, 4);
        const auto b = prefix_measure(model, oracle::random_strategy(rng, k, 2), d1, 4);
        const auto c = prefix_measure(model, oracle::random_strategy(rng, k, 2), d1, 4);
        const double ab = prefix_tv_distance(a, b), ba = prefix_tv_distance(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-15));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-15);
        CHECK(ab <= prefix_tv_distance(a, c) + prefix_tv_distance(c, b) + 1e-15);
    }
}

TEST_CASE("property: mass, marginal and projection consistency on random models") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 15; ++trial) {
        const int k = 2 + trial % 4;
        const auto model = validate_model(oracle::random_model(rng, k, 2));
        const auto pi = oracle::random_strategy(rng, k, 2);
        const auto init = InitialDistribution::table({{1, 0.5}, {static_cast<State>(k), 0.5}});
        PrefixMeasure prev = prefix_measure(model, pi, init, 0);
        for (int T = 1; T <= 5; ++T) {
            const auto pm = prefix_measure(model, pi, init, T);
            CHECK(pm.total() + pm.pruned_mass == doctest::Approx(1.0).epsilon(1e-13));
            const auto marg = marginalize_last(pm);
            CHECK(marg.horizon == T - 1);
            CHECK(prefix_tv_distance(marg, prev) <= 1e-14);

            ForwardOptions fo;
            fo.horizon_cap = T;
            fo.tail_tol = 0.0;
            const auto fwd = occupation_forward(model, pi, init, fo);
            const auto proj = occupation_from_prefix(pm);
            for (const auto& [key, v] : fwd.entries) CHECK(proj.at(key.first, key.second) == doctest::Approx(v).epsilon(1e-13));
            CHECK(proj.total_mass == doctest::Approx(fwd.total_mass).epsilon(1e-13));
            prev = pm;
        }
    }
}

TEST_CASE("pruning and support caps") {
    PrefixOptions po;
    po.epsilon_path = 1e-3;
    const auto pm = prefix_measure(ex1, all_two_strategy(), d1, 15, po);
    CHECK(pm.pruned_mass > 0.0);
    CHECK(pm.total() + pm.pruned_mass == doctest::Approx(1.0).epsilon(1e-15));
    const auto exact = prefix_measure(ex1, all_two_strategy(), d1, 15);
    CHECK(prefix_tv_distance(pm, exact) <= pm.pruned_mass + 1e-15);

    std::mt19937 rng(3);
    const auto model = validate_model(oracle::random_model(rng, 6, 3, 0.01));
    PrefixOptions tiny;
    tiny.max_paths = 10;
    CHECK_THROWS_AS(prefix_measure(model, oracle::random_strategy(rng, 6, 3), d1, 6, tiny), SupportExplosion);
}

TEST_CASE("default tests") {
    const auto tests = default_tests(ex1, 3);
    REQUIRE(tests.size() == 1 + 3 + 3 * 2);
    CHECK(tests[0].g(5, 1) == 1.0);
    CHECK(tests[2].g(2, 1) == 1.0);
    CHECK(tests[2].g(3, 1) == 0.0);
}

TEST_CASE("weak limit report: example1 fails on the total mass") {
    const auto seq = family_occupations(ex1, 0, 20);
    const auto cand = occupation(ex1, all_two_strategy(), d1);
    const auto tests = default_tests(ex1, 5);
    const auto rep = weak_limit_report(seq, cand, tests, 1e-9);
    CHECK_FALSE(rep.all_converged);
    REQUIRE(rep.witness.has_value());
    CHECK(*rep.witness == tests[0].name);
    CHECK(rep.tests[0].verdict == WeakVerdict::diverges_from_candidate);
    CHECK(rep.tests[0].min_deviation == doctest::Approx(2.0 - p2(-9)).epsilon(1e-12));
    for (std::size_t i = 1; i < rep.tests.size(); ++i) CHECK(rep.tests[i].verdict == WeakVerdict::converged_to_candidate);
}

TEST_CASE("weak limit report: example1_uniform converges on every test") {
    const auto seq = family_occupations(uni, 0, 20);
    const auto cand = occupation(uni, all_two_strategy(), d1);
    const auto rep = weak_limit_report(seq, cand, default_tests(uni, 5), 1e-9);
    CHECK(rep.all_converged);
    CHECK_FALSE(rep.witness.has_value());
    CHECK(rep.tests[0].integrals.back() == 2.0);
}

TEST_CASE("discontinuity certificate") {
    std::vector<int> horizons;
    for (int T = 1; T <= 10; ++T) horizons.push_back(T);
    const auto one = constant_integrand(1.0);

    const auto good = discontinuity_witness(ex1, threshold_family(0, 10), all_two_strategy(), d1, horizons, one, 1e-9);
    CHECK(good.valid);
    CHECK(good.gap == 2.0);
    CHECK(good.limit_integral == 2.0);
    CHECK(good.tv_family_index == 10);
    for (const auto& [T, tv] : good.tv_distances) CHECK(tv == 0.0);
    for (const auto& [n, v] : good.integrals) CHECK(v == 4.0 - p2(1 - n));

    const auto flat = discontinuity_witness(uni, threshold_family(0, 10), all_two_strategy(), d1, horizons, one, 1e-9);
    CHECK_FALSE(flat.valid);
    CHECK(flat.gap == 0.0);

    const auto same = discontinuity_witness(ex1, constant_family(all_two_strategy(), 0, 10), all_two_strategy(), d1, horizons, one, 1e-9);
    CHECK_FALSE(same.valid);
    CHECK(same.gap == 0.0);

    // strategic measures far apart: no convergence evidence
    const auto apart = discontinuity_witness(ex1, constant_family(threshold_strategy(0), 0, 10), all_two_strategy(), d1, horizons, one, 1e-9);
    CHECK_FALSE(apart.valid);
}
