#include <doctest.h>

#include "amdp/errors.hpp"
#include "amdp/montecarlo.hpp"
#include "amdp/occupation.hpp"

#include <cmath>
#include <cstdlib>

using namespace amdp;

namespace {

double p2(int k) { return std::ldexp(1.0, k); }

const auto ex1 = make_builtin("example1");
const auto ex2 = make_builtin("example2");
const auto d1 = InitialDistribution::point(1);

bool covers(const Estimate& e, double truth, double k = 4.0) { return std::fabs(e.mean - truth) <= k * e.se; }

SimulationOptions opts(std::uint64_t n, std::uint64_t seed, unsigned threads = 1) {
    SimulationOptions o;
    o.n = n;
    o.seed = seed;
    o.threads = threads;
    return o;
}

} // namespace

TEST_CASE("streams depend only on seed and index") {
    auto a = trajectory_stream(7, 3), b = trajectory_stream(7, 3), c = trajectory_stream(7, 4);
    const auto first = a();
    CHECK(first == b());
    CHECK(first != c());
    CHECK(trajectory_stream(7, 3)() != trajectory_stream(8, 3)());
}

TEST_CASE("trajectories started at the absorbing state") {
    auto rng = trajectory_stream(1, 0);
    const auto t = sample_trajectory(ex1, all_two_strategy(), InitialDistribution::point(0), rng, 100);
    CHECK(t.steps.empty());
    CHECK(t.hit_time == 0.0);
    CHECK(t.return_time == 1.0);
    CHECK_FALSE(t.capped);

    const auto est = estimate_occupation(ex1, all_two_strategy(), InitialDistribution::point(0), opts(1000, 1));
    CHECK(est.total_mass.mean == 0.0);
    CHECK(est.total_mass.se == 0.0);
    CHECK(est.return_time.mean == 1.0);
    CHECK(est.pairs.empty());
}

TEST_CASE("sampled paths follow the strategy and the kernel") {
    for (std::uint64_t i = 0; i < 200; ++i) {
        auto rng = trajectory_stream(11, i);
        const auto t = sample_trajectory(ex1, threshold_strategy(3), d1, rng, 1000);
        REQUIRE_FALSE(t.capped);
        CHECK(t.hit_time == static_cast<double>(t.steps.size()));
        CHECK(t.return_time == t.hit_time);
        for (std::size_t s = 0; s < t.steps.size(); ++s) {
            CHECK(t.steps[s].second == threshold_strategy(3).action(t.steps[s].first));
            if (s > 0) CHECK(t.steps[s].first >= t.steps[s - 1].first);
            CHECK(t.steps[s].first <= 4);
        }
    }
    auto rng = trajectory_stream(1, 0);
    CHECK_THROWS_AS(sample_trajectory(ex1, all_two_strategy(), d1, rng, 0), InvalidArgument);
}

TEST_CASE("capped trajectories") {
    // action 1 at state 21 absorbs with probability 2^-21 per step
    SimulationOptions o = opts(200, 1);
    o.cap = 30;
    const auto est = estimate_occupation(ex1, threshold_strategy(20), InitialDistribution::point(21), o);
    CHECK(est.total_mass.capped_fraction > 0.99);
    CHECK(est.total_mass.capped_fraction <= 1.0);
    CHECK(est.hitting_time.mean <= 30.0);
}

TEST_CASE("a single sample has zero standard error") {
    const auto est = estimate_occupation(ex1, all_two_strategy(), d1, opts(1, 9));
    CHECK(est.total_mass.n == 1);
    CHECK(est.total_mass.se == 0.0);
}

TEST_CASE("bit-identical across thread counts") {
    SimulationOptions o = opts(20000, 123, 1);
    o.tails = {2, 5};
    const auto a = estimate_occupation(ex1, threshold_strategy(5), d1, o);
    for (unsigned th : {2u, 3u, 8u}) {
        o.threads = th;
        const auto b = estimate_occupation(ex1, threshold_strategy(5), d1, o);
        CHECK(a.total_mass.mean == b.total_mass.mean);
        CHECK(a.total_mass.se == b.total_mass.se);
        CHECK(a.hitting_time.mean == b.hitting_time.mean);
        CHECK(a.tails.at(5).mean == b.tails.at(5).mean);
        REQUIRE(a.pairs.size() == b.pairs.size());
        for (const auto& [k, e] : a.pairs) CHECK(b.pairs.at(k).mean == e.mean);
    }
}

TEST_CASE("estimates cover analytic values") {
    SUBCASE("all-two") {
        const auto est = estimate_occupation(ex1, all_two_strategy(), d1, opts(100000, 1));
        CHECK(covers(est.total_mass, 2.0));
        CHECK(covers(est.hitting_time, 2.0));
        CHECK(covers(est.pairs.at({1, 2}), 1.0));
        CHECK(covers(est.pairs.at({3, 2}), 0.25));
        CHECK(est.total_mass.se > 0.0);
    }
    SUBCASE("example2 from 1") {
        const auto est = estimate_occupation(ex2, threshold_strategy(0), d1, opts(100000, 2));
        CHECK(covers(est.hitting_time, 2.0));
    }
    SUBCASE("phi^5 with tails") {
        SimulationOptions o = opts(100000, 3);
        o.tails = {5};
        const auto est = estimate_occupation(ex1, threshold_strategy(5), d1, o);
        CHECK(covers(est.total_mass, 4.0 - p2(-4)));
        const double tail = tail_mass_from(ex1, threshold_strategy(5), d1, 5).value;
        CHECK(tail >= 2.0);
        CHECK(covers(est.tails.at(5), tail));
        CHECK(covers(est.pairs.at({6, 1}), 2.0));
    }
}

TEST_CASE("MDP_SEED overrides the seed") {
    ::unsetenv("MDP_SEED");
    CHECK(resolve_seed(5) == 5);
    ::setenv("MDP_SEED", "42", 1);
    CHECK(resolve_seed(5) == 42);
    ::setenv("MDP_SEED", "junk", 1);
    CHECK(resolve_seed(5) == 5);
    ::unsetenv("MDP_SEED");
}
