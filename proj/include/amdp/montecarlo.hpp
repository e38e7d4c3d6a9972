#pragma once

#include "amdp/model.hpp"
#include "amdp/strategy.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace amdp {

/// One sampled path, stopped at absorption or after `cap` decisions.
struct Trajectory {
    State initial = 0;
    std::vector<std::pair<State, Action>> steps;  ///< (X_t, A_{t+1}), t = 0, 1, ...
    double hit_time = 0.0;     ///< T_0 = inf{t >= 0 : X_t = 0}; +inf when capped
    double return_time = 0.0;  ///< tau_0 = inf{t >= 1 : X_t = 0}; +inf when capped
    bool capped = false;
};

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double capped_fraction = 0.0;
};

/// SplitMix64: a counter-based 64-bit generator. Satisfies
/// UniformRandomBitGenerator, so it works with <random> distributions.
class SplitMix64 {
public:
    using result_type = std::uint64_t;
    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

using TrajectoryRng = SplitMix64;

/// The random stream of trajectory `index`: a function of (seed, index) only.
TrajectoryRng trajectory_stream(std::uint64_t seed, std::uint64_t index);

/// Ancestral sampling init -> pi -> kernel. Throws InvalidArgument if cap < 1.
Trajectory sample_trajectory(const ValidatedModel& model, const Strategy& pi,
                             const InitialDistribution& init, TrajectoryRng& rng,
                             std::uint64_t cap);

struct SimulationOptions {
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
    std::uint64_t cap = 10000;
    unsigned threads = 0;    ///< 0 = hardware concurrency
    std::vector<int> tails;  ///< n for which E[sum_{t >= n} 1{X_t != 0}] is estimated
};

struct OccupationEstimate {
    std::map<std::pair<State, Action>, Estimate> pairs;
    Estimate total_mass;
    Estimate hitting_time;  ///< capped paths contribute their cap
    Estimate return_time;
    std::map<int, Estimate> tails;
};

/// Empirical visit frequencies. Counts are aggregated as integers, so the
/// result is bit-identical for every thread count.
OccupationEstimate estimate_occupation(const ValidatedModel& model, const Strategy& pi,
                                       const InitialDistribution& init,
                                       const SimulationOptions& opts);

/// MDP_SEED from the environment when set and numeric, else `fallback`.
std::uint64_t resolve_seed(std::uint64_t fallback);

} // namespace amdp
