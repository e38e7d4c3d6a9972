#include "amdp/montecarlo.hpp"

#include "amdp/errors.hpp"
#include "amdp/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace amdp {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(TrajectoryRng& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

template <class Items, class Prob>
std::size_t pick(const Items& items, Prob prob, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        acc += prob(items[i]);
        if (u < acc) return i;
    }
    return items.size() - 1;
}

State sample_initial(const InitSupport& s, TrajectoryRng& rng) {
    if (s.mass.empty()) throw InvalidArgument("initial distribution has empty support");
    // Truncation deficit is spread proportionally over the listed support.
    const double u = uniform01(rng) * s.retained;
    return s.mass[pick(s.mass, [](const auto& e) { return e.second; }, u)].first;
}

Trajectory run(const ValidatedModel& model, const Strategy& pi, State x0, TrajectoryRng& rng,
               std::uint64_t cap) {
    Trajectory tr;
    tr.initial = x0;
    if (x0 == kAbsorbing) {
        tr.hit_time = 0.0;
        tr.return_time = 1.0;
        return tr;
    }
    State x = x0;
    for (std::uint64_t t = 0; t < cap; ++t) {
        const ActionDistribution d = pi.at(static_cast<int>(t + 1), x);
        const Action a = d.probs[pick(d.probs, [](const auto& e) { return e.second; }, uniform01(rng))].first;
        tr.steps.emplace_back(x, a);
        const Row row = model.row(x, a);
        x = row[pick(row, [](const Transition& e) { return e.prob; }, uniform01(rng))].next;
        if (x == kAbsorbing) {
            tr.hit_time = tr.return_time = static_cast<double>(t + 1);
            return tr;
        }
    }
    tr.capped = true;
    tr.hit_time = tr.return_time = kInf;
    return tr;
}

struct Moments {
    std::uint64_t sum = 0;
    std::uint64_t sumsq = 0;

    void add(std::uint64_t v) {
        sum += v;
        sumsq += v * v;
    }
    Moments& operator+=(const Moments& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        return *this;
    }
};

struct Tally {
    std::map<std::pair<State, Action>, Moments> pairs;
    Moments total, hit, ret;
    std::vector<Moments> tails;
    std::uint64_t capped = 0;

    void merge(const Tally& o) {
        for (const auto& [k, m] : o.pairs) pairs[k] += m;
        total += o.total;
        hit += o.hit;
        ret += o.ret;
        for (std::size_t i = 0; i < tails.size(); ++i) tails[i] += o.tails[i];
        capped += o.capped;
    }
};

Estimate finish(const Moments& m, std::uint64_t n, std::uint64_t seed, double capped_fraction) {
    Estimate e;
    e.n = n;
    e.seed = seed;
    e.capped_fraction = capped_fraction;
    const long double N = static_cast<long double>(n);
    const long double mean = static_cast<long double>(m.sum) / N;
    e.mean = static_cast<double>(mean);
    if (n > 1) {
        const long double ss = static_cast<long double>(m.sumsq) - static_cast<long double>(m.sum) * mean;
        const long double var = std::max(0.0L, ss / (N - 1));
        e.se = static_cast<double>(std::sqrt(var / N));
    }
    return e;
}

} // namespace

TrajectoryRng trajectory_stream(std::uint64_t seed, std::uint64_t index) {
    return TrajectoryRng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

Trajectory sample_trajectory(const ValidatedModel& model, const Strategy& pi,
                             const InitialDistribution& init, TrajectoryRng& rng,
                             std::uint64_t cap) {
    if (cap < 1) throw InvalidArgument("cap must be >= 1");
    return run(model, pi, sample_initial(init.support(), rng), rng, cap);
}

OccupationEstimate estimate_occupation(const ValidatedModel& model, const Strategy& pi,
                                       const InitialDistribution& init,
                                       const SimulationOptions& opts) {
    if (opts.n < 1) throw InvalidArgument("N must be >= 1");
    if (opts.cap < 1) throw InvalidArgument("cap must be >= 1");
    for (int n : opts.tails)
        if (n < 0) throw InvalidArgument("tail index must be >= 0");
    const InitSupport support = init.support();

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, opts.n));

    std::vector<Tally> tallies(threads);
    for (auto& t : tallies) t.tails.resize(opts.tails.size());
    auto work = [&](unsigned w) {
        Tally& tally = tallies[w];
        const std::uint64_t lo = opts.n * w / threads, hi = opts.n * (w + 1) / threads;
        for (std::uint64_t i = lo; i < hi; ++i) {
            auto rng = trajectory_stream(opts.seed, i);
            const Trajectory tr = run(model, pi, sample_initial(support, rng), rng, opts.cap);
            auto steps = tr.steps;
            std::sort(steps.begin(), steps.end());
            for (std::size_t a = 0; a < steps.size();) {
                std::size_t b = a;
                while (b < steps.size() && steps[b] == steps[a]) ++b;
                tally.pairs[steps[a]].add(b - a);
                a = b;
            }
            const std::uint64_t len = tr.steps.size();
            tally.total.add(len);
            tally.hit.add(len);
            tally.ret.add(tr.initial == kAbsorbing ? 1 : len);
            for (std::size_t j = 0; j < opts.tails.size(); ++j) {
                const auto n = static_cast<std::uint64_t>(opts.tails[j]);
                tally.tails[j].add(len > n ? len - n : 0);
            }
            tally.capped += tr.capped ? 1 : 0;
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    Tally all;
    all.tails.resize(opts.tails.size());
    for (const auto& t : tallies) all.merge(t);

    // Pairs never visited by some trajectory contribute zeros, which leave
    // both moment sums unchanged.
    const double cf = static_cast<double>(all.capped) / static_cast<double>(opts.n);
    OccupationEstimate out;
    for (const auto& [k, m] : all.pairs) out.pairs[k] = finish(m, opts.n, opts.seed, cf);
    out.total_mass = finish(all.total, opts.n, opts.seed, cf);
    out.hitting_time = finish(all.hit, opts.n, opts.seed, cf);
    out.return_time = finish(all.ret, opts.n, opts.seed, cf);
    for (std::size_t j = 0; j < opts.tails.size(); ++j)
        out.tails[opts.tails[j]] = finish(all.tails[j], opts.n, opts.seed, cf);
    return out;
}

std::uint64_t resolve_seed(std::uint64_t fallback) {
    const char* env = std::getenv("MDP_SEED");
    if (!env || !*env) return fallback;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    return end && *end == '\0' ? static_cast<std::uint64_t>(v) : fallback;
}

} // namespace amdp
