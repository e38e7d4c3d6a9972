#include "amdp/absorption.hpp"
#include "amdp/bellman.hpp"
#include "amdp/errors.hpp"
#include "amdp/io.hpp"
#include "amdp/montecarlo.hpp"
#include "amdp/occupation.hpp"
#include "amdp/report.hpp"
#include "amdp/topology.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace amdp;
using nlohmann::json;

namespace {

struct Common {
    std::string model = "example1";
    std::string init;
    std::string format = "tsv";
};

void add_common(CLI::App* cmd, Common& c, bool with_init = true) {
    cmd->add_option("--model", c.model, "builtin id (example1, example1_uniform, example2) or model file")
        ->capture_default_str();
    if (with_init)
        cmd->add_option("--init", c.init, "point:x | geometric:q[:eps] | table:x=p,...; defaults to the "
                                          "model file's initial law, else point:1");
    cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"tsv", "json"}))->capture_default_str();
}

struct Loaded {
    ValidatedModel model;
    InitialDistribution init;
};

Loaded load(const Common& c) {
    const ModelFile file = load_model(c.model);
    ValidatedModel model = validate_model_file(file);
    if (!c.init.empty()) return {std::move(model), parse_init(c.init)};
    if (file.initial) return {std::move(model), *file.initial};
    return {std::move(model), InitialDistribution::point(1)};
}

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json jnum(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<State> to_states(const std::string& list) {
    std::vector<State> out;
    for (long long v : parse_int_list(list)) {
        if (v < 0) throw InvalidArgument("states must be >= 0");
        out.push_back(static_cast<State>(v));
    }
    return out;
}

json occupation_json(const OccupationMeasure& eta) {
    json entries = json::array();
    for (const auto& [k, m] : eta.entries) entries.push_back({{"state", k.first}, {"action", k.second}, {"mass", m}});
    return {{"entries", entries},
            {"total", jnum(eta.total_mass)},
            {"unresolved", jnum(eta.unresolved_bound)},
            {"bound_certified", eta.bound_certified},
            {"non_absorbing_warning", eta.non_absorbing_warning},
            {"init_deficit", jnum(eta.init_deficit)}};
}

json estimate_json(const Estimate& e) {
    return {{"mean", jnum(e.mean)}, {"se", jnum(e.se)}, {"n", e.n}, {"seed", e.seed}, {"capped_fraction", e.capped_fraction}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Occupation measures, value functions and absorption certificates for absorbing MDPs"};
    app.require_subcommand(1);
    int exit_code = 0;

    // occupation
    Common occ_c;
    std::string occ_strategy = "all2", occ_method = "auto";
    long occ_cap = 1'000'000;
    double occ_tol = 1e-12;
    auto* occ = app.add_subcommand("occupation", "occupation measure of a strategy");
    add_common(occ, occ_c);
    occ->add_option("--strategy", occ_strategy, "phi:n | all2 | file:<path>")->capture_default_str();
    occ->add_option("--method", occ_method, "auto | forward | stationary")
        ->check(CLI::IsMember({"auto", "forward", "stationary"}))
        ->capture_default_str();
    occ->add_option("--cap", occ_cap, "forward pass horizon cap (selects the forward pass)")->capture_default_str();
    occ->add_option("--tol", occ_tol, "forward pass early-stop tolerance")->capture_default_str();
    occ->callback([&] {
        const Loaded l = load(occ_c);
        const Strategy pi = parse_strategy(occ_strategy);
        OccupationMeasure eta;
        const bool forward = occ_method == "forward" || (occ_method == "auto" && (occ->count("--cap") || !pi.is_stationary()));
        if (forward) {
            ForwardOptions fo;
            fo.horizon_cap = occ_cap;
            fo.tail_tol = occ_tol;
            eta = occupation_forward(l.model, pi, l.init, fo);
        } else {
            eta = occupation_stationary(l.model, pi, l.init);
        }
        if (occ_c.format == "json") {
            print_json(occupation_json(eta));
            return;
        }
        std::cout << "state\taction\tmass\n";
        for (const auto& [k, m] : eta.entries) std::cout << k.first << "\t" << k.second << "\t" << num(m) << "\n";
        std::cout << "# total " << num(eta.total_mass) << " unresolved " << num(eta.unresolved_bound) << "\n";
        if (eta.non_absorbing_warning) std::cout << "# warning: mass still transient at the horizon cap\n";
    });

    // bellman
    Common bel_c;
    std::string bel_mode = "sup-hitting", bel_cost = "const:-1", bel_eval;
    SolverOptions bel_opts;
    auto* bel = app.add_subcommand("bellman", "minimal Bellman solutions on a finite window");
    add_common(bel, bel_c, false);
    bel->add_option("--mode", bel_mode)->check(CLI::IsMember({"sup-hitting", "inf-cost"}))->capture_default_str();
    bel->add_option("--cost", bel_cost, "const:v (inf-cost mode)")->capture_default_str();
    bel->add_option("--window", bel_opts.window, "window size L")->capture_default_str();
    bel->add_option("--tol", bel_opts.tol, "relative sweep tolerance")->capture_default_str();
    bel->add_option("--margin", bel_opts.margin, "distance kept between evaluated states and L")->capture_default_str();
    bel->add_option("--eval", bel_eval, "states to print, e.g. 1,2,5..10 (default: 1..L-margin)");
    bel->callback([&] {
        const Loaded l = load(bel_c);
        SolverOptions o = bel_opts;
        if (!bel_eval.empty()) o.eval = to_states(bel_eval);
        const ValueWindow w = bel_mode == "sup-hitting" ? sup_hitting(l.model, o)
                                                         : inf_cost(l.model, parse_cost(bel_cost), o);
        std::vector<State> states = o.eval;
        if (states.empty())
            for (State x = 0; x + o.margin <= w.window; ++x) states.push_back(x);
        if (bel_c.format == "json") {
            json values = json::array();
            for (State x : states) values.push_back({{"state", x}, {"value", jnum(w.at(x))}});
            print_json({{"window", w.window}, {"boundary_policy", w.boundary_policy}, {"residual", w.residual},
                        {"sweeps", w.sweeps}, {"monotone", w.monotone}, {"values", values}});
            return;
        }
        std::cout << "state\tvalue\n";
        for (State x : states) std::cout << x << "\t" << num(w.at(x)) << "\n";
        std::cout << "# window " << w.window << " sweeps " << w.sweeps << " residual " << num(w.residual)
                  << " boundary " << w.boundary_policy << "\n";
    });

    // conditions
    Common con_c;
    std::string con_cost = "const:-1", con_family = "phi", con_n = "0..30";
    auto* con = app.add_subcommand("conditions", "sufficient condition (GA) and the (C) witness");
    add_common(con, con_c);
    con->add_option("--cost", con_cost)->capture_default_str();
    con->add_option("--family", con_family, "phi | phi:lo..hi")->capture_default_str();
    con->add_option("--n", con_n, "witness indices")->capture_default_str();
    con->callback([&] {
        const Loaded l = load(con_c);
        const CostFunction c = parse_cost(con_cost);
        const GaResult ga = condition_ga(l.model, c, l.init);
        const auto ns = parse_int_list(con_n);
        const StrategyFamily fam = parse_family(con_family, static_cast<int>(ns.front()), static_cast<int>(ns.back()));
        std::vector<std::pair<long long, BoundedValue>> wit;
        for (long long n : ns) wit.emplace_back(n, condition_c_witness(l.model, c, l.init, fam, static_cast<int>(n)));
        if (con_c.format == "json") {
            json w = json::array();
            for (const auto& [n, v] : wit) w.push_back({{"n", n}, {"value", jnum(v.value)}, {"error_bound", jnum(v.error_bound)}});
            print_json({{"ga", {{"value", jnum(ga.value)}, {"diverges", ga.diverges}, {"error_bound", jnum(ga.error_bound)}}},
                        {"c_witness", w}});
            return;
        }
        std::cout << "# GA " << num(ga.value) << (ga.diverges ? " (diverges)" : "") << " error_bound "
                  << num(ga.error_bound) << "\n";
        std::cout << "n\tc_witness\n";
        for (const auto& [n, v] : wit) std::cout << n << "\t" << num(v.value) << "\n";
    });

    // tail
    Common tail_c;
    std::string tail_family = "phi", tail_n = "1..30";
    auto* tail = app.add_subcommand("tail", "uniform-absorption tail profile");
    add_common(tail, tail_c);
    tail->add_option("--family", tail_family, "phi | phi:lo..hi (bare phi spans --n)")->capture_default_str();
    tail->add_option("--n", tail_n, "tail indices lo..hi")->capture_default_str();
    tail->callback([&] {
        const Loaded l = load(tail_c);
        const auto [lo, hi] = parse_range(tail_n);
        const StrategyFamily fam = parse_family(tail_family, static_cast<int>(lo), static_cast<int>(hi));
        const TailProfile p = uniform_tail_profile(l.model, l.init, fam, static_cast<int>(lo), static_cast<int>(hi));
        if (tail_c.format == "json") {
            json rows = json::array();
            for (const auto& r : p.rows)
                rows.push_back({{"n", r.n}, {"family_sup_tail", jnum(r.family_sup_tail)}, {"argmax", r.argmax_member},
                                {"exact_sup_tail", jnum(r.exact_sup_tail)}});
            print_json({{"rows", rows}, {"verdict", to_string(p.verdict)}, {"floor", jnum(p.trend.floor)}});
            return;
        }
        std::cout << "n\tfamily_sup_tail\targmax\texact_sup_tail\n";
        for (const auto& r : p.rows)
            std::cout << r.n << "\t" << num(r.family_sup_tail) << "\t" << r.argmax_member << "\t" << num(r.exact_sup_tail) << "\n";
        std::cout << "# verdict " << to_string(p.verdict) << " floor " << num(p.trend.floor) << "\n";
    });

    // lyapunov
    Common lya_c;
    std::string lya_mu = "builtin:paper", lya_strategy = "all2", lya_states = "1,2,3";
    int lya_horizon = 60;
    State lya_window = 40;
    auto* lya = app.add_subcommand("lyapunov", "verify a uniform Lyapunov candidate");
    add_common(lya, lya_c, false);
    lya->add_option("--mu", lya_mu, "builtin:paper | builtin:pow2 | file:<path>")->capture_default_str();
    lya->add_option("--strategy", lya_strategy, "deterministic stationary strategies, ';' separated")->capture_default_str();
    lya->add_option("--states", lya_states)->capture_default_str();
    lya->add_option("--horizon", lya_horizon)->capture_default_str();
    lya->add_option("--window", lya_window, "states checked for the drift inequality")->capture_default_str();
    lya->callback([&] {
        const Loaded l = load(lya_c);
        std::vector<Strategy> strategies;
        std::istringstream in(lya_strategy);
        for (std::string s; std::getline(in, s, ';');) strategies.push_back(parse_strategy(s));
        const LyapunovReport rep = lyapunov_verify(l.model, parse_mu(lya_mu), strategies, to_states(lya_states),
                                                   lya_horizon, lya_window);
        if (lya_c.format == "json") {
            json a = json::array(), c = json::array();
            for (const auto& s : rep.condition_a) a.push_back({{"state", s.state}, {"action", s.action}, {"slack", jnum(s.slack)}});
            for (const auto& s : rep.condition_c) {
                json vals = json::array();
                for (double v : s.values) vals.push_back(jnum(v));
                c.push_back({{"strategy", s.strategy}, {"start", s.start}, {"values", vals},
                             {"floor", jnum(s.trend.floor)}, {"witnessed", s.witnessed}});
            }
            print_json({{"condition_a", a}, {"min_slack", jnum(rep.min_slack)}, {"condition_b", rep.condition_b},
                        {"condition_c", c}, {"verdict", to_string(rep.verdict)}});
            return;
        }
        std::cout << "state\taction\tslack\n";
        for (const auto& s : rep.condition_a) std::cout << s.state << "\t" << s.action << "\t" << num(s.slack) << "\n";
        std::cout << "# condition (b): " << rep.condition_b << "\n";
        std::cout << "strategy\tstart\tt\te_t\n";
        for (const auto& s : rep.condition_c)
            for (std::size_t t = 0; t < s.values.size(); ++t)
                std::cout << s.strategy << "\t" << s.start << "\t" << t << "\t" << num(s.values[t]) << "\n";
        if (rep.skipped_zero) std::cout << "# start state 0 skipped\n";
        std::cout << "# verdict " << to_string(rep.verdict) << "\n";
    });

    // prefix
    Common pre_c;
    std::string pre_strategy = "all2";
    int pre_T = 5;
    double pre_eps = 0.0;
    auto* pre = app.add_subcommand("prefix", "finite-horizon marginal of the strategic measure");
    add_common(pre, pre_c);
    pre->add_option("--strategy", pre_strategy)->capture_default_str();
    pre->add_option("-T,--horizon", pre_T)->capture_default_str();
    pre->add_option("--eps", pre_eps, "prune paths below this probability")->capture_default_str();
    pre->callback([&] {
        const Loaded l = load(pre_c);
        PrefixOptions po;
        po.epsilon_path = pre_eps;
        const PrefixMeasure p = prefix_measure(l.model, parse_strategy(pre_strategy), l.init, pre_T, po);
        auto join = [](const Path& path) {
            std::string s;
            for (std::size_t i = 0; i < path.size(); ++i) s += (i ? "," : "") + std::to_string(path[i]);
            return s;
        };
        if (pre_c.format == "json") {
            json paths = json::array();
            for (const auto& [path, prob] : p.paths) paths.push_back({{"path", path}, {"probability", prob}});
            print_json({{"horizon", p.horizon}, {"paths", paths}, {"pruned_mass", p.pruned_mass}});
            return;
        }
        std::cout << "path\tprobability\n";
        for (const auto& [path, prob] : p.paths) std::cout << join(path) << "\t" << num(prob) << "\n";
        std::cout << "# pruned " << num(p.pruned_mass) << "\n";
    });

    // weak-test
    Common weak_c;
    std::string weak_family = "phi:1..30", weak_limit = "all2", weak_tests;
    double weak_tol = 1e-9;
    auto* weak = app.add_subcommand("weak-test", "does a sequence of occupation measures converge weakly?");
    add_common(weak, weak_c);
    weak->add_option("--family", weak_family)->capture_default_str();
    weak->add_option("--limit", weak_limit, "candidate limit strategy")->capture_default_str();
    weak->add_option("--tests", weak_tests, "const,dj:1..10,pair:j:a (default: const, dj and pairs for j <= 10)");
    weak->add_option("--tol", weak_tol)->capture_default_str();
    weak->callback([&] {
        const Loaded l = load(weak_c);
        const StrategyFamily fam = parse_family(weak_family, 1, 30);
        std::vector<OccupationMeasure> seq;
        for (int n = fam.lo; n <= fam.hi; ++n) seq.push_back(occupation(l.model, fam.at(n), l.init));
        const auto tests = weak_tests.empty() ? default_tests(l.model, 10) : parse_tests(weak_tests);
        const auto rep = weak_limit_report(seq, occupation(l.model, parse_strategy(weak_limit), l.init), tests, weak_tol);
        if (weak_c.format == "json") {
            json t = json::array();
            for (const auto& r : rep.tests)
                t.push_back({{"test", r.test}, {"candidate", jnum(r.candidate)}, {"oscillation", jnum(r.oscillation)},
                             {"max_deviation", jnum(r.max_deviation)}, {"verdict", to_string(r.verdict)}});
            print_json({{"tests", t}, {"all_converged", rep.all_converged},
                        {"witness", rep.witness ? json(*rep.witness) : json(nullptr)}});
            return;
        }
        std::cout << "test\tcandidate\tlast\toscillation\tmax_deviation\tverdict\n";
        for (const auto& r : rep.tests)
            std::cout << r.test << "\t" << num(r.candidate) << "\t" << num(r.integrals.back()) << "\t"
                      << num(r.oscillation) << "\t" << num(r.max_deviation) << "\t" << to_string(r.verdict) << "\n";
        std::cout << "# all_converged " << (rep.all_converged ? "yes" : "no");
        if (rep.witness) std::cout << " witness " << *rep.witness;
        std::cout << "\n";
    });

    // witness
    Common wit_c;
    std::string wit_family = "phi", wit_limit = "all2", wit_T = "1..10", wit_test = "const";
    double wit_tol = 1e-9;
    auto* wit = app.add_subcommand("witness", "discontinuity certificate for the projection to occupation measures");
    add_common(wit, wit_c);
    wit->add_option("--family", wit_family, "phi | phi:lo..hi (bare phi spans 1..max T)")->capture_default_str();
    wit->add_option("--limit", wit_limit)->capture_default_str();
    wit->add_option("--T", wit_T, "horizons")->capture_default_str();
    wit->add_option("--test", wit_test, "one test function")->capture_default_str();
    wit->add_option("--tol", wit_tol)->capture_default_str();
    wit->callback([&] {
        const Loaded l = load(wit_c);
        std::vector<int> horizons;
        for (long long T : parse_int_list(wit_T)) horizons.push_back(static_cast<int>(T));
        const int top = *std::max_element(horizons.begin(), horizons.end());
        const auto tests = parse_tests(wit_test);
        if (tests.size() != 1) throw InvalidArgument("--test takes exactly one test function");
        const auto cert = discontinuity_witness(l.model, parse_family(wit_family, 1, top), parse_strategy(wit_limit),
                                                l.init, horizons, tests.front(), wit_tol);
        json tv = json::array(), ints = json::array();
        for (const auto& [T, d] : cert.tv_distances) tv.push_back({{"T", T}, {"tv", jnum(d)}});
        for (const auto& [n, v] : cert.integrals) ints.push_back({{"n", n}, {"integral", jnum(v)}});
        print_json({{"family", cert.family}, {"limit", cert.limit_strategy}, {"tv_family_index", cert.tv_family_index},
                    {"tv", tv}, {"test", cert.test}, {"integrals", ints}, {"limit_integral", jnum(cert.limit_integral)},
                    {"sequence_limit", jnum(cert.sequence_limit)}, {"gap", jnum(cert.gap)},
                    {"gap_floor", jnum(cert.gap_floor)}, {"tol", cert.tol}, {"valid", cert.valid}, {"note", cert.note}});
    });

    // simulate
    Common sim_c;
    std::string sim_strategy = "all2";
    SimulationOptions sim_opts;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo estimates of visit frequencies");
    add_common(sim, sim_c);
    sim->add_option("--strategy", sim_strategy)->capture_default_str();
    sim->add_option("-N", sim_opts.n, "number of trajectories")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_opts.seed, "overridden by MDP_SEED")->capture_default_str();
    sim->add_option("--cap", sim_opts.cap, "decisions per trajectory")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--tail", sim_opts.tails, "tail indices n");
    sim->add_option("--threads", sim_opts.threads, "0 = all cores")->capture_default_str();
    sim->callback([&] {
        const Loaded l = load(sim_c);
        SimulationOptions o = sim_opts;
        o.seed = resolve_seed(o.seed);
        const auto est = estimate_occupation(l.model, parse_strategy(sim_strategy), l.init, o);
        if (sim_c.format == "json") {
            json pairs = json::array();
            for (const auto& [k, e] : est.pairs) {
                json j = estimate_json(e);
                j["state"] = k.first;
                j["action"] = k.second;
                pairs.push_back(j);
            }
            json tails = json::array();
            for (const auto& [n, e] : est.tails) {
                json j = estimate_json(e);
                j["n"] = n;
                tails.push_back(j);
            }
            print_json({{"pairs", pairs}, {"total_mass", estimate_json(est.total_mass)},
                        {"hitting_time", estimate_json(est.hitting_time)},
                        {"return_time", estimate_json(est.return_time)}, {"tails", tails}});
            return;
        }
        std::cout << "quantity\tmean\tse\n";
        for (const auto& [k, e] : est.pairs)
            std::cout << "eta(" << k.first << "," << k.second << ")\t" << num(e.mean) << "\t" << num(e.se) << "\n";
        std::cout << "T0\t" << num(est.hitting_time.mean) << "\t" << num(est.hitting_time.se) << "\n";
        std::cout << "tau0\t" << num(est.return_time.mean) << "\t" << num(est.return_time.se) << "\n";
        for (const auto& [n, e] : est.tails) std::cout << "tail(" << n << ")\t" << num(e.mean) << "\t" << num(e.se) << "\n";
        std::cout << "# N " << o.n << " seed " << o.seed << " capped_fraction " << num(est.hitting_time.capped_fraction) << "\n";
    });

    // reproduce-paper
    std::string rep_output = "report.json";
    ReportOptions rep_opts;
    auto* rep = app.add_subcommand("reproduce-paper", "run every closed-form check and write a JSON report");
    rep->add_option("--output", rep_output, "JSON report path")->capture_default_str();
    rep->add_option("--seed", rep_opts.seed, "Monte Carlo seed (overridden by MDP_SEED)")->capture_default_str();
    rep->add_option("--threads", rep_opts.threads, "0 = all cores")->capture_default_str();
    rep->add_flag("--corrupt-builtin", rep_opts.corrupt_builtin, "negative control: perturb example1")->group("");
    rep->callback([&] {
        ReportOptions o = rep_opts;
        o.seed = resolve_seed(o.seed);
        const PaperReport r = reproduce_paper(o);
        std::cout << report_table(r);
        std::ofstream out(rep_output);
        if (!out) throw InvalidArgument("cannot write " + rep_output);
        out << report_to_json(r) << "\n";
        exit_code = r.pass ? 0 : 1;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const UnknownBuiltin& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
