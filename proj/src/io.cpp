#include "amdp/io.hpp"

#include "amdp/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace amdp {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t end = std::min<std::size_t>(e.byte, text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(
                                         std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end ? end - 1 : 0), '\n'));
        throw ParseError(origin, line, e.what());
    }
}

void only_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SchemaError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw SchemaError(where + ": unknown field '" + key + "'");
    }
}

std::uint64_t as_u64(const json& j, const std::string& where) {
    if (!j.is_number_unsigned()) throw SchemaError(where + ": expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

double as_double(const json& j, const std::string& where) {
    if (!j.is_number()) throw SchemaError(where + ": expected a number");
    return j.get<double>();
}

StateMass parse_pairs(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + ": expected an array of [state, prob] pairs");
    StateMass out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2) throw SchemaError(w + ": expected [state, prob]");
        out.emplace_back(as_u64(j[i][0], w), as_double(j[i][1], w));
    }
    return out;
}

InitialDistribution parse_initial(const json& j) {
    only_fields(j, "initial", {"point", "table", "geometric"});
    if (j.size() != 1) throw SchemaError("initial: expected exactly one of point, table, geometric");
    try {
        if (j.contains("point")) return InitialDistribution::point(as_u64(j["point"], "initial.point"));
        if (j.contains("table")) {
            StateMass m = parse_pairs(j["table"], "initial.table");
            std::sort(m.begin(), m.end());
            return InitialDistribution::table(std::move(m));
        }
        const json& g = j["geometric"];
        only_fields(g, "initial.geometric", {"q", "eps"});
        if (!g.contains("q")) throw SchemaError("initial.geometric: missing field 'q'");
        const double eps = g.contains("eps") ? as_double(g["eps"], "initial.geometric.eps") : 1e-12;
        return InitialDistribution::geometric(as_double(g["q"], "initial.geometric.q"), eps);
    } catch (const InvalidArgument& e) {
        throw SchemaError(std::string("initial: ") + e.what());
    }
}

TableTransitions parse_table(const json& j) {
    if (!j.is_array()) throw SchemaError("transitions.table: expected an array");
    TableTransitions t;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = "transitions.table[" + std::to_string(i) + "]";
        only_fields(j[i], w, {"state", "action", "row"});
        for (const char* f : {"state", "action", "row"})
            if (!j[i].contains(f)) throw SchemaError(w + ": missing field '" + f + "'");
        TableEntry e;
        e.state = as_u64(j[i]["state"], w + ".state");
        e.action = as_u64(j[i]["action"], w + ".action");
        for (const auto& [y, p] : parse_pairs(j[i]["row"], w + ".row")) e.row.push_back({y, p});
        t.entries.push_back(std::move(e));
    }
    return t;
}

} // namespace

ModelFile parse_model_text(const std::string& text, const std::string& origin) {
    const json doc = parse_json(text, origin);
    only_fields(doc, "model", {"name", "actions", "absorbing_state", "transitions", "initial"});
    if (!doc.contains("transitions")) throw SchemaError("model: missing field 'transitions'");

    ModelFile out;
    const json& tr = doc["transitions"];
    only_fields(tr, "transitions", {"builtin", "params", "table"});
    if (tr.contains("builtin") == tr.contains("table"))
        throw SchemaError("transitions: expected exactly one of builtin, table");

    if (tr.contains("builtin")) {
        if (!tr["builtin"].is_string()) throw SchemaError("transitions.builtin: expected a string");
        BuiltinParams params;
        if (tr.contains("params")) {
            if (!tr["params"].is_object()) throw SchemaError("transitions.params: expected an object");
            for (const auto& [k, v] : tr["params"].items()) params[k] = as_double(v, "transitions.params." + k);
        }
        out.spec = builtin(tr["builtin"].get<std::string>(), params);
    } else {
        if (tr.contains("params")) throw SchemaError("transitions.params: only valid with builtin");
        out.spec.transitions = parse_table(tr["table"]);
    }

    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw SchemaError("name: expected a string");
        out.spec.name = doc["name"].get<std::string>();
    }
    if (doc.contains("actions")) {
        if (!doc["actions"].is_array()) throw SchemaError("actions: expected an array");
        std::vector<Action> actions;
        for (std::size_t i = 0; i < doc["actions"].size(); ++i)
            actions.push_back(as_u64(doc["actions"][i], "actions[" + std::to_string(i) + "]"));
        if (tr.contains("builtin") && actions != out.spec.actions)
            throw SchemaError("actions: builtin " + tr["builtin"].get<std::string>() + " has a fixed action set");
        out.spec.actions = std::move(actions);
    } else if (tr.contains("table")) {
        throw SchemaError("model: missing field 'actions'");
    }
    if (doc.contains("absorbing_state"))
        out.spec.absorbing_state = as_u64(doc["absorbing_state"], "absorbing_state");
    if (doc.contains("initial")) out.initial = parse_initial(doc["initial"]);
    return out;
}

ModelFile parse_model_file(const std::string& path) { return parse_model_text(read_file(path), path); }

ModelFile load_model(const std::string& literal) {
    static const std::set<std::string> builtins{"example1", "example1_uniform", "example2"};
    if (builtins.count(literal)) return ModelFile{builtin(literal), std::nullopt};
    return parse_model_file(literal);
}

ValidatedModel validate_model_file(const ModelFile& file) {
    try {
        return validate_model(file.spec);
    } catch (const RowSumError& e) {
        throw SchemaError(e.what());
    } catch (const DuplicateSuccessor& e) {
        throw SchemaError(e.what());
    } catch (const MissingRow& e) {
        throw SchemaError(e.what());
    } catch (const AbsorbingViolation& e) {
        throw SchemaError(e.what());
    } catch (const InvalidArgument& e) {
        throw SchemaError(e.what());
    }
}

namespace {

std::string after_prefix(const std::string& s, const std::string& prefix) {
    return s.rfind(prefix, 0) == 0 ? s.substr(prefix.size()) : std::string();
}

long long to_int(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw InvalidArgument("bad integer '" + s + "' in " + what);
    return v;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) throw InvalidArgument("bad number '" + s + "' in " + what);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

} // namespace

std::pair<long long, long long> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const long long v = to_int(text, "range");
        return {v, v};
    }
    const long long lo = to_int(text.substr(0, dots), "range");
    const long long hi = to_int(text.substr(dots + 2), "range");
    if (hi < lo) throw InvalidArgument("empty range '" + text + "'");
    return {lo, hi};
}

std::vector<long long> parse_int_list(const std::string& text) {
    std::vector<long long> out;
    for (const auto& part : split(text, ',')) {
        const auto [lo, hi] = parse_range(part);
        for (long long v = lo; v <= hi; ++v) out.push_back(v);
    }
    return out;
}

Strategy parse_strategy(const std::string& literal) {
    if (literal == "all2") return all_two_strategy();
    if (const auto n = after_prefix(literal, "phi:"); !n.empty()) {
        const long long v = to_int(n, "strategy");
        if (v < 0) throw InvalidArgument("phi:n needs n >= 0");
        return threshold_strategy(static_cast<int>(v));
    }
    if (const auto path = after_prefix(literal, "file:"); !path.empty()) {
        const json doc = parse_json(read_file(path), path);
        only_fields(doc, "strategy", {"stationary", "default_action"});
        if (!doc.contains("default_action")) throw SchemaError("strategy: missing field 'default_action'");
        std::map<State, Action> table;
        if (doc.contains("stationary"))
            for (const auto& [x, a] : parse_pairs(doc["stationary"], "strategy.stationary")) {
                if (a < 0 || a != std::floor(a)) throw SchemaError("strategy.stationary: actions are integers");
                table[x] = static_cast<Action>(a);
            }
        return stationary_table(std::move(table), as_u64(doc["default_action"], "strategy.default_action"));
    }
    throw InvalidArgument("unknown strategy literal '" + literal + "'");
}

InitialDistribution parse_init(const std::string& literal) {
    if (const auto x = after_prefix(literal, "point:"); !x.empty()) {
        const long long v = to_int(x, "init");
        if (v < 0) throw InvalidArgument("point:x needs x >= 0");
        return InitialDistribution::point(static_cast<State>(v));
    }
    if (const auto g = after_prefix(literal, "geometric:"); !g.empty()) {
        const auto parts = split(g, ':');
        if (parts.empty() || parts.size() > 2) throw InvalidArgument("geometric:q[:eps]");
        const double eps = parts.size() == 2 ? to_double(parts[1], "init") : 1e-12;
        return InitialDistribution::geometric(to_double(parts[0], "init"), eps);
    }
    if (const auto t = after_prefix(literal, "table:"); !t.empty()) {
        StateMass m;
        for (const auto& item : split(t, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw InvalidArgument("table entries are x=p");
            const long long x = to_int(item.substr(0, eq), "init");
            if (x < 0) throw InvalidArgument("table states must be >= 0");
            m.emplace_back(static_cast<State>(x), to_double(item.substr(eq + 1), "init"));
        }
        std::sort(m.begin(), m.end());
        return InitialDistribution::table(std::move(m));
    }
    throw InvalidArgument("unknown init literal '" + literal + "'");
}

CostFunction parse_cost(const std::string& literal) {
    if (const auto v = after_prefix(literal, "const:"); !v.empty()) return constant_cost(to_double(v, "cost"));
    throw InvalidArgument("unknown cost literal '" + literal + "'");
}

LyapunovCandidate parse_mu(const std::string& literal) {
    if (literal == "builtin:paper" || literal == "builtin:pow2plus2") return mu_pow2_plus2();
    if (literal == "builtin:pow2") return mu_pow2();
    if (const auto path = after_prefix(literal, "file:"); !path.empty()) {
        const json doc = parse_json(read_file(path), path);
        only_fields(doc, "mu", {"table", "default"});
        std::function<double(State)> fallback = [](State) { return 1.0; };
        std::string base = "one";
        if (doc.contains("default")) {
            if (!doc["default"].is_string()) throw SchemaError("mu.default: expected a string");
            base = doc["default"].get<std::string>();
            if (base == "pow2plus2")
                fallback = mu_pow2_plus2().mu;
            else if (base == "pow2")
                fallback = mu_pow2().mu;
            else if (base != "one")
                throw SchemaError("mu.default: expected pow2plus2, pow2 or one");
        }
        std::map<State, double> table;
        if (doc.contains("table"))
            for (const auto& [x, v] : parse_pairs(doc["table"], "mu.table")) table[x] = v;
        return {[table, fallback](State x) {
                    const auto it = table.find(x);
                    return it == table.end() ? fallback(x) : it->second;
                },
                "file:" + path + "(" + base + ")"};
    }
    throw InvalidArgument("unknown mu literal '" + literal + "'");
}

StrategyFamily parse_family(const std::string& literal, int fallback_lo, int fallback_hi) {
    if (literal == "phi") return threshold_family(fallback_lo, fallback_hi);
    if (const auto r = after_prefix(literal, "phi:"); !r.empty()) {
        const auto [lo, hi] = parse_range(r);
        if (lo < 0) throw InvalidArgument("phi family indices must be >= 0");
        return threshold_family(static_cast<int>(lo), static_cast<int>(hi));
    }
    throw InvalidArgument("unknown family literal '" + literal + "'");
}

std::vector<TestFunction> parse_tests(const std::string& literal) {
    std::vector<TestFunction> out;
    for (const auto& item : split(literal, ',')) {
        if (item == "const") {
            auto g = constant_integrand(1.0);
            g.name = "const";
            out.push_back(std::move(g));
        } else if (const auto r = after_prefix(item, "dj:"); !r.empty()) {
            const auto [lo, hi] = parse_range(r);
            if (lo < 1) throw InvalidArgument("dj needs j >= 1");
            for (long long j = lo; j <= hi; ++j) out.push_back(state_indicator(static_cast<State>(j)));
        } else if (const auto p = after_prefix(item, "pair:"); !p.empty()) {
            const auto parts = split(p, ':');
            if (parts.size() != 2) throw InvalidArgument("pair:j:a");
            out.push_back(pair_indicator(static_cast<State>(to_int(parts[0], "test")),
                                         static_cast<Action>(to_int(parts[1], "test"))));
        } else {
            throw InvalidArgument("unknown test literal '" + item + "'");
        }
    }
    return out;
}

} // namespace amdp
