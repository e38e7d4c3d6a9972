#include "amdp/model.hpp"

#include "amdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>

namespace amdp {

namespace {

std::string describe_row_sum(std::uint64_t state, std::uint64_t action, double sum) {
    std::ostringstream os;
    os.precision(17);
    os << "row (" << state << ", " << action << ") sums to " << sum;
    return os.str();
}

struct TableAccess {
    std::function<Row(State, Action)> generator;
    std::function<bool(State)> has_state;
};

struct PairHash {
    std::size_t operator()(const std::pair<State, Action>& p) const noexcept {
        return std::hash<std::uint64_t>{}(p.first * 0x9E3779B97F4A7C15ULL ^ p.second);
    }
};

// Sorts by successor, drops zero masses, and checks the row invariants.
Row check_row(State x, Action a, Row row) {
    std::sort(row.begin(), row.end(),
              [](const Transition& l, const Transition& r) { return l.next < r.next; });
    for (std::size_t i = 1; i < row.size(); ++i)
        if (row[i].next == row[i - 1].next) throw DuplicateSuccessor(x, a, row[i].next);
    double sum = 0.0;
    for (const auto& t : row) {
        if (!(t.prob >= 0.0 && t.prob <= 1.0)) {
            std::ostringstream os;
            os << "probability " << t.prob << " outside [0,1] in row (" << x << ", " << a << ")";
            throw InvalidArgument(os.str());
        }
        sum += t.prob;
    }
    if (std::fabs(sum - 1.0) > kRowSumTol) throw RowSumError(x, a, sum);
    std::erase_if(row, [](const Transition& t) { return t.prob == 0.0; });
    return row;
}

void check_absorbing(Action a, const Row& row) {
    if (row.size() != 1 || row[0].next != kAbsorbing || row[0].prob != 1.0) {
        std::ostringstream os;
        os << "state 0 is not absorbing under action " << a;
        throw AbsorbingViolation(os.str());
    }
}

Row absorbing_row() { return Row{{kAbsorbing, 1.0}}; }

double pow2_neg(State x) {
    // 2^-x; underflows to 0 for x > 1074.
    if (x > 2000) return 0.0;
    return std::ldexp(1.0, -static_cast<int>(x));
}

Row example1_row(State x, Action a, double p_up) {
    if (x == kAbsorbing) return absorbing_row();
    if (a == 1) {
        const double px = pow2_neg(x);
        Row r;
        if (px > 0.0) r.push_back({kAbsorbing, px});
        r.push_back({x, 1.0 - px});
        return r;
    }
    Row r;
    if (p_up < 1.0) r.push_back({kAbsorbing, 1.0 - p_up});
    if (p_up > 0.0) r.push_back({x + 1, p_up});
    return r;
}

Row example1_uniform_row(State x, Action a) {
    if (x == kAbsorbing) return absorbing_row();
    if (a == 1) return Row{{kAbsorbing, 0.5}, {x, 0.5}};
    return Row{{kAbsorbing, 0.5}, {x + 1, 0.5}};
}

Row example2_row(State x) {
    if (x == kAbsorbing) return absorbing_row();
    const double px = pow2_neg(x);
    Row r;
    if (px > 0.0) r.push_back({kAbsorbing, px});
    if (px < 1.0) r.push_back({x, 1.0 - px});
    return r;
}

TableAccess validate_table(const ModelSpec& spec, const TableTransitions& table);

} // namespace

RowSumError::RowSumError(std::uint64_t s, std::uint64_t a, double v)
    : Error(describe_row_sum(s, a, v)), state(s), action(a), sum(v) {}

DuplicateSuccessor::DuplicateSuccessor(std::uint64_t s, std::uint64_t a, std::uint64_t y)
    : Error("duplicate successor " + std::to_string(y) + " in row (" + std::to_string(s) + ", " +
            std::to_string(a) + ")") {}

UnknownBuiltin::UnknownBuiltin(const std::string& name) : Error("unknown builtin model: " + name) {}

bool ValidatedModel::has_action(Action a) const {
    return std::find(actions_.begin(), actions_.end(), a) != actions_.end();
}

Row ValidatedModel::row(State x, Action a) const {
    if (x == kAbsorbing) return absorbing_row();
    if (!has_action(a)) throw InvalidArgument("action " + std::to_string(a) + " not in model");
    return generator_(x, a);
}

bool ValidatedModel::has_state(State x) const { return x == kAbsorbing || has_state_(x); }

ModelSpec builtin(const std::string& name, const BuiltinParams& params) {
    ModelSpec spec;
    spec.name = name;
    if (name == "example1") {
        for (const auto& [key, value] : params) {
            if (key != "p_up") throw InvalidArgument("example1: unknown parameter " + key);
            if (!(value >= 0.0 && value <= 1.0)) throw InvalidArgument("example1: p_up outside [0,1]");
        }
        spec.actions = {1, 2};
    } else if (name == "example1_uniform") {
        if (!params.empty()) throw InvalidArgument("example1_uniform takes no parameters");
        spec.actions = {1, 2};
    } else if (name == "example2") {
        if (!params.empty()) throw InvalidArgument("example2 takes no parameters");
        spec.actions = {1};
    } else {
        throw UnknownBuiltin(name);
    }
    spec.transitions = BuiltinTransitions{name, params};
    return spec;
}

ValidatedModel validate_model(const ModelSpec& spec) {
    if (spec.absorbing_state != kAbsorbing)
        throw AbsorbingViolation("absorbing state must be 0");
    if (spec.actions.empty()) throw InvalidArgument("model has no actions");
    {
        auto sorted = spec.actions;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InvalidArgument("duplicate action ids");
    }

    ValidatedModel model;
    model.name_ = spec.name;
    model.actions_ = spec.actions;

    if (const auto* table = std::get_if<TableTransitions>(&spec.transitions))
    {
        auto access = validate_table(spec, *table);
        model.generator_ = std::move(access.generator);
        model.has_state_ = std::move(access.has_state);
        return model;
    }

    const auto& b = std::get<BuiltinTransitions>(spec.transitions);
    // Re-derive through builtin() so parameters are checked even for
    // hand-assembled specs.
    const ModelSpec canonical = builtin(b.id, b.params);
    if (canonical.actions != spec.actions)
        throw InvalidArgument("builtin " + b.id + " has a fixed action set");
    model.builtin_id_ = b.id;
    if (b.id == "example1") {
        const auto it = b.params.find("p_up");
        const double p_up = it == b.params.end() ? 0.5 : it->second;
        model.generator_ = [p_up](State x, Action a) { return example1_row(x, a, p_up); };
    } else if (b.id == "example1_uniform") {
        model.generator_ = [](State x, Action a) { return example1_uniform_row(x, a); };
    } else {
        model.generator_ = [](State x, Action) { return example2_row(x); };
    }
    model.has_state_ = [](State) { return true; };

    for (Action a : model.actions_) check_absorbing(a, model.generator_(kAbsorbing, a));
    for (State x = 1; x <= 64; ++x)
        for (Action a : model.actions_) check_row(x, a, model.generator_(x, a));
    return model;
}

namespace {

TableAccess validate_table(const ModelSpec& spec, const TableTransitions& table) {
    using Key = std::pair<State, Action>;
    auto rows = std::make_shared<std::unordered_map<Key, Row, PairHash>>();
    auto states = std::make_shared<std::set<State>>();
    for (const auto& entry : table.entries) {
        if (std::find(spec.actions.begin(), spec.actions.end(), entry.action) == spec.actions.end())
            throw InvalidArgument("row (" + std::to_string(entry.state) + ", " +
                                  std::to_string(entry.action) + ") uses an undeclared action");
        Row row = check_row(entry.state, entry.action, entry.row);
        if (entry.state == kAbsorbing) {
            check_absorbing(entry.action, row);
            continue;
        }
        if (!rows->emplace(Key{entry.state, entry.action}, std::move(row)).second)
            throw InvalidArgument("row (" + std::to_string(entry.state) + ", " +
                                  std::to_string(entry.action) + ") listed twice");
        states->insert(entry.state);
    }
    for (State x : *states) {
        for (Action a : spec.actions) {
            const auto it = rows->find({x, a});
            if (it == rows->end())
                throw MissingRow("state " + std::to_string(x) + " has no row for action " +
                                 std::to_string(a));
            for (const auto& t : it->second)
                if (t.next != kAbsorbing && !states->count(t.next))
                    throw MissingRow("successor " + std::to_string(t.next) + " of row (" +
                                     std::to_string(x) + ", " + std::to_string(a) +
                                     ") has no rows");
        }
    }
    TableAccess access;
    access.generator = [rows](State x, Action a) {
        const auto it = rows->find({x, a});
        if (it == rows->end())
            throw InvalidArgument("no row for state " + std::to_string(x));
        return it->second;
    };
    access.has_state = [states](State x) { return states->count(x) > 0; };
    return access;
}

} // namespace

ValidatedModel make_builtin(const std::string& name, const BuiltinParams& params) {
    return validate_model(builtin(name, params));
}

InitialDistribution InitialDistribution::point(State x0) { return InitialDistribution(PointInit{x0}); }

InitialDistribution InitialDistribution::table(StateMass mass) {
    std::sort(mass.begin(), mass.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) {
        if (i > 0 && mass[i].first == mass[i - 1].first)
            throw InvalidArgument("initial table lists state " + std::to_string(mass[i].first) +
                                  " twice");
        if (!(mass[i].second >= 0.0 && mass[i].second <= 1.0))
            throw InvalidArgument("initial probability outside [0,1]");
        sum += mass[i].second;
    }
    if (std::fabs(sum - 1.0) > kRowSumTol)
        throw InvalidArgument("initial table sums to " + std::to_string(sum));
    std::erase_if(mass, [](const auto& p) { return p.second == 0.0; });
    return InitialDistribution(TableInit{std::move(mass)});
}

InitialDistribution InitialDistribution::geometric(double q, double eps) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("geometric parameter must lie in (0,1)");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("geometric eps must lie in (0,1)");
    return InitialDistribution(GeometricInit{q, eps, std::nullopt});
}

InitialDistribution InitialDistribution::geometric_terms(double q, std::size_t n) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("geometric parameter must lie in (0,1)");
    if (n == 0) throw InvalidArgument("geometric_terms needs at least one term");
    return InitialDistribution(GeometricInit{q, 0.0, n});
}

InitSupport InitialDistribution::support() const {
    InitSupport out;
    if (const auto* p = std::get_if<PointInit>(&kind_)) {
        out.mass = {{p->x0, 1.0}};
        return out;
    }
    if (const auto* t = std::get_if<TableInit>(&kind_)) {
        out.mass = t->mass;
        return out;
    }
    const auto& g = std::get<GeometricInit>(kind_);
    double term = g.q;
    double tail = 1.0;  // (1-q)^(i-1) before adding term i
    for (State i = 1;; ++i) {
        out.mass.emplace_back(i, term);
        tail *= 1.0 - g.q;
        if (g.max_terms && out.mass.size() >= *g.max_terms) break;
        if (tail <= g.eps) break;
        term *= 1.0 - g.q;
    }
    out.deficit = std::pow(1.0 - g.q, static_cast<double>(out.mass.size()));
    out.retained = 1.0 - out.deficit;
    out.truncated = true;
    return out;
}

std::set<State> reachable_states(const ValidatedModel& model, const InitialDistribution& init,
                                 int horizon) {
    if (horizon < 0) throw InvalidArgument("horizon must be >= 0");
    std::set<State> seen;
    std::vector<State> frontier;
    for (const auto& [x, m] : init.support().mass) {
        if (m > 0.0 && seen.insert(x).second) frontier.push_back(x);
    }
    for (int t = 0; t < horizon && !frontier.empty(); ++t) {
        std::vector<State> next;
        for (State x : frontier)
            for (Action a : model.actions())
                for (const auto& tr : model.row(x, a))
                    if (seen.insert(tr.next).second) next.push_back(tr.next);
        frontier = std::move(next);
    }
    return seen;
}

} // namespace amdp
