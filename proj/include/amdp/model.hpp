#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace amdp {

using State = std::uint64_t;
using Action = std::uint64_t;

/// The absorbing ("cemetery") state is always id 0.
inline constexpr State kAbsorbing = 0;

/// Tolerance on |sum of a transition row - 1|.
inline constexpr double kRowSumTol = 1e-12;

struct Transition {
    State next;
    double prob;
    bool operator==(const Transition&) const = default;
};

/// Sparse successor distribution, sorted by successor state.
using Row = std::vector<Transition>;

/// Sparse sub-probability over states, sorted by state.
using StateMass = std::vector<std::pair<State, double>>;

struct TableEntry {
    State state;
    Action action;
    Row row;
};

struct TableTransitions {
    std::vector<TableEntry> entries;
};

using BuiltinParams = std::map<std::string, double>;

struct BuiltinTransitions {
    std::string id;
    BuiltinParams params;
};

struct ModelSpec {
    std::string name;
    std::vector<Action> actions;
    std::variant<TableTransitions, BuiltinTransitions> transitions;
    State absorbing_state = kAbsorbing;
};

/// A transition kernel that passed validation. Rows are produced on demand,
/// so countably infinite state spaces are supported. Immutable and safe to
/// share between threads.
class ValidatedModel {
public:
    const std::string& name() const { return name_; }
    std::span<const Action> actions() const { return actions_; }
    bool has_action(Action a) const;

    /// Successor distribution of (x, a); zero-probability successors are
    /// never listed. Row (0, a) is {0 -> 1} for every a.
    Row row(State x, Action a) const;

    /// True for every state the model defines rows for.
    bool has_state(State x) const;

    /// Builtin generator id, empty for table models.
    const std::string& builtin_id() const { return builtin_id_; }

private:
    friend ValidatedModel validate_model(const ModelSpec& spec);

    std::string name_;
    std::string builtin_id_;
    std::vector<Action> actions_;
    std::function<Row(State, Action)> generator_;
    std::function<bool(State)> has_state_;
};

/// Checks row sums, absorption at 0, successor uniqueness and (for tables)
/// closure under successors. Builtin generators are spot-checked on states
/// 0..64.
ValidatedModel validate_model(const ModelSpec& spec);

/// Builtin names: "example1", "example1_uniform", "example2".
/// example1 accepts parameter "p_up" (probability that action 2 moves x to
/// x+1, default 1/2); other builtins take no parameters.
ModelSpec builtin(const std::string& name, const BuiltinParams& params = {});

/// Convenience: validate_model(builtin(name, params)).
ValidatedModel make_builtin(const std::string& name, const BuiltinParams& params = {});

struct PointInit {
    State x0;
};

struct TableInit {
    StateMass mass;
};

/// q * (1-q)^(i-1) on i = 1, 2, ...; truncated once the tail mass drops to
/// eps, or after max_terms terms when set.
struct GeometricInit {
    double q;
    double eps = 1e-12;
    std::optional<std::size_t> max_terms;
};

/// A finite view of an initial distribution.
struct InitSupport {
    StateMass mass;
    double retained = 1.0;  ///< total mass listed
    double deficit = 0.0;   ///< mass dropped by truncation
    bool truncated = false;
};

class InitialDistribution {
public:
    using Kind = std::variant<PointInit, TableInit, GeometricInit>;

    static InitialDistribution point(State x0);
    /// Throws InvalidArgument unless the masses sum to 1 within 1e-12.
    static InitialDistribution table(StateMass mass);
    static InitialDistribution geometric(double q, double eps = 1e-12);
    /// The first n terms of the geometric law (a sub-probability).
    static InitialDistribution geometric_terms(double q, std::size_t n);

    const Kind& kind() const { return kind_; }
    InitSupport support() const;

private:
    explicit InitialDistribution(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

/// States occupied with positive probability at some t <= horizon under
/// some action sequence.
std::set<State> reachable_states(const ValidatedModel& model, const InitialDistribution& init,
                                 int horizon);

} // namespace amdp
