#pragma once

#include "amdp/absorption.hpp"
#include "amdp/bellman.hpp"
#include "amdp/model.hpp"
#include "amdp/strategy.hpp"
#include "amdp/topology.hpp"

#include <optional>
#include <string>
#include <vector>

namespace amdp {

struct ModelFile {
    ModelSpec spec;
    std::optional<InitialDistribution> initial;
};

/// Reads a model document. Malformed JSON raises ParseError with the line;
/// unknown fields, wrong types and invalid rows raise SchemaError.
ModelFile parse_model_file(const std::string& path);
ModelFile parse_model_text(const std::string& text, const std::string& origin = "<text>");

/// A builtin id (example1, example1_uniform, example2) or a model file path.
ModelFile load_model(const std::string& literal);
ValidatedModel validate_model_file(const ModelFile& file);

/// phi:n | all2 | file:<path>
Strategy parse_strategy(const std::string& literal);
/// point:x | geometric:q[:eps] | table:x=p,y=p,...
InitialDistribution parse_init(const std::string& literal);
/// const:v
CostFunction parse_cost(const std::string& literal);
/// builtin:paper | builtin:pow2plus2 | builtin:pow2 | file:<path>
LyapunovCandidate parse_mu(const std::string& literal);
/// phi | phi:lo..hi (the bare form takes its range from `fallback`)
StrategyFamily parse_family(const std::string& literal, int fallback_lo, int fallback_hi);
/// const | dj:lo..hi | dj:j | pair:j:a, comma separated
std::vector<TestFunction> parse_tests(const std::string& literal);

/// "a..b" -> [a, b]; "a" -> [a, a].
std::pair<long long, long long> parse_range(const std::string& text);
/// Comma-separated integers and a..b ranges.
std::vector<long long> parse_int_list(const std::string& text);

} // namespace amdp
