#pragma once

#include "orgutil/aggregation.hpp"
#include "orgutil/games.hpp"
#include "orgutil/risk.hpp"
#include "orgutil/utility.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>

// JSON schemas for the library's input and output types. Readers throw
// Error(ParseError) with a path to the offending field.

namespace orgutil {

using json = nlohmann::json;

json to_json(const UtilityExpr& u);
UtilityExpr utility_from_json(const json& j);

json to_json(const AggregationTree& tree);
AggregationTree tree_from_json(const json& j);

json to_json(const Lottery& lottery);
Lottery lottery_from_json(const json& j);

json to_json(const CournotConfig& cfg);
CournotConfig cournot_config_from_json(const json& j);

json to_json(const ContractConfig& cfg);
ContractConfig contract_config_from_json(const json& j);

json to_json(const EquilibriumResult& r);
json to_json(const ContractResult& r);

/// Parses JSON text; syntax errors report line and column.
json parse_json(std::string_view text, const std::string& source = "<input>");
json read_json_file(const std::filesystem::path& path);

/// Shortest decimal that round-trips the double exactly.
std::string format_number(double value);

}  // namespace orgutil
