#pragma once

#include "orgutil/aggregation.hpp"
#include "orgutil/json_io.hpp"
#include "orgutil/risk.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Command implementations behind the `orgutil` executable. Each returns its
// output as text so the same bytes can be written to a file or checked in
// tests; the CLI adds no arithmetic of its own.

namespace orgutil::cli {

inline constexpr std::string_view version = "1.0.0";

enum ExitCode : int { ok = 0, input_error = 2, numerical_failure = 3 };

struct Grid {
  double min = -10.0;
  double max = 10.0;
  int points = 2001;

  double at(int i) const;
};

/// "MIN:MAX:POINTS"; ParseError unless points >= 2 and min < max.
Grid parse_grid(std::string_view text);

enum class Format { csv, json };

/// Per grid point: x, organizational u and s, then each member's u and s.
std::string derive(const AggregationTree& tree, Grid grid, Format format);

/// EU, CE, acceptance probability and, for two-branch lotteries, the
/// minimum winning probability. Undefined quantities carry a reason.
json risk(const AggregationTree& tree, const Lottery& lottery);

/// Equilibria (Cournot) or contracts (principal-agent) for every scenario
/// in the file, one record per structure pair or principal type.
struct GamesOutput {
  json records;
  std::string csv;
};
GamesOutput games(const json& scenarios, std::optional<std::uint64_t> seed);

inline constexpr std::string_view figure_ids[] = {
    "screening_examples", "pipeline_demo", "unan_poly_linear",    "certainty_equiv", "vary_n",
    "opposing_views",     "games",         "cara_appendix", "multivariate_appendix"};

struct FigureFile {
  std::string name;
  std::string contents;
};

/// Data files for one figure spec. UnknownFigure for unrecognized ids.
std::vector<FigureFile> figure(const json& spec, std::optional<Grid> grid_override,
                               std::optional<std::uint64_t> seed);

std::filesystem::path bundled_figures_dir();

/// Entry point of the executable.
int run(int argc, char** argv);

}  // namespace orgutil::cli
