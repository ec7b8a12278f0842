#include "orgutil/cli.hpp"

#include "orgutil/error.hpp"
#include "orgutil/games.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#ifndef ORGUTIL_FIGURES_DIR
#define ORGUTIL_FIGURES_DIR "figures"
#endif

namespace orgutil::cli {
namespace {

[[noreturn]] void bad_input(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

std::string num(double v) { return format_number(v); }

// Cartesian product of the grid over `dims` axes, last axis fastest.
std::vector<Eigen::VectorXd> grid_points(Grid grid, Eigen::Index dims) {
  dims = std::max<Eigen::Index>(dims, 1);
  double total = std::pow(static_cast<double>(grid.points), static_cast<double>(dims));
  if (total > 1e7) bad_input("grid too large for " + std::to_string(dims) + " dimensions");
  std::vector<Eigen::VectorXd> out;
  std::vector<int> idx(dims, 0);
  while (true) {
    Eigen::VectorXd x(dims);
    for (Eigen::Index d = 0; d < dims; ++d) x[d] = grid.at(idx[d]);
    out.push_back(std::move(x));
    Eigen::Index d = dims - 1;
    while (d >= 0 && ++idx[d] == grid.points) idx[d--] = 0;
    if (d < 0) break;
  }
  return out;
}

std::vector<std::string> axis_names(Eigen::Index dims) {
  if (dims <= 1) return {"x"};
  std::vector<std::string> names;
  for (Eigen::Index d = 0; d < dims; ++d) names.push_back("x" + std::to_string(d + 1));
  return names;
}

// ---------------------------------------------------------------------------
// games

FirmType firm_from_code(char c) {
  switch (c) {
    case 'N': return FirmType::neutral;
    case 'U': return FirmType::unanimity;
    case 'P': return FirmType::polyarchy;
  }
  bad_input(std::string("unknown structure code '") + c + "', expected N, U or P");
}

std::vector<Member> members_from_json(const json& scenario) {
  if (!scenario.contains("members")) return default_firm_members();
  const json& arr = scenario.at("members");
  if (!arr.is_array()) bad_input("'members' must be an array");
  std::vector<Member> members;
  for (const auto& m : arr) {
    if (!m.is_object() || !m.contains("id") || !m.at("id").is_string() || !m.contains("utility"))
      bad_input("member entries need 'id' and 'utility'");
    members.push_back({m.at("id").get<std::string>(), utility_from_json(m.at("utility"))});
  }
  return members;
}

std::vector<std::string> labels_from_json(const json& scenario, const char* key,
                                          std::vector<std::string> fallback, std::size_t length) {
  if (!scenario.contains(key)) return fallback;
  const json& arr = scenario.at(key);
  if (!arr.is_array()) bad_input(std::string("'") + key + "' must be an array");
  std::vector<std::string> labels;
  for (const auto& l : arr) {
    if (!l.is_string() || l.get<std::string>().size() != length)
      bad_input(std::string("bad entry in '") + key + "'");
    labels.push_back(l.get<std::string>());
  }
  return labels;
}

struct GameRow {
  std::string model;
  std::string label;
  std::string status = "ok";
  std::string message;
  std::optional<EquilibriumResult> equilibrium;
  std::optional<ContractResult> contract;
};

constexpr const char* games_header =
    "model,label,status,q_i,q_j,q_total,eu_i,eu_j,profit_i,profit_j,iterations,residual,converged,"
    "w_fixed,w_variable,effort,principal_eu,agent_eu,pc_slack,ic_residual,at_bound,message";

std::string csv_row(const GameRow& r) {
  std::ostringstream out;
  out << r.model << ',' << r.label << ',' << r.status << ',';
  if (const auto& e = r.equilibrium) {
    out << num(e->q_i) << ',' << num(e->q_j) << ',' << num(e->q_i + e->q_j) << ',' << num(e->eu_i)
        << ',' << num(e->eu_j) << ',' << num(e->profit_i) << ',' << num(e->profit_j) << ','
        << e->iterations << ',' << num(e->residual) << ',' << (e->converged ? "true" : "false")
        << ',';
  } else {
    out << ",,,,,,,,,,";
  }
  if (const auto& c = r.contract) {
    out << num(c->w_fixed) << ',' << num(c->w_variable) << ',' << num(c->effort) << ','
        << num(c->principal_eu) << ',' << num(c->agent_eu) << ',' << num(c->pc_slack) << ','
        << num(c->ic_residual) << ',' << (c->at_bound ? "true" : "false") << ',';
  } else {
    out << ",,,,,,,,";
  }
  std::string msg = r.message;
  std::replace(msg.begin(), msg.end(), ',', ';');
  out << msg << '\n';
  return out.str();
}

json row_json(const GameRow& r) {
  json j{{"model", r.model}, {"label", r.label}, {"status", r.status}};
  if (!r.message.empty()) j["message"] = r.message;
  if (r.equilibrium) j["equilibrium"] = to_json(*r.equilibrium);
  if (r.contract) j["contract"] = to_json(*r.contract);
  return j;
}

template <typename Fn>
GameRow guarded(std::string model, std::string label, Fn&& fn) {
  GameRow row;
  row.model = std::move(model);
  row.label = std::move(label);
  try {
    fn(row);
  } catch (const Error& e) {
    row.status = std::string(to_string(e.code()));
    row.message = e.what();
  }
  return row;
}

}  // namespace

double Grid::at(int i) const {
  if (i + 1 == points) return max;
  return min + (max - min) * i / (points - 1);
}

Grid parse_grid(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos) bad_input("grid must be MIN:MAX:POINTS");
  const auto parse_double = [&](std::string_view s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad_input("bad grid number '" + std::string(s) + "'");
    return v;
  };
  Grid g;
  g.min = parse_double(text.substr(0, first));
  g.max = parse_double(text.substr(first + 1, second - first - 1));
  const auto pts = text.substr(second + 1);
  auto [p, ec] = std::from_chars(pts.data(), pts.data() + pts.size(), g.points);
  if (ec != std::errc() || p != pts.data() + pts.size()) bad_input("bad grid point count");
  if (g.points < 2 || !(g.min < g.max)) bad_input("grid needs points >= 2 and min < max");
  return g;
}

std::string derive(const AggregationTree& tree, Grid grid, Format format) {
  const OrgUtility org = derive_org_utility(tree, {grid.min, grid.max});
  const auto members = tree.members();
  const Eigen::Index dims = std::max<Eigen::Index>(tree.dimension(), 1);
  const auto axes = axis_names(dims);

  std::ostringstream csv;
  json records = json::array();
  if (format == Format::csv) {
    csv << "# u_org = logit(s_org); status is ok or degenerate (u_org undefined)\n";
    for (const auto& a : axes) csv << a << ',';
    csv << "u_org,s_org,status";
    for (const auto& m : members) csv << ",u_" << m.id << ",s_" << m.id;
    csv << '\n';
  }
  for (const auto& x : grid_points(grid, dims)) {
    const double s = org.screening(x);
    std::optional<double> u;
    try {
      u = org(x);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate_probability) throw;
    }
    if (format == Format::csv) {
      for (Eigen::Index d = 0; d < dims; ++d) csv << num(x[d]) << ',';
      csv << (u ? num(*u) : "") << ',' << num(s) << ',' << (u ? "ok" : "degenerate");
      for (const auto& m : members)
        csv << ',' << num(m.utility(x)) << ',' << num(screening_prob(m.utility, x));
      csv << '\n';
    } else {
      json rec;
      for (Eigen::Index d = 0; d < dims; ++d) rec[axes[d]] = x[d];
      rec["u_org"] = u ? json(*u) : json(nullptr);
      rec["s_org"] = s;
      rec["status"] = u ? "ok" : "degenerate";
      for (const auto& m : members) {
        rec["u_" + m.id] = m.utility(x);
        rec["s_" + m.id] = screening_prob(m.utility, x);
      }
      records.push_back(std::move(rec));
    }
  }
  return format == Format::csv ? csv.str() : records.dump(2) + "\n";
}

json risk(const AggregationTree& tree, const Lottery& lottery) {
  const EvaluableUtility u(derive_org_utility(tree));
  json out{{"inputs", {{"structure", to_json(tree)}, {"lottery", to_json(lottery)}}}};
  json results;
  results["expected_utility"] = expected_utility(u, lottery);
  results["acceptance_probability"] = acceptance_probability(u, lottery);
  try {
    results["certainty_equivalent"] = certainty_equivalent(u, lottery);
  } catch (const Error& e) {
    if (!is_numerical(e.code())) throw;
    results["certainty_equivalent"] = nullptr;
    results["certainty_equivalent_omitted"] = {
        {"code", to_string(e.code())},
        {"reason", e.code() == ErrorCode::non_monotonic_utility ? "non-monotone" : e.what()}};
  }
  const auto& branches = lottery.branches();
  if (branches.size() == 2) {
    const double win = std::max(branches[0].outcome, branches[1].outcome);
    const double loss = std::min(branches[0].outcome, branches[1].outcome);
    try {
      results["min_winning_probability"] = min_winning_probability(u, win, loss);
    } catch (const Error& e) {
      if (!is_numerical(e.code())) throw;
      results["min_winning_probability"] = nullptr;
      results["min_winning_probability_omitted"] = {{"code", to_string(e.code())}, {"reason", e.what()}};
    }
  }
  out["results"] = results;
  out["tolerances"] = {{"lottery_probability_sum", 1e-12},
                       {"certainty_equivalent_residual", 1e-9},
                       {"certainty_equivalent_bracket", 1e-9},
                       {"monotonicity_grid_points", 2001}};
  return out;
}

GamesOutput games(const json& scenarios, std::optional<std::uint64_t> seed) {
  std::vector<json> list;
  if (scenarios.is_object() && scenarios.contains("scenarios")) {
    if (!scenarios.at("scenarios").is_array()) bad_input("'scenarios' must be an array");
    for (const auto& s : scenarios.at("scenarios")) list.push_back(s);
  } else {
    list.push_back(scenarios);
  }

  std::vector<std::future<GameRow>> pending;
  for (const auto& scenario : list) {
    if (!scenario.is_object() || !scenario.contains("model") || !scenario.at("model").is_string())
      bad_input("scenario needs a 'model' of \"cournot\" or \"contract\"");
    const std::string model = scenario.at("model").get<std::string>();
    const json config = scenario.value("config", json::object());
    const auto members = members_from_json(scenario);

    if (model == "cournot") {
      const CournotConfig cfg = cournot_config_from_json(config);
      for (const auto& pair :
           labels_from_json(scenario, "pairs", {"NN", "NU", "NP", "UU", "UP", "PP"}, 2)) {
        const FirmType ti = firm_from_code(pair[0]), tj = firm_from_code(pair[1]);
        pending.push_back(std::async(std::launch::async, [=] {
          return guarded("cournot", pair, [&](GameRow& row) {
            row.equilibrium = cournot_equilibrium(make_firm(ti, members), make_firm(tj, members), cfg);
            if (!row.equilibrium->converged) {
              row.status = std::string(to_string(ErrorCode::no_convergence));
              row.message = "iteration cap reached";
            }
          });
        }));
      }
    } else if (model == "contract") {
      ContractConfig cfg = contract_config_from_json(config);
      if (seed) cfg.annealing.seed = *seed;
      for (const auto& p : labels_from_json(scenario, "principals", {"N", "U", "P"}, 1)) {
        const FirmType t = firm_from_code(p[0]);
        pending.push_back(std::async(std::launch::async, [=] {
          return guarded("contract", p, [&](GameRow& row) {
            row.contract = optimal_contract(make_firm(t, members), cfg);
            if (row.contract->at_bound) row.message = "warning: solution at a search bound";
          });
        }));
      }
    } else {
      bad_input("unknown model '" + model + "'");
    }
  }

  GamesOutput out{json::array(), std::string(games_header) + "\n"};
  for (auto& f : pending) {
    const GameRow row = f.get();
    out.records.push_back(row_json(row));
    out.csv += csv_row(row);
  }
  return out;
}

std::vector<FigureFile> figure(const json& spec, std::optional<Grid> grid_override,
                               std::optional<std::uint64_t> seed) {
  if (!spec.is_object() || !spec.contains("figure_id") || !spec.at("figure_id").is_string())
    bad_input("figure spec needs a 'figure_id'");
  const std::string id = spec.at("figure_id").get<std::string>();
  if (std::find(std::begin(figure_ids), std::end(figure_ids), id) == std::end(figure_ids))
    throw Error(ErrorCode::unknown_figure, "'" + id + "'");

  Grid grid;
  if (spec.contains("grid")) {
    const json& g = spec.at("grid");
    grid.min = g.value("x_min", grid.min);
    grid.max = g.value("x_max", grid.max);
    grid.points = g.value("points", grid.points);
  }
  if (grid_override) grid = *grid_override;
  if (grid.points < 2 || !(grid.min < grid.max)) bad_input("grid needs points >= 2 and x_min < x_max");

  const std::string output = spec.value("output_path", id + ".csv");
  const std::string stem = std::filesystem::path(output).stem().string();
  std::vector<FigureFile> files;
  json summary;

  if (spec.contains("curves")) {
    struct Curve {
      std::string name;
      std::function<double(const Eigen::VectorXd&)> u;
      std::function<double(const Eigen::VectorXd&)> s;
    };
    std::vector<Curve> curves;
    Eigen::Index dims = spec.value("dimensions", 1);
    for (const auto& c : spec.at("curves")) {
      const std::string name = c.at("name").get<std::string>();
      if (c.contains("tree")) {
        auto org = std::make_shared<OrgUtility>(
            derive_org_utility(tree_from_json(c.at("tree")), {grid.min, grid.max}));
        curves.push_back({name, [org](const Eigen::VectorXd& x) { return (*org)(x); },
                          [org](const Eigen::VectorXd& x) { return org->screening(x); }});
      } else {
        const UtilityExpr u = utility_from_json(c.at("utility"));
        curves.push_back({name, [u](const Eigen::VectorXd& x) { return u(x); },
                          [u](const Eigen::VectorXd& x) { return screening_prob(u, x); }});
      }
    }
    std::ostringstream csv;
    for (const auto& a : axis_names(dims)) csv << a << ',';
    for (std::size_t i = 0; i < curves.size(); ++i)
      csv << curves[i].name << "_u," << curves[i].name << "_s" << (i + 1 < curves.size() ? "," : "");
    csv << '\n';
    for (const auto& x : grid_points(grid, dims)) {
      for (Eigen::Index d = 0; d < dims; ++d) csv << num(x[d]) << ',';
      for (std::size_t i = 0; i < curves.size(); ++i) {
        std::string value;
        try {
          value = num(curves[i].u(x));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::degenerate_probability) throw;
        }
        csv << value << ',' << num(curves[i].s(x)) << (i + 1 < curves.size() ? "," : "");
      }
      csv << '\n';
    }
    files.push_back({output, csv.str()});
  }

  if (spec.contains("risk")) {
    json entries = json::array();
    for (const auto& r : spec.at("risk")) {
      json entry = risk(tree_from_json(r.at("tree")), lottery_from_json(r.at("lottery")));
      entry["name"] = r.at("name");
      entries.push_back(std::move(entry));
    }
    summary["risk"] = entries;
  }
  if (spec.contains("error_rates")) {
    json entries = json::array();
    for (const auto& r : spec.at("error_rates")) {
      const json& d = r.at("domain");
      const ErrorRates rates = error_rates(utility_from_json(r.at("utility")),
                                           {d.at(0).get<double>(), d.at(1).get<double>()});
      entries.push_back({{"name", r.at("name")},
                         {"domain", d},
                         {"omission", rates.omission},
                         {"commission", rates.commission}});
    }
    summary["error_rates"] = entries;
  }
  if (spec.contains("scenarios")) {
    const GamesOutput g = games(json{{"scenarios", spec.at("scenarios")}}, seed);
    files.push_back({spec.contains("curves") ? stem + "_games.csv" : output, g.csv});
    summary["games"] = g.records;
  }
  if (!summary.is_null()) {
    summary["figure_id"] = id;
    files.push_back({stem + ".summary.json", summary.dump(2) + "\n"});
  }
  return files;
}

std::filesystem::path bundled_figures_dir() {
  if (const char* env = std::getenv("ORGUTIL_FIGURES_DIR")) return env;
  return ORGUTIL_FIGURES_DIR;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::parse_error, "cannot write " + path.string());
  out << text;
}

std::optional<std::uint64_t> resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("ORGUTIL_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) bad_input("ORGUTIL_SEED must be an integer");
    return v;
  }
  return std::nullopt;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Organizational utility functions from member utilities and aggregation structures"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  std::string input, output, lottery_path, grid_text, format_text = "csv", report_path, figure_id;
  std::optional<std::uint64_t> seed_flag;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--output", output, "Output path ('-' or omitted for stdout)");
    sub->add_option("--seed", seed_flag, "Random seed (falls back to ORGUTIL_SEED)");
    sub->add_option("--report", report_path, "Write a run report JSON here");
  };
  auto* derive_cmd = app.add_subcommand("derive", "Organizational utility and screening on a grid");
  derive_cmd->add_option("--input", input, "Aggregation tree JSON")->required();
  derive_cmd->add_option("--grid", grid_text, "MIN:MAX:POINTS (default -10:10:2001)");
  derive_cmd->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  common(derive_cmd);

  auto* risk_cmd = app.add_subcommand("risk", "EU, CE, acceptance and minimum winning probability");
  risk_cmd->add_option("--input", input, "Aggregation tree JSON")->required();
  risk_cmd->add_option("--lottery", lottery_path, "Lottery JSON")->required();
  risk_cmd->add_option("--format", format_text, "json")->check(CLI::IsMember({"json"}));
  common(risk_cmd);

  auto* games_cmd = app.add_subcommand("games", "Cournot equilibria or principal-agent contracts");
  games_cmd->add_option("--input", input, "Scenario JSON")->required();
  games_cmd->add_option("--format", format_text, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  common(games_cmd);

  auto* figures_cmd = app.add_subcommand("figures", "Emit figure data files");
  figures_cmd->add_option("--figure", figure_id, "Figure id from the bundled specs, or 'all'");
  figures_cmd->add_option("--input", input, "Figure spec JSON (instead of --figure)");
  figures_cmd->add_option("--grid", grid_text, "Override the spec grid, MIN:MAX:POINTS");
  common(figures_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : input_error;
  }

  const auto started = std::chrono::steady_clock::now();
  json report{{"tool", "orgutil"}, {"version", version}};
  try {
    const auto seed = resolve_seed(seed_flag);
    const Format format = format_text == "json" ? Format::json : Format::csv;
    std::vector<std::string> written;

    if (derive_cmd->parsed()) {
      const Grid grid = grid_text.empty() ? Grid{} : parse_grid(grid_text);
      const AggregationTree tree = tree_from_json(read_json_file(input));
      write_text(output, derive(tree, grid, format));
      report["command"] = "derive";
      report["inputs"] = {{"structure", to_json(tree)},
                          {"grid", {{"x_min", grid.min}, {"x_max", grid.max}, {"points", grid.points}}}};
      written.push_back(output);
    } else if (risk_cmd->parsed()) {
      const AggregationTree tree = tree_from_json(read_json_file(input));
      const Lottery lottery = lottery_from_json(read_json_file(lottery_path));
      const json result = risk(tree, lottery);
      write_text(output, result.dump(2) + "\n");
      report["command"] = "risk";
      report["inputs"] = result.at("inputs");
      report["tolerances"] = result.at("tolerances");
      written.push_back(output);
    } else if (games_cmd->parsed()) {
      const json scenarios = read_json_file(input);
      const GamesOutput result = games(scenarios, seed);
      write_text(output, format == Format::csv ? result.csv : result.records.dump(2) + "\n");
      report["command"] = "games";
      report["inputs"] = scenarios;
      written.push_back(output);
    } else if (figures_cmd->parsed()) {
      std::optional<Grid> grid;
      if (!grid_text.empty()) grid = parse_grid(grid_text);
      std::vector<json> specs;
      if (!input.empty()) {
        specs.push_back(read_json_file(input));
      } else if (figure_id == "all") {
        for (auto id : figure_ids)
          specs.push_back(read_json_file(bundled_figures_dir() / (std::string(id) + ".json")));
      } else if (!figure_id.empty()) {
        if (std::find(std::begin(figure_ids), std::end(figure_ids), figure_id) == std::end(figure_ids))
          throw Error(ErrorCode::unknown_figure, "'" + figure_id + "'");
        specs.push_back(read_json_file(bundled_figures_dir() / (figure_id + ".json")));
      } else {
        bad_input("figures needs --figure ID or --input SPEC");
      }
      const std::filesystem::path dir = output.empty() ? "." : output;
      for (const auto& spec : specs)
        for (const auto& file : figure(spec, grid, seed)) {
          write_text(dir / file.name, file.contents);
          written.push_back((dir / file.name).string());
        }
      report["command"] = "figures";
      report["inputs"] = specs;
    }

    if (!report_path.empty()) {
      report["outputs"] = written;
      report["seed"] = seed ? json(*seed) : json(nullptr);
      report["wall_time_s"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      write_text(report_path, report.dump(2) + "\n");
    }
    return ok;
  } catch (const Error& e) {
    std::cerr << "orgutil: " << e.what() << '\n';
    return is_numerical(e.code()) ? numerical_failure : input_error;
  } catch (const json::exception& e) {
    std::cerr << "orgutil: ParseError: " << e.what() << '\n';
    return input_error;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "orgutil: " << e.what() << '\n';
    return input_error;
  }
}

}  // namespace orgutil::cli
