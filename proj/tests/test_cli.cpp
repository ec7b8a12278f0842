#include "doctest.h"

#include "orgutil/cli.hpp"
#include "orgutil/error.hpp"
#include "orgutil/json_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace orgutil;
namespace fs = std::filesystem;

namespace {

const fs::path source_dir = ORGUTIL_SOURCE_DIR;

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "orgutil");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "orgutil_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string scenario(const std::string& name) { return (source_dir / "scenarios" / name).string(); }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

TEST_CASE("grid parsing") {
  const cli::Grid g = cli::parse_grid("-10:10:2001");
  CHECK(g.min == -10.0);
  CHECK(g.points == 2001);
  CHECK(g.at(1000) == 0.0);
  CHECK(g.at(2000) == 10.0);
  CHECK_THROWS_AS((void)cli::parse_grid("1:2"), Error);
  CHECK_THROWS_AS((void)cli::parse_grid("2:1:10"), Error);
  CHECK_THROWS_AS((void)cli::parse_grid("0:1:1"), Error);
  CHECK_THROWS_AS((void)cli::parse_grid("a:1:10"), Error);
}

TEST_CASE("derive writes org and member columns") {
  const fs::path out = scratch("derive.csv");
  REQUIRE(run({"derive", "--input", scenario("unanimity.json"), "--grid", "4:5:2", "--output", out.string()}) == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 3);
  const auto& h = rows[0];
  CHECK(std::stod(rows[1][column(h, "x")]) == 4.0);
  CHECK(std::stod(rows[1][column(h, "u_org")]) == doctest::Approx(6.87).epsilon(0.01 / 6.87));
  CHECK(rows[1][column(h, "status")] == "ok");
  CHECK(std::stod(rows[1][column(h, "u_A")]) == 9.0);
  CHECK(std::stod(rows[1][column(h, "u_B")]) == 7.0);

  const fs::path js = scratch("derive.json");
  REQUIRE(run({"derive", "--input", scenario("polyarchy.json"), "--grid", "-10:10:3", "--format", "json",
               "--output", js.string()}) == 0);
  const json records = read_json_file(js);
  REQUIRE(records.size() == 3);
  CHECK(records[0]["u_org"].get<double>() == doctest::Approx(-5.0).epsilon(0.002));
}

TEST_CASE("single leaf derive reproduces the member") {
  const fs::path out = scratch("leaf.csv");
  REQUIRE(run({"derive", "--input", scenario("single_leaf.json"), "--grid", "-10:10:201", "--output", out.string()}) == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 202);
  const auto& h = rows[0];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][column(h, "u_org")]) ==
          doctest::Approx(std::stod(rows[i][column(h, "u_A")])).epsilon(1e-12));
    CHECK(rows[i][column(h, "s_org")] == rows[i][column(h, "s_A")]);
  }
}

TEST_CASE("two-dimensional derive uses a cartesian grid") {
  const fs::path in = scratch("multi.json"), out = scratch("multi.csv");
  spit(in, R"({"kind":"and","children":[
    {"kind":"leaf","id":"A","utility":{"kind":"affine","alpha":0,"beta":[1,1]}},
    {"kind":"leaf","id":"B","utility":{"kind":"affine","alpha":0,"beta":[2,3]}}]})");
  REQUIRE(run({"derive", "--input", in.string(), "--grid", "-1:1:5", "--output", out.string()}) == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 26);
  CHECK(rows[0][0] == "x1");
  CHECK(rows[0][1] == "x2");
}

TEST_CASE("input errors exit with 2") {
  const fs::path bad = scratch("bad.json");
  spit(bad, "{\"kind\": \"and\", ");
  CHECK(run({"derive", "--input", bad.string(), "--output", scratch("x.csv").string()}) == cli::input_error);
  spit(bad, R"({"kind":"and","children":[{"kind":"leaf","id":"A","utility":{"kind":"affine","alpha":0,"beta":[1]}}]})");
  CHECK(run({"derive", "--input", bad.string(), "--output", scratch("x.csv").string()}) == cli::input_error);
  CHECK(run({"derive", "--input", (source_dir / "missing.json").string()}) == cli::input_error);
  CHECK(run({"derive", "--input", scenario("unanimity.json"), "--grid", "1:0:3"}) == cli::input_error);
  CHECK(run({"frobnicate"}) == cli::input_error);
  CHECK(run({"figures", "--figure", "fig99", "--output", scratch("figs").string()}) == cli::input_error);
  CHECK_THROWS_AS((void)cli::figure(json{{"figure_id", "fig99"}}, std::nullopt, std::nullopt), Error);
}

TEST_CASE("risk report") {
  const fs::path out = scratch("risk.json");
  REQUIRE(run({"risk", "--input", scenario("unanimity.json"), "--lottery", scenario("bet.json"), "--output", out.string()}) == 0);
  const json r = read_json_file(out).at("results");
  CHECK(r["expected_utility"].get<double>() == doctest::Approx(-12.5).epsilon(0.05 / 12.5));
  CHECK(r["certainty_equivalent"].get<double>() == doctest::Approx(-2.5).epsilon(0.05 / 2.5));
  CHECK(r["min_winning_probability"].get<double>() == doctest::Approx(0.73).epsilon(0.01 / 0.73));
  CHECK(r["acceptance_probability"].get<double>() == doctest::Approx(3.7e-6).epsilon(0.02));
  CHECK(read_json_file(out).at("inputs").contains("lottery"));

  REQUIRE(run({"risk", "--input", scenario("opposing.json"), "--lottery", scenario("bet.json"), "--output", out.string()}) == 0);
  const json o = read_json_file(out).at("results");
  CHECK(o["certainty_equivalent"].is_null());
  CHECK(o["certainty_equivalent_omitted"]["reason"] == "non-monotone");
  CHECK(o["certainty_equivalent_omitted"]["code"] == "NonMonotonicUtility");
  CHECK(o["min_winning_probability"].is_null());
  CHECK(o["expected_utility"].is_number());
}

TEST_CASE("games rows keep input order and record failures") {
  const fs::path in = scratch("games.json"), out = scratch("games.csv");
  spit(in, R"({"scenarios":[
    {"model":"cournot","config":{"a_sd":0},"pairs":["NN"]},
    {"model":"contract","config":{"reservation_utility":5},"principals":["N"]},
    {"model":"contract","principals":["N"]}]})");
  REQUIRE(run({"games", "--input", in.string(), "--output", out.string()}) == 0);
  const auto rows = csv_rows(slurp(out));
  REQUIRE(rows.size() == 4);
  const auto& h = rows[0];
  CHECK(rows[1][column(h, "label")] == "NN");
  CHECK(std::stod(rows[1][column(h, "q_i")]) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(rows[2][column(h, "status")] == "Infeasible");
  CHECK(rows[3][column(h, "status")] == "ok");
  CHECK(std::stod(rows[3][column(h, "w_variable")]) == doctest::Approx(0.3188).epsilon(1e-3));

  spit(in, R"({"model":"duopoly"})");
  CHECK(run({"games", "--input", in.string(), "--output", out.string()}) == cli::input_error);
  spit(in, R"({"model":"cournot","pairs":["NX"]})");
  CHECK(run({"games", "--input", in.string(), "--output", out.string()}) == cli::input_error);
}

TEST_CASE("figures from the bundled specs") {
  const fs::path dir = scratch("figs");
  REQUIRE(run({"figures", "--figure", "opposing_views", "--output", dir.string()}) == 0);
  const auto rows = csv_rows(slurp(dir / "opposing_views.csv"));
  REQUIRE(rows.size() == 2002);
  const std::size_t s = column(rows[0], "unanimity_s");
  double peak = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) peak = std::max(peak, std::stod(rows[i][s]));
  CHECK(peak == doctest::Approx(0.19).epsilon(0.02 / 0.19));
  const json summary = read_json_file(dir / "opposing_views.summary.json");
  CHECK(summary["risk"][0]["results"]["certainty_equivalent"].is_null());

  REQUIRE(run({"figures", "--figure", "vary_n", "--grid", "-10:10:21", "--output", dir.string()}) == 0);
  const auto vary = csv_rows(slurp(dir / "vary_n.csv"));
  CHECK(vary.size() == 22);
  CHECK(vary[0].size() == 21);

  for (auto id : cli::figure_ids) CHECK(fs::exists(cli::bundled_figures_dir() / (std::string(id) + ".json")));
}

TEST_CASE("report goes only to the report path") {
  const fs::path out = scratch("det.csv"), report = scratch("report.json");
  REQUIRE(run({"derive", "--input", scenario("unanimity.json"), "--grid", "-1:1:11", "--output", out.string(),
               "--report", report.string(), "--seed", "9"}) == 0);
  const std::string first = slurp(out);
  const json rep = read_json_file(report);
  CHECK(rep["version"] == std::string(cli::version));
  CHECK(rep["seed"] == 9);
  CHECK(rep.contains("wall_time_s"));
  REQUIRE(run({"derive", "--input", scenario("unanimity.json"), "--grid", "-1:1:11", "--output", out.string()}) == 0);
  CHECK(slurp(out) == first);
}
