#include "orgutil/json_io.hpp"

#include "orgutil/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace orgutil {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) fail("expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

double number(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

int integer_or(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

Interval interval_or(const json& j, const char* key, Interval fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(std::string("field '") + key + "' must be [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

const std::string& kind_of(const json& j) {
  const json& k = field(j, "kind");
  if (!k.is_string()) fail("'kind' must be a string");
  return k.get_ref<const std::string&>();
}

json interval_json(Interval r) { return json::array({r.lo, r.hi}); }

}  // namespace

json to_json(const UtilityExpr& u) {
  return std::visit(
      overloaded{
          [](const expr::Constant& c) { return json{{"kind", "constant"}, {"value", c.value}}; },
          [](const expr::Var& v) { return json{{"kind", "var"}, {"index", v.index}}; },
          [](const expr::Affine& a) {
            json beta = json::array();
            for (Eigen::Index i = 0; i < a.form.beta.size(); ++i) beta.push_back(a.form.beta[i]);
            return json{{"kind", "affine"}, {"alpha", a.form.alpha}, {"beta", beta}};
          },
          [](const expr::ExpCara& c) {
            return json{{"kind", "exp_cara"}, {"scale", c.scale}, {"rate", c.rate}};
          },
          [](const expr::Sum& s) {
            json children = json::array();
            for (const auto& c : s.children) children.push_back(to_json(c));
            return json{{"kind", "sum"}, {"children", children}};
          },
          [](const expr::Scale& s) {
            return json{{"kind", "scale"}, {"factor", s.factor}, {"child", to_json(*s.child)}};
          },
          [](const expr::Negate& n) { return json{{"kind", "negate"}, {"child", to_json(*n.child)}}; },
      },
      u.node());
}

UtilityExpr utility_from_json(const json& j) {
  const std::string& kind = kind_of(j);
  if (kind == "constant") return UtilityExpr::constant(number(j, "value"));
  if (kind == "var") {
    const json& idx = field(j, "index");
    if (!idx.is_number_integer() || idx.get<long long>() < 0)
      fail("'index' must be a non-negative integer");
    return UtilityExpr::var(idx.get<Eigen::Index>());
  }
  if (kind == "affine") {
    const json& beta = field(j, "beta");
    if (!beta.is_array()) fail("'beta' must be an array");
    Eigen::VectorXd b(static_cast<Eigen::Index>(beta.size()));
    for (std::size_t i = 0; i < beta.size(); ++i) {
      if (!beta[i].is_number()) fail("'beta' entries must be numbers");
      b[static_cast<Eigen::Index>(i)] = beta[i].get<double>();
    }
    return UtilityExpr::affine(number(j, "alpha"), std::move(b));
  }
  if (kind == "exp_cara") return UtilityExpr::exp_cara(number(j, "scale"), number(j, "rate"));
  if (kind == "sum") {
    const json& children = field(j, "children");
    if (!children.is_array()) fail("'children' must be an array");
    std::vector<UtilityExpr> parts;
    for (const auto& c : children) parts.push_back(utility_from_json(c));
    return UtilityExpr::sum(std::move(parts));
  }
  if (kind == "scale")
    return UtilityExpr::scaled(number(j, "factor"), utility_from_json(field(j, "child")));
  if (kind == "negate") return UtilityExpr::negate(utility_from_json(field(j, "child")));
  fail("unknown utility kind '" + kind + "'");
}

json to_json(const AggregationTree& tree) {
  const auto children_json = [](const std::vector<AggregationTree>& children) {
    json out = json::array();
    for (const auto& c : children) out.push_back(to_json(c));
    return out;
  };
  return std::visit(
      overloaded{
          [](const tree::Leaf& l) {
            return json{{"kind", "leaf"}, {"id", l.member.id}, {"utility", to_json(l.member.utility)}};
          },
          [&](const tree::And& n) { return json{{"kind", "and"}, {"children", children_json(n.children)}}; },
          [&](const tree::Or& n) { return json{{"kind", "or"}, {"children", children_json(n.children)}}; },
          [&](const tree::KofN& n) {
            return json{{"kind", "kofn"}, {"k", n.k}, {"children", children_json(n.children)}};
          },
      },
      tree.node());
}

AggregationTree tree_from_json(const json& j) {
  const std::string& kind = kind_of(j);
  if (kind == "leaf") {
    const json& id = field(j, "id");
    if (!id.is_string()) fail("leaf 'id' must be a string");
    return AggregationTree::leaf(id.get<std::string>(), utility_from_json(field(j, "utility")));
  }
  const json& children = field(j, "children");
  if (!children.is_array()) fail("'children' must be an array");
  std::vector<AggregationTree> nodes;
  for (const auto& c : children) nodes.push_back(tree_from_json(c));
  if (kind == "and") return AggregationTree::all_of(std::move(nodes));
  if (kind == "or") return AggregationTree::any_of(std::move(nodes));
  if (kind == "kofn") {
    const json& k = field(j, "k");
    if (!k.is_number_integer()) fail("'k' must be an integer");
    return AggregationTree::k_of_n(k.get<int>(), std::move(nodes));
  }
  fail("unknown tree kind '" + kind + "'");
}

json to_json(const Lottery& lottery) {
  json branches = json::array();
  for (const auto& b : lottery.branches())
    branches.push_back({{"outcome", b.outcome}, {"prob", b.prob}});
  return json{{"branches", branches}};
}

Lottery lottery_from_json(const json& j) {
  const json& branches = field(j, "branches");
  if (!branches.is_array()) fail("'branches' must be an array");
  std::vector<Branch> out;
  for (const auto& b : branches) out.push_back({number(b, "outcome"), number(b, "prob")});
  return Lottery(std::move(out));
}

json to_json(const CournotConfig& cfg) {
  return json{{"a_mean", cfg.a_mean},
              {"a_sd", cfg.a_sd},
              {"b", cfg.b},
              {"c", cfg.c},
              {"q_max", cfg.q_max},
              {"convergence_tol", cfg.convergence_tol},
              {"integration_halfwidth_sds", cfg.integration_halfwidth_sds},
              {"max_iterations", cfg.max_iterations},
              {"panels", cfg.panels},
              {"nodes_per_panel", cfg.nodes_per_panel}};
}

CournotConfig cournot_config_from_json(const json& j) {
  if (!j.is_object()) fail("cournot config must be an object");
  CournotConfig cfg;
  cfg.a_mean = number_or(j, "a_mean", cfg.a_mean);
  cfg.a_sd = number_or(j, "a_sd", cfg.a_sd);
  cfg.b = number_or(j, "b", cfg.b);
  cfg.c = number_or(j, "c", cfg.c);
  cfg.q_max = number_or(j, "q_max", cfg.q_max);
  cfg.convergence_tol = number_or(j, "convergence_tol", cfg.convergence_tol);
  cfg.integration_halfwidth_sds =
      number_or(j, "integration_halfwidth_sds", cfg.integration_halfwidth_sds);
  cfg.max_iterations = integer_or(j, "max_iterations", cfg.max_iterations);
  cfg.panels = integer_or(j, "panels", cfg.panels);
  cfg.nodes_per_panel = integer_or(j, "nodes_per_panel", cfg.nodes_per_panel);
  cfg.validate();
  return cfg;
}

json to_json(const ContractConfig& cfg) {
  const auto& a = cfg.annealing;
  return json{{"sigma", cfg.sigma},
              {"gamma", cfg.gamma},
              {"reservation_utility", cfg.reservation_utility},
              {"w_fixed", interval_json(cfg.w_fixed)},
              {"w_variable", interval_json(cfg.w_variable)},
              {"effort", interval_json(cfg.effort)},
              {"hermite_nodes", cfg.hermite_nodes},
              {"annealing",
               {{"initial_temp", a.initial_temp},
                {"cooling", a.cooling},
                {"proposals_per_stage", a.proposals_per_stage},
                {"iterations", a.iterations},
                {"proposal_scale", a.proposal_scale},
                {"seed", a.seed}}}};
}

ContractConfig contract_config_from_json(const json& j) {
  if (!j.is_object()) fail("contract config must be an object");
  ContractConfig cfg;
  cfg.sigma = number_or(j, "sigma", cfg.sigma);
  cfg.gamma = number_or(j, "gamma", cfg.gamma);
  cfg.reservation_utility = number_or(j, "reservation_utility", cfg.reservation_utility);
  cfg.w_fixed = interval_or(j, "w_fixed", cfg.w_fixed);
  cfg.w_variable = interval_or(j, "w_variable", cfg.w_variable);
  cfg.effort = interval_or(j, "effort", cfg.effort);
  cfg.hermite_nodes = integer_or(j, "hermite_nodes", cfg.hermite_nodes);
  if (j.contains("annealing")) {
    const json& a = j.at("annealing");
    if (!a.is_object()) fail("'annealing' must be an object");
    auto& s = cfg.annealing;
    s.initial_temp = number_or(a, "initial_temp", s.initial_temp);
    s.cooling = number_or(a, "cooling", s.cooling);
    s.proposals_per_stage = integer_or(a, "proposals_per_stage", s.proposals_per_stage);
    s.iterations = integer_or(a, "iterations", s.iterations);
    s.proposal_scale = number_or(a, "proposal_scale", s.proposal_scale);
    if (a.contains("seed")) {
      if (!a.at("seed").is_number_unsigned()) fail("'seed' must be a non-negative integer");
      s.seed = a.at("seed").get<std::uint64_t>();
    }
  }
  cfg.validate();
  return cfg;
}

json to_json(const EquilibriumResult& r) {
  return json{{"q_i", r.q_i},           {"q_j", r.q_j},           {"eu_i", r.eu_i},
              {"eu_j", r.eu_j},         {"profit_i", r.profit_i}, {"profit_j", r.profit_j},
              {"iterations", r.iterations}, {"residual", r.residual}, {"converged", r.converged}};
}

json to_json(const ContractResult& r) {
  return json{{"w_fixed", r.w_fixed},         {"w_variable", r.w_variable},
              {"effort", r.effort},           {"principal_eu", r.principal_eu},
              {"agent_eu", r.agent_eu},       {"pc_slack", r.pc_slack},
              {"ic_residual", r.ic_residual}, {"at_bound", r.at_bound}};
}

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << column << ": " << e.what();
    throw Error(ErrorCode::parse_error, msg.str());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path.string());
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

}  // namespace orgutil
