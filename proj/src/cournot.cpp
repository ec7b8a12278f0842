#include "orgutil/error.hpp"
#include "orgutil/games.hpp"
#include "orgutil/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace orgutil {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const GaussRule& legendre_rule(int n) {
  static const GaussRule rule12 = gauss_legendre(12);
  if (n == 12) return rule12;
  thread_local GaussRule other;
  if (other.nodes.size() != n) other = gauss_legendre(n);
  return other;
}

constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
constexpr int scan_points = 512;

}  // namespace

double preference_utility(const FirmPreference& pref, double money) {
  return std::visit(overloaded{
                        [&](const RiskNeutral&) { return money; },
                        [&](const OrgUtility& org) { return org(money); },
                    },
                    pref);
}

std::vector<Member> default_firm_members() {
  return {{"A", UtilityExpr::affine(5.0, {1.0})}, {"B", UtilityExpr::affine(-5.0, {3.0})}};
}

FirmPreference make_firm(FirmType type, const std::vector<Member>& members) {
  if (type == FirmType::neutral) return RiskNeutral{};
  std::vector<AggregationTree> leaves;
  for (const auto& m : members) leaves.push_back(AggregationTree::leaf(m.id, m.utility));
  auto tree = type == FirmType::unanimity ? AggregationTree::all_of(std::move(leaves))
                                          : AggregationTree::any_of(std::move(leaves));
  return derive_org_utility(tree);
}

char firm_code(FirmType type) {
  switch (type) {
    case FirmType::neutral: return 'N';
    case FirmType::unanimity: return 'U';
    case FirmType::polyarchy: return 'P';
  }
  return '?';
}

void CournotConfig::validate() const {
  const bool finite = std::isfinite(a_mean) && std::isfinite(a_sd) && std::isfinite(b) &&
                      std::isfinite(c) && std::isfinite(q_max) &&
                      std::isfinite(integration_halfwidth_sds);
  if (!finite) throw Error(ErrorCode::invalid_config, "cournot parameters must be finite");
  if (a_sd < 0.0) throw Error(ErrorCode::invalid_config, "a_sd must be >= 0");
  if (b <= 0.0) throw Error(ErrorCode::invalid_config, "b must be > 0");
  if (c < 0.0) throw Error(ErrorCode::invalid_config, "c must be >= 0");
  if (q_max <= 0.0) throw Error(ErrorCode::invalid_config, "q_max must be > 0");
  if (a_mean <= c) throw Error(ErrorCode::invalid_config, "a_mean must exceed c");
  if (!(convergence_tol > 0.0)) throw Error(ErrorCode::invalid_config, "convergence_tol must be > 0");
  if (integration_halfwidth_sds <= 0.0 || panels < 1 || nodes_per_panel < 1 || max_iterations < 1)
    throw Error(ErrorCode::invalid_config, "bad quadrature or iteration settings");
}

double cournot_profit(double q_own, double q_other, double a, const CournotConfig& cfg) {
  const double price = std::max(a - cfg.b * (q_own + q_other), 0.0);
  return (price - cfg.c) * q_own;
}

double cournot_expected_utility(const FirmPreference& pref, double q_own, double q_other,
                                const CournotConfig& cfg) {
  if (!(q_own >= 0.0 && q_own <= cfg.q_max && q_other >= 0.0 && q_other <= cfg.q_max))
    throw Error(ErrorCode::quantity_out_of_bounds, "quantities must lie in [0, q_max]");
  const auto u_of_a = [&](double a) {
    return preference_utility(pref, cournot_profit(q_own, q_other, a, cfg));
  };
  if (cfg.a_sd == 0.0) return u_of_a(cfg.a_mean);

  const double lo = cfg.a_mean - cfg.integration_halfwidth_sds * cfg.a_sd;
  const double hi = cfg.a_mean + cfg.integration_halfwidth_sds * cfg.a_sd;
  const double norm = 1.0 / (cfg.a_sd * std::sqrt(2.0 * std::numbers::pi));
  const auto integrand = [&](double a) {
    const double z = (a - cfg.a_mean) / cfg.a_sd;
    return u_of_a(a) * norm * std::exp(-0.5 * z * z);
  };

  // Split where the price floor starts to bind; each side keeps a fixed
  // panel count so the estimate varies smoothly with the quantities.
  const GaussRule& rule = legendre_rule(cfg.nodes_per_panel);
  const double kink = cfg.b * (q_own + q_other);
  if (kink <= lo || kink >= hi) return integrate_composite(integrand, lo, hi, rule, 2 * cfg.panels);
  return integrate_composite(integrand, lo, kink, rule, cfg.panels) +
         integrate_composite(integrand, kink, hi, rule, cfg.panels);
}

double cournot_best_response(const FirmPreference& pref, double q_other, const CournotConfig& cfg) {
  if (!(q_other >= 0.0 && q_other <= cfg.q_max))
    throw Error(ErrorCode::quantity_out_of_bounds, "q_other must lie in [0, q_max]");
  const auto eu = [&](double q) { return cournot_expected_utility(pref, q, q_other, cfg); };

  std::vector<double> grid(scan_points), values(scan_points);
  for (int k = 0; k < scan_points; ++k) {
    grid[k] = k + 1 == scan_points ? cfg.q_max : cfg.q_max * k / (scan_points - 1);
    values[k] = eu(grid[k]);
  }
  int peaks = 0;
  for (int k = 0; k < scan_points; ++k) {
    const bool above_left = k == 0 || values[k] > values[k - 1];
    const bool above_right = k + 1 == scan_points || values[k] >= values[k + 1];
    if (above_left && above_right) ++peaks;
  }
  if (peaks > 1)
    throw Error(ErrorCode::non_unimodal_objective,
                "expected utility has " + std::to_string(peaks) + " separated local maxima");

  const int best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  double a = grid[std::max(best - 1, 0)];
  double b = grid[std::min(best + 1, scan_points - 1)];

  // Golden section on the bracketing cells.
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = eu(x1), f2 = eu(x2);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = eu(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = eu(x1);
    }
  }
  const double golden = 0.5 * (a + b);

  // Function values are flat to rounding near the optimum; the derivative
  // sign is not.
  constexpr double h = 1e-5;
  const auto slope = [&](double q) {
    const double l = std::max(q - h, 0.0), r = std::min(q + h, cfg.q_max);
    return (eu(r) - eu(l)) / (r - l);
  };
  double left = std::max(golden - 1e-5, 0.0), right = std::min(golden + 1e-5, cfg.q_max);
  const double slope_left = slope(left), slope_right = slope(right);
  if (left == 0.0 && slope_left <= 0.0) return 0.0;
  if (right == cfg.q_max && slope_right >= 0.0) return cfg.q_max;
  if (!(slope_left > 0.0 && slope_right < 0.0)) return golden;
  while (right - left > 1e-11) {
    const double mid = 0.5 * (left + right);
    if (mid == left || mid == right) break;
    (slope(mid) > 0.0 ? left : right) = mid;
  }
  return 0.5 * (left + right);
}

EquilibriumResult cournot_equilibrium(const FirmPreference& pref_i, const FirmPreference& pref_j,
                                      const CournotConfig& cfg) {
  cfg.validate();
  EquilibriumResult r;
  r.q_i = r.q_j = std::clamp((cfg.a_mean - cfg.c) / (3.0 * cfg.b), 0.0, cfg.q_max);
  for (r.iterations = 1; r.iterations <= cfg.max_iterations; ++r.iterations) {
    const double next_i = cournot_best_response(pref_i, r.q_j, cfg);
    const double next_j = cournot_best_response(pref_j, next_i, cfg);
    r.residual = std::max(std::abs(next_i - r.q_i), std::abs(next_j - r.q_j));
    r.q_i = next_i;
    r.q_j = next_j;
    if (r.residual < cfg.convergence_tol) {
      r.converged = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, cfg.max_iterations);
  r.eu_i = cournot_expected_utility(pref_i, r.q_i, r.q_j, cfg);
  r.eu_j = cournot_expected_utility(pref_j, r.q_j, r.q_i, cfg);
  r.profit_i = cournot_expected_utility(RiskNeutral{}, r.q_i, r.q_j, cfg);
  r.profit_j = cournot_expected_utility(RiskNeutral{}, r.q_j, r.q_i, cfg);
  return r;
}

}  // namespace orgutil
