#pragma once

#include "orgutil/aggregation.hpp"
#include "orgutil/utility.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace orgutil {

struct RiskNeutral {};

/// How a firm (or principal) values a monetary outcome.
using FirmPreference = std::variant<RiskNeutral, OrgUtility>;

double preference_utility(const FirmPreference& pref, double money);

enum class FirmType { neutral, unanimity, polyarchy };

/// Members used for the derived firms: u_A = 5 + x, u_B = -5 + 3x.
std::vector<Member> default_firm_members();
FirmPreference make_firm(FirmType type, const std::vector<Member>& members = default_firm_members());
char firm_code(FirmType type);  // 'N', 'U', 'P'

// ---------------------------------------------------------------------------
// Cournot duopoly, inverse demand P = max(a - b Q, 0), a ~ Normal(a_mean, a_sd^2).

struct CournotConfig {
  double a_mean = 10.0;
  double a_sd = 2.0;
  double b = 0.5;
  double c = 1.0;
  double q_max = 12.0;
  double convergence_tol = 1e-7;
  double integration_halfwidth_sds = 10.0;
  int max_iterations = 10000;
  /// Gauss-Legendre panels on each side of the price-floor kink.
  int panels = 40;
  int nodes_per_panel = 12;

  void validate() const;
};

double cournot_profit(double q_own, double q_other, double a, const CournotConfig& cfg);

/// E_a[u(profit)] over [a_mean - w a_sd, a_mean + w a_sd].
double cournot_expected_utility(const FirmPreference& pref, double q_own, double q_other,
                                const CournotConfig& cfg);

/// Maximizer of expected utility over [0, q_max]. A 512-point scan checks
/// unimodality (NonUnimodalObjective otherwise), golden section narrows the
/// bracket and a derivative-sign bisection finishes it.
double cournot_best_response(const FirmPreference& pref, double q_other, const CournotConfig& cfg);

struct EquilibriumResult {
  double q_i = 0.0;
  double q_j = 0.0;
  double eu_i = 0.0;
  double eu_j = 0.0;
  double profit_i = 0.0;  // expected profit
  double profit_j = 0.0;
  int iterations = 0;
  double residual = 0.0;  // last max quantity change
  bool converged = false;
};

/// Sequential best responses from the symmetric risk-neutral equilibrium.
/// Reaching max_iterations leaves `converged` false.
EquilibriumResult cournot_equilibrium(const FirmPreference& pref_i, const FirmPreference& pref_j,
                                      const CournotConfig& cfg);

// ---------------------------------------------------------------------------
// Principal-agent with a CARA agent, linear wage w = w_F + w_V R,
// output R ~ Normal(e, sigma^2).

struct AnnealingSettings {
  double initial_temp = 1.0;
  double cooling = 0.95;
  int proposals_per_stage = 100;
  int iterations = 50000;
  double proposal_scale = 0.1;  // fraction of each bound's width
  std::uint64_t seed = 42;
};

struct ContractConfig {
  double sigma = 3.0;
  double gamma = 0.5;
  double reservation_utility = -5.0;
  Interval w_fixed{-5.0, 10.0};
  Interval w_variable{0.0, 1.0};
  Interval effort{0.0, 5.0};
  int hermite_nodes = 61;
  AnnealingSettings annealing;

  void validate() const;
};

/// E_R[-exp(-gamma w)] - e^2 / 2 via the lognormal moment identity.
double agent_expected_utility(double w_fixed, double w_variable, double effort,
                              const ContractConfig& cfg);

/// d/de of agent_expected_utility.
double agent_foc(double w_fixed, double w_variable, double effort, const ContractConfig& cfg);

struct EffortSolution {
  double effort;
  bool interior;  // false when the first-order condition has no root in bounds
};

EffortSolution agent_optimal_effort(double w_fixed, double w_variable, const ContractConfig& cfg);

/// E_R[u(R - w_F - w_V R)] by Gauss-Hermite quadrature.
double principal_expected_utility(const FirmPreference& principal, double w_fixed,
                                  double w_variable, double effort, const ContractConfig& cfg);

struct ContractResult {
  double w_fixed = 0.0;
  double w_variable = 0.0;
  double effort = 0.0;
  double principal_eu = 0.0;
  double agent_eu = 0.0;
  double pc_slack = 0.0;     // agent_eu - reservation utility
  double ic_residual = 0.0;  // |agent FOC| at the returned effort
  bool at_bound = false;     // a contract or effort bound is active
};

/// Seeded simulated annealing over (w_F, w_V) with effort tied to the agent's
/// best response and the participation constraint as hard feasibility,
/// followed by a deterministic polish. Infeasible if no bounded contract
/// meets the participation constraint.
ContractResult optimal_contract(const FirmPreference& principal, const ContractConfig& cfg);

}  // namespace orgutil
