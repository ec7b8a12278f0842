#include "orgutil/error.hpp"
#include "orgutil/games.hpp"
#include "orgutil/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace orgutil {
namespace {

// exp(-gamma w_F - gamma w_V e + gamma^2 w_V^2 sigma^2 / 2) = -E_R[-exp(-gamma w)]
double wage_disutility(double w_fixed, double w_variable, double effort, const ContractConfig& cfg) {
  const double g = cfg.gamma;
  return std::exp(-g * (w_fixed + w_variable * effort) +
                  0.5 * g * g * w_variable * w_variable * cfg.sigma * cfg.sigma);
}

struct Candidate {
  double w_fixed;
  double w_variable;
  double effort;
  double objective;
};

class ContractProblem {
 public:
  ContractProblem(const FirmPreference& principal, const ContractConfig& cfg)
      : principal_(principal), cfg_(cfg), hermite_(gauss_hermite(cfg.hermite_nodes)) {}

  // Effort tied to the agent's best response; nullopt when the agent declines.
  std::optional<Candidate> evaluate(double w_fixed, double w_variable) const {
    const double effort = agent_optimal_effort(w_fixed, w_variable, cfg_).effort;
    if (agent_expected_utility(w_fixed, w_variable, effort, cfg_) < cfg_.reservation_utility)
      return std::nullopt;
    return Candidate{w_fixed, w_variable, effort, objective(w_fixed, w_variable, effort)};
  }

  double objective(double w_fixed, double w_variable, double effort) const {
    return normal_expectation(
        [&](double output) {
          return preference_utility(principal_, output - w_fixed - w_variable * output);
        },
        effort, cfg_.sigma, hermite_);
  }

  // Agent utility at its optimal effort rises with w_F, so the participation
  // constraint holds on [w_F*, hi]. Returns w_F* (or the lower bound).
  double participation_boundary(double w_variable) const {
    const auto accepts = [&](double w_fixed) {
      const double e = agent_optimal_effort(w_fixed, w_variable, cfg_).effort;
      return agent_expected_utility(w_fixed, w_variable, e, cfg_) >= cfg_.reservation_utility;
    };
    double lo = cfg_.w_fixed.lo, hi = cfg_.w_fixed.hi;
    if (accepts(lo)) return lo;
    if (!accepts(hi)) return std::numeric_limits<double>::quiet_NaN();
    while (hi - lo > 1e-13 * std::max(1.0, std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (accepts(mid) ? hi : lo) = mid;
    }
    return hi;
  }

  const ContractConfig& cfg() const { return cfg_; }

 private:
  const FirmPreference& principal_;
  const ContractConfig& cfg_;
  GaussRule hermite_;
};

double reflect(double x, Interval range) {
  const double w = range.width();
  if (w <= 0.0) return range.lo;
  double t = std::fmod(x - range.lo, 2.0 * w);
  if (t < 0.0) t += 2.0 * w;
  return range.lo + (t <= w ? t : 2.0 * w - t);
}

}  // namespace

void ContractConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::invalid_config, "sigma must be > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::invalid_config, "gamma must be > 0");
  if (!std::isfinite(reservation_utility))
    throw Error(ErrorCode::invalid_config, "reservation utility must be finite");
  for (const Interval& r : {w_fixed, w_variable, effort})
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
      throw Error(ErrorCode::invalid_config, "search bounds must be finite with lo <= hi");
  if (w_variable.lo < 0.0) throw Error(ErrorCode::invalid_config, "w_V must be >= 0");
  if (effort.lo < 0.0) throw Error(ErrorCode::invalid_config, "effort must be >= 0");
  if (hermite_nodes < 61) throw Error(ErrorCode::invalid_config, "need at least 61 Hermite nodes");
  if (annealing.iterations < 0 || annealing.proposals_per_stage < 1 ||
      !(annealing.cooling > 0.0 && annealing.cooling <= 1.0) || !(annealing.initial_temp > 0.0))
    throw Error(ErrorCode::invalid_config, "bad annealing settings");
}

double agent_expected_utility(double w_fixed, double w_variable, double effort,
                              const ContractConfig& cfg) {
  return -wage_disutility(w_fixed, w_variable, effort, cfg) - 0.5 * effort * effort;
}

double agent_foc(double w_fixed, double w_variable, double effort, const ContractConfig& cfg) {
  return cfg.gamma * w_variable * wage_disutility(w_fixed, w_variable, effort, cfg) - effort;
}

EffortSolution agent_optimal_effort(double w_fixed, double w_variable, const ContractConfig& cfg) {
  if (w_variable < 0.0) throw Error(ErrorCode::invalid_config, "w_V must be >= 0");
  const double e_lo = cfg.effort.lo, e_hi = cfg.effort.hi;
  if (w_variable == 0.0) return {std::max(e_lo, 0.0), e_lo == 0.0};
  const auto foc = [&](double e) { return agent_foc(w_fixed, w_variable, e, cfg); };
  // The FOC is convex and strictly decreasing in effort.
  if (foc(e_lo) <= 0.0) return {e_lo, foc(e_lo) == 0.0};
  if (foc(e_hi) >= 0.0) return {e_hi, foc(e_hi) == 0.0};

  double lo = e_lo, hi = e_hi, e = e_lo;
  for (int iter = 0; iter < 200; ++iter) {
    const double value = foc(e);
    if (std::abs(value) < 1e-14) break;
    (value > 0.0 ? lo : hi) = e;
    const double slope = -cfg.gamma * w_variable * cfg.gamma * w_variable *
                             wage_disutility(w_fixed, w_variable, e, cfg) -
                         1.0;
    double next = e - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == e) break;
    e = next;
  }
  return {e, true};
}

double principal_expected_utility(const FirmPreference& principal, double w_fixed,
                                  double w_variable, double effort, const ContractConfig& cfg) {
  return ContractProblem(principal, cfg).objective(w_fixed, w_variable, effort);
}

ContractResult optimal_contract(const FirmPreference& principal, const ContractConfig& cfg) {
  cfg.validate();
  const ContractProblem problem(principal, cfg);
  const Interval wf = cfg.w_fixed, wv = cfg.w_variable;

  // Feasible starting point: best of a coarse grid.
  std::optional<Candidate> current;
  constexpr int coarse = 41;
  for (int i = 0; i < coarse; ++i)
    for (int j = 0; j < coarse; ++j) {
      const double f = wf.lo + wf.width() * i / (coarse - 1);
      const double v = wv.lo + wv.width() * j / (coarse - 1);
      auto c = problem.evaluate(f, v);
      if (c && (!current || c->objective > current->objective)) current = c;
    }
  if (!current) throw Error(ErrorCode::infeasible, "no contract in bounds meets participation");

  // Simulated annealing; infeasible proposals are rejected outright.
  const AnnealingSettings& sa = cfg.annealing;
  std::mt19937_64 rng(sa.seed);
  std::normal_distribution<double> step(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Candidate best = *current;
  double temperature = sa.initial_temp;
  for (int k = 0; k < sa.iterations; ++k) {
    const double f = reflect(current->w_fixed + sa.proposal_scale * wf.width() * step(rng), wf);
    const double v = reflect(current->w_variable + sa.proposal_scale * wv.width() * step(rng), wv);
    const double u = unit(rng);
    if (auto c = problem.evaluate(f, v)) {
      const double gain = c->objective - current->objective;
      if (gain >= 0.0 || u < std::exp(gain / temperature)) {
        current = c;
        if (c->objective > best.objective) best = *c;
      }
    }
    if ((k + 1) % sa.proposals_per_stage == 0) temperature *= sa.cooling;
  }

  // Coordinate-descent polish down to a 1e-6 step.
  double step_f = sa.proposal_scale * wf.width(), step_v = sa.proposal_scale * wv.width();
  while (step_f > 1e-6 || step_v > 1e-6) {
    bool improved = false;
    for (const auto& [df, dv] : {std::pair{step_f, 0.0}, std::pair{-step_f, 0.0},
                                std::pair{0.0, step_v}, std::pair{0.0, -step_v}}) {
      const double f = std::clamp(best.w_fixed + df, wf.lo, wf.hi);
      const double v = std::clamp(best.w_variable + dv, wv.lo, wv.hi);
      if (auto c = problem.evaluate(f, v); c && c->objective > best.objective) {
        best = *c;
        improved = true;
      }
    }
    if (!improved) {
      step_f *= 0.5;
      step_v *= 0.5;
    }
  }

  // Coordinate moves stall on the participation boundary; slide along it.
  // Any increasing principal utility is decreasing in w_F, so the optimum
  // sits on that boundary or on the w_F lower bound.
  const auto on_boundary = [&](double v) -> std::optional<Candidate> {
    const double f = problem.participation_boundary(v);
    if (std::isnan(f)) return std::nullopt;
    return problem.evaluate(f, v);
  };
  {
    double a = std::max(wv.lo, best.w_variable - 0.05), b = std::min(wv.hi, best.w_variable + 0.05);
    constexpr double inv_phi = 0.6180339887498949;
    const auto score = [&](double v) {
      auto c = on_boundary(v);
      return c ? c->objective : -std::numeric_limits<double>::infinity();
    };
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = score(x1), f2 = score(x2);
    while (b - a > 1e-10) {
      if (f1 < f2) {
        a = x1, x1 = x2, f1 = f2, x2 = a + inv_phi * (b - a), f2 = score(x2);
      } else {
        b = x2, x2 = x1, f2 = f1, x1 = b - inv_phi * (b - a), f1 = score(x1);
      }
    }
    for (double v : {0.5 * (a + b), a, b, best.w_variable})
      if (auto c = on_boundary(v); c && c->objective > best.objective) best = *c;
  }

  ContractResult r;
  r.w_fixed = best.w_fixed;
  r.w_variable = best.w_variable;
  r.effort = best.effort;
  r.principal_eu = best.objective;
  r.agent_eu = agent_expected_utility(best.w_fixed, best.w_variable, best.effort, cfg);
  r.pc_slack = r.agent_eu - cfg.reservation_utility;
  r.ic_residual = std::abs(agent_foc(best.w_fixed, best.w_variable, best.effort, cfg));
  const auto near = [](double x, double edge) { return std::abs(x - edge) < 1e-9; };
  r.at_bound = near(r.w_fixed, wf.lo) || near(r.w_fixed, wf.hi) || near(r.w_variable, wv.lo) ||
               near(r.w_variable, wv.hi) || near(r.effort, cfg.effort.lo) ||
               near(r.effort, cfg.effort.hi);
  return r;
}

}  // namespace orgutil
