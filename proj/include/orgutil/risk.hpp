#pragma once

#include "orgutil/aggregation.hpp"
#include "orgutil/utility.hpp"

#include <functional>
#include <vector>

namespace orgutil {

struct Branch {
  double outcome;
  double prob;
};

/// Finite lottery; probabilities must sum to 1 within 1e-12.
class Lottery {
 public:
  explicit Lottery(std::vector<Branch> branches);

  /// A bet paying `win` with probability p and `loss` otherwise.
  static Lottery binary(double win, double loss, double p);
  static Lottery sure(double outcome) { return Lottery({{outcome, 1.0}}); }

  const std::vector<Branch>& branches() const { return branches_; }

 private:
  std::vector<Branch> branches_;
};

/// A one-dimensional utility (member or organizational) with the interval
/// used for domain checks and certainty-equivalent root finding.
class EvaluableUtility {
 public:
  static constexpr Interval default_domain{-50.0, 50.0};

  EvaluableUtility(UtilityExpr u, Interval domain = default_domain);
  EvaluableUtility(OrgUtility u, Interval domain = default_domain);

  double operator()(double x) const { return f_(x); }
  Interval domain() const { return domain_; }

 private:
  std::function<double(double)> f_;
  Interval domain_;
};

double expected_utility(const EvaluableUtility& u, const Lottery& lottery);

/// Sure amount with the lottery's expected utility. Requires u strictly
/// increasing; the bracket grows up to 4x the domain before RangeExceeded.
double certainty_equivalent(const EvaluableUtility& u, const Lottery& lottery);

/// p with p u(win) + (1 - p) u(loss) = 0.
double min_winning_probability(const EvaluableUtility& u, double win, double loss);

/// Probability that EU + eps > 0 under Logistic(0,1) noise.
double acceptance_probability(const EvaluableUtility& u, const Lottery& lottery);

}  // namespace orgutil
