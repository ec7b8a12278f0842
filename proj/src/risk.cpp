#include "orgutil/risk.hpp"

#include "orgutil/error.hpp"
#include "orgutil/numeric.hpp"

#include <cmath>
#include <string>

namespace orgutil {

Lottery::Lottery(std::vector<Branch> branches) : branches_(std::move(branches)) {
  if (branches_.empty()) throw Error(ErrorCode::invalid_lottery, "lottery has no branches");
  double total = 0.0;
  for (const auto& b : branches_) {
    if (!std::isfinite(b.outcome)) throw Error(ErrorCode::invalid_lottery, "non-finite outcome");
    if (!(b.prob >= 0.0 && b.prob <= 1.0))
      throw Error(ErrorCode::invalid_lottery, "branch probability outside [0, 1]");
    total += b.prob;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorCode::invalid_lottery, "probabilities sum to " + std::to_string(total));
}

Lottery Lottery::binary(double win, double loss, double p) {
  return Lottery({{win, p}, {loss, 1.0 - p}});
}

EvaluableUtility::EvaluableUtility(UtilityExpr u, Interval domain) : domain_(domain) {
  if (u.dimension() > 1)
    throw Error(ErrorCode::dimension_mismatch, "lottery evaluation needs a 1-D utility");
  f_ = [u = std::move(u)](double x) { return u(x); };
}

EvaluableUtility::EvaluableUtility(OrgUtility u, Interval domain) : domain_(domain) {
  if (u.dimension() > 1)
    throw Error(ErrorCode::dimension_mismatch, "lottery evaluation needs a 1-D utility");
  f_ = [u = std::move(u)](double x) { return u(x); };
}

double expected_utility(const EvaluableUtility& u, const Lottery& lottery) {
  double eu = 0.0;
  for (const auto& b : lottery.branches()) {
    if (!u.domain().contains(b.outcome))
      throw Error(ErrorCode::domain_exceeded,
                  "outcome " + std::to_string(b.outcome) + " outside the utility's domain");
    eu += b.prob * u(b.outcome);
  }
  return eu;
}

double certainty_equivalent(const EvaluableUtility& u, const Lottery& lottery) {
  const double target = expected_utility(u, lottery);
  const double center = 0.5 * (u.domain().lo + u.domain().hi);
  const double half = 0.5 * u.domain().width();

  for (double factor : {1.0, 2.0, 4.0}) {
    const Interval bracket{center - factor * half, center + factor * half};
    if (detect_monotonicity([&](double x) { return u(x); }, bracket) != Monotonicity::increasing)
      throw Error(ErrorCode::non_monotonic_utility,
                  "certainty equivalent needs a strictly increasing utility");
    double lo = bracket.lo, hi = bracket.hi;
    if (target < u(lo) || target > u(hi)) continue;

    double best = lo, best_residual = std::abs(u(lo) - target);
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double value = u(mid);
      const double residual = std::abs(value - target);
      if (residual < best_residual) best = mid, best_residual = residual;
      if (value < target)
        lo = mid;
      else
        hi = mid;
      if (hi - lo < 1e-9 && best_residual < 1e-9) break;
    }
    return best;
  }
  throw Error(ErrorCode::range_exceeded,
              "expected utility " + std::to_string(target) + " outside the utility's range");
}

double min_winning_probability(const EvaluableUtility& u, double win, double loss) {
  const double u_win = u(win), u_loss = u(loss);
  if (u_win <= 0.0)
    throw Error(ErrorCode::bet_never_accepted, "u(win) <= 0, no winning probability suffices");
  if (u_loss >= 0.0)
    throw Error(ErrorCode::bet_always_accepted, "u(loss) >= 0, any winning probability suffices");
  return -u_loss / (u_win - u_loss);
}

double acceptance_probability(const EvaluableUtility& u, const Lottery& lottery) {
  return logistic(expected_utility(u, lottery));
}

}  // namespace orgutil
