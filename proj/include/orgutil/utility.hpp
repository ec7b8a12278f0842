#pragma once

#include "orgutil/numeric.hpp"

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace orgutil {

using Outcome = Eigen::VectorXd;
using OutcomeRef = Eigen::Ref<const Eigen::VectorXd>;

/// alpha + beta . x, the form closed-form aggregation works with.
struct AffineForm {
  double alpha = 0.0;
  Eigen::VectorXd beta;

  double operator()(const OutcomeRef& x) const;
};

class UtilityExpr;

namespace expr {
struct Constant { double value; };
struct Var { Eigen::Index index; };
struct Affine { AffineForm form; };
/// scale * (1 - exp(-x0 / rate)), constant absolute risk aversion in x0.
struct ExpCara { double scale; double rate; };
struct Sum { std::vector<UtilityExpr> children; };
struct Scale { double factor; std::shared_ptr<const UtilityExpr> child; };
struct Negate { std::shared_ptr<const UtilityExpr> child; };

using Node = std::variant<Constant, Var, Affine, ExpCara, Sum, Scale, Negate>;
}  // namespace expr

/// Deterministic utility component u(x) of a random utility u(x) + eps,
/// eps ~ Logistic(0,1). Immutable; copies share structure.
class UtilityExpr {
 public:
  static UtilityExpr constant(double value);
  static UtilityExpr var(Eigen::Index index);
  static UtilityExpr affine(double alpha, Eigen::VectorXd beta);
  static UtilityExpr affine(double alpha, std::initializer_list<double> beta);
  static UtilityExpr exp_cara(double scale, double rate);
  static UtilityExpr sum(std::vector<UtilityExpr> children);
  static UtilityExpr scaled(double factor, UtilityExpr child);
  static UtilityExpr negate(UtilityExpr child);

  const expr::Node& node() const { return *node_; }

  /// Number of outcome components the expression reads.
  Eigen::Index dimension() const;

  /// Throws DimensionMismatch if x is shorter than dimension().
  double operator()(const OutcomeRef& x) const;
  double operator()(double x) const;

  /// Symbolic reduction to alpha + beta . x when every node is affine.
  std::optional<AffineForm> affine_form() const;

 private:
  explicit UtilityExpr(expr::Node node);
  std::shared_ptr<const expr::Node> node_;
};

UtilityExpr operator+(const UtilityExpr& a, const UtilityExpr& b);
UtilityExpr operator-(const UtilityExpr& a);
UtilityExpr operator-(const UtilityExpr& a, const UtilityExpr& b);
UtilityExpr operator*(double factor, const UtilityExpr& a);

double eval_utility(const UtilityExpr& u, const OutcomeRef& x);

/// P[u(x) + eps > 0].
double screening_prob(const UtilityExpr& u, const OutcomeRef& x);

/// logit(p); DegenerateProbability unless 0 < p < 1.
double utility_from_prob(double p);

struct Interval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct ErrorRates {
  double omission;    // rejecting x > 0
  double commission;  // accepting x < 0
};

/// Omission and commission probabilities of a 1-D evaluator over `domain`.
/// The density over project quality defaults to uniform on the domain.
ErrorRates error_rates(const UtilityExpr& u, Interval domain,
                       std::optional<std::function<double(double)>> quality_density = std::nullopt);

}  // namespace orgutil
