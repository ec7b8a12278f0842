#pragma once

#include "orgutil/utility.hpp"

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace orgutil {

struct Member {
  std::string id;
  UtilityExpr utility;
};

/// An approval probability carried as (log p, log(1 - p)) so that logit
/// stays exact when p is within rounding of 0 or 1.
struct LogScreening {
  double log_accept;
  double log_reject;

  double probability() const { return std::exp(log_accept); }
  double utility() const { return log_accept - log_reject; }
  bool saturated() const;

  static LogScreening from_utility(double u);
};

class AggregationTree;

namespace tree {
struct Leaf { Member member; };
struct And { std::vector<AggregationTree> children; };
struct Or { std::vector<AggregationTree> children; };
struct KofN { int k; std::vector<AggregationTree> children; };

using Node = std::variant<Leaf, And, Or, KofN>;
}  // namespace tree

/// AND / OR / k-of-N structure over members with independent logistic errors.
/// Construction validates arity and id uniqueness (InvalidTree).
class AggregationTree {
 public:
  static AggregationTree leaf(std::string id, UtilityExpr utility);
  static AggregationTree all_of(std::vector<AggregationTree> children);
  static AggregationTree any_of(std::vector<AggregationTree> children);
  static AggregationTree k_of_n(int k, std::vector<AggregationTree> children);

  const tree::Node& node() const { return node_; }

  /// Leaves in depth-first order.
  std::vector<Member> members() const;
  Eigen::Index dimension() const;

  LogScreening log_screening(const OutcomeRef& x) const;

 private:
  explicit AggregationTree(tree::Node node);
  void collect(std::vector<Member>& out) const;
  tree::Node node_;
};

/// Organizational approval probability at x.
double org_screening(const AggregationTree& tree, const OutcomeRef& x);

/// Tail P[at least k of n independent approvals], in log space.
LogScreening poisson_binomial_tail(const std::vector<LogScreening>& children, int k);

/// sign * LSE(alphas + betas * x); one row of `betas` per term.
struct LseForm {
  int sign = 1;
  Eigen::VectorXd alphas;
  Eigen::MatrixXd betas;

  Eigen::Index terms() const { return alphas.size(); }
  Eigen::VectorXd exponents(const OutcomeRef& x) const;
  double operator()(const OutcomeRef& x) const;
  double operator()(double x) const;
};

inline constexpr int max_closed_form_members = 20;

/// -LSE over all non-empty member subsets S of -sum_{i in S} u_i.
LseForm unanimity_closed_form(const std::vector<UtilityExpr>& members);
/// +LSE over all non-empty member subsets S of +sum_{i in S} u_i.
LseForm polyarchy_closed_form(const std::vector<UtilityExpr>& members);

struct LseBounds {
  double lse;
  double lower;
  double upper;
};

/// LSE(args) together with max(args) <= LSE <= max(args) + log n.
LseBounds lse_with_bounds(const Eigen::Ref<const Eigen::VectorXd>& args);

/// Pointwise min (unanimity) or max (polyarchy) of affine pieces.
struct Envelope {
  enum class Kind { min, max };
  Kind kind = Kind::min;
  Eigen::VectorXd alphas;
  Eigen::MatrixXd betas;

  double operator()(const OutcomeRef& x) const;
  double operator()(double x) const;
};

enum class Monotonicity { increasing, decreasing, none };

/// Strict monotonicity on a uniform grid: every consecutive difference must
/// exceed 1e-12 in magnitude with a common sign.
Monotonicity detect_monotonicity(const std::function<double(double)>& f, Interval domain,
                                 int points = 2001);

class OrgUtility {
 public:
  const AggregationTree& tree() const { return tree_; }
  const std::optional<LseForm>& closed_form() const { return closed_form_; }
  /// One entry per outcome dimension, detected along each axis with the
  /// other components at the domain midpoint.
  const std::vector<Monotonicity>& monotonicity() const { return monotonicity_; }
  Interval domain() const { return domain_; }
  Eigen::Index dimension() const { return tree_.dimension(); }

  /// logit of the organizational screening; falls back to the closed form
  /// when the screening saturates, else throws DegenerateProbability.
  double operator()(const OutcomeRef& x) const;
  double operator()(double x) const;
  double screening(const OutcomeRef& x) const;

 private:
  friend OrgUtility derive_org_utility(const AggregationTree&, Interval);
  explicit OrgUtility(AggregationTree tree) : tree_(std::move(tree)) {}

  AggregationTree tree_;
  std::optional<LseForm> closed_form_;
  std::vector<Monotonicity> monotonicity_;
  Interval domain_{-10.0, 10.0};
};

OrgUtility derive_org_utility(const AggregationTree& tree, Interval domain = {-10.0, 10.0});

/// Min/max envelope of the members and their subset sums; a single leaf
/// yields the member itself. NotAffine unless every leaf reduces to affine.
Envelope approx_org_utility(const AggregationTree& tree);

}  // namespace orgutil
