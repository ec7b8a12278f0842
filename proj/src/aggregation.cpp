#include "orgutil/aggregation.hpp"

#include "orgutil/error.hpp"
#include "orgutil/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace orgutil {
namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class PureKind { all, any };

// Members of a tree made only of And nodes (or only of Or nodes), flattened.
bool flatten_pure(const AggregationTree& t, PureKind kind, std::vector<Member>& out) {
  return std::visit(
      overloaded{
          [&](const tree::Leaf& leaf) {
            out.push_back(leaf.member);
            return true;
          },
          [&](const tree::And& n) {
            if (kind != PureKind::all) return false;
            for (const auto& c : n.children)
              if (!flatten_pure(c, kind, out)) return false;
            return true;
          },
          [&](const tree::Or& n) {
            if (kind != PureKind::any) return false;
            for (const auto& c : n.children)
              if (!flatten_pure(c, kind, out)) return false;
            return true;
          },
          [](const tree::KofN&) { return false; },
      },
      t.node());
}

std::optional<std::pair<PureKind, std::vector<Member>>> pure_structure(const AggregationTree& t) {
  for (PureKind kind : {PureKind::all, PureKind::any}) {
    std::vector<Member> members;
    if (std::holds_alternative<tree::Leaf>(t.node())) break;
    if (flatten_pure(t, kind, members)) return std::make_pair(kind, std::move(members));
  }
  return std::nullopt;
}

std::vector<AffineForm> affine_members(const std::vector<UtilityExpr>& members) {
  std::vector<AffineForm> forms;
  Eigen::Index dim = 0;
  for (const auto& m : members) {
    auto f = m.affine_form();
    if (!f) throw Error(ErrorCode::not_affine, "member utility does not reduce to affine");
    dim = std::max(dim, f->beta.size());
    forms.push_back(std::move(*f));
  }
  for (auto& f : forms)
    if (f.beta.size() < dim) f.beta.conservativeResizeLike(Eigen::VectorXd::Zero(dim));
  return forms;
}

// Row s-1 holds the sum of the members in subset mask s.
void subset_sums(const std::vector<AffineForm>& forms, Eigen::VectorXd& alphas,
                 Eigen::MatrixXd& betas) {
  const int n = static_cast<int>(forms.size());
  const Eigen::Index dim = forms.front().beta.size();
  const Eigen::Index terms = (Eigen::Index{1} << n) - 1;
  alphas.setZero(terms);
  betas.setZero(terms, dim);
  for (Eigen::Index mask = 1; mask <= terms; ++mask) {
    for (int i = 0; i < n; ++i) {
      if (!(mask & (Eigen::Index{1} << i))) continue;
      alphas[mask - 1] += forms[i].alpha;
      betas.row(mask - 1) += forms[i].beta.transpose();
    }
  }
}

LseForm closed_form(const std::vector<UtilityExpr>& members, int sign) {
  if (members.size() < 2)
    throw Error(ErrorCode::arity, "closed form needs at least two members");
  if (members.size() > static_cast<std::size_t>(max_closed_form_members))
    throw Error(ErrorCode::arity, "closed form limited to " +
                                      std::to_string(max_closed_form_members) + " members");
  LseForm form;
  form.sign = sign;
  subset_sums(affine_members(members), form.alphas, form.betas);
  if (sign < 0) {
    form.alphas = -form.alphas;
    form.betas = -form.betas;
  }
  return form;
}

std::vector<UtilityExpr> utilities(const std::vector<Member>& members) {
  std::vector<UtilityExpr> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.utility);
  return out;
}

}  // namespace

bool LogScreening::saturated() const {
  return !(log_accept > neg_inf && log_reject > neg_inf) || std::isnan(log_accept) ||
         std::isnan(log_reject);
}

LogScreening LogScreening::from_utility(double u) {
  return {log_logistic(u), log_logistic(-u)};
}

AggregationTree::AggregationTree(tree::Node node) : node_(std::move(node)) {
  std::vector<Member> all;
  collect(all);
  std::set<std::string> ids;
  for (const auto& m : all)
    if (!ids.insert(m.id).second)
      throw Error(ErrorCode::invalid_tree, "duplicate member id '" + m.id + "'");
}

AggregationTree AggregationTree::leaf(std::string id, UtilityExpr utility) {
  return AggregationTree(tree::Leaf{Member{std::move(id), std::move(utility)}});
}

AggregationTree AggregationTree::all_of(std::vector<AggregationTree> children) {
  if (children.size() < 2) throw Error(ErrorCode::invalid_tree, "and needs at least two children");
  return AggregationTree(tree::And{std::move(children)});
}

AggregationTree AggregationTree::any_of(std::vector<AggregationTree> children) {
  if (children.size() < 2) throw Error(ErrorCode::invalid_tree, "or needs at least two children");
  return AggregationTree(tree::Or{std::move(children)});
}

AggregationTree AggregationTree::k_of_n(int k, std::vector<AggregationTree> children) {
  if (children.empty()) throw Error(ErrorCode::invalid_tree, "kofn needs at least one child");
  if (k < 1 || k > static_cast<int>(children.size()))
    throw Error(ErrorCode::invalid_tree, "kofn requires 1 <= k <= number of children");
  return AggregationTree(tree::KofN{k, std::move(children)});
}

void AggregationTree::collect(std::vector<Member>& out) const {
  std::visit(overloaded{
                 [&](const tree::Leaf& leaf) { out.push_back(leaf.member); },
                 [&](const auto& n) {
                   for (const auto& c : n.children) c.collect(out);
                 },
             },
             node_);
}

std::vector<Member> AggregationTree::members() const {
  std::vector<Member> out;
  collect(out);
  return out;
}

Eigen::Index AggregationTree::dimension() const {
  Eigen::Index d = 0;
  for (const auto& m : members()) d = std::max(d, m.utility.dimension());
  return d;
}

LogScreening AggregationTree::log_screening(const OutcomeRef& x) const {
  return std::visit(
      overloaded{
          [&](const tree::Leaf& leaf) {
            return LogScreening::from_utility(leaf.member.utility(x));
          },
          [&](const tree::And& n) {
            double log_accept = 0.0;
            for (const auto& c : n.children) log_accept += c.log_screening(x).log_accept;
            return LogScreening{log_accept, log1mexp(log_accept)};
          },
          [&](const tree::Or& n) {
            double log_reject = 0.0;
            for (const auto& c : n.children) log_reject += c.log_screening(x).log_reject;
            return LogScreening{log1mexp(log_reject), log_reject};
          },
          [&](const tree::KofN& n) {
            std::vector<LogScreening> children;
            children.reserve(n.children.size());
            for (const auto& c : n.children) children.push_back(c.log_screening(x));
            return poisson_binomial_tail(children, n.k);
          },
      },
      node_);
}

LogScreening poisson_binomial_tail(const std::vector<LogScreening>& children, int k) {
  const int n = static_cast<int>(children.size());
  if (k < 0 || k > n) throw Error(ErrorCode::invalid_tree, "k outside [0, n]");
  // exactly[j] = log P[j approvals among the children seen so far]
  std::vector<double> exactly(n + 1, neg_inf);
  exactly[0] = 0.0;
  for (int m = 0; m < n; ++m) {
    for (int j = m + 1; j >= 0; --j) {
      const double stay = exactly[j] + children[m].log_reject;
      const double step = j > 0 ? exactly[j - 1] + children[m].log_accept : neg_inf;
      exactly[j] = log_add_exp(stay, step);
    }
  }
  double log_accept = neg_inf, log_reject = neg_inf;
  for (int j = 0; j <= n; ++j) {
    if (j >= k)
      log_accept = log_add_exp(log_accept, exactly[j]);
    else
      log_reject = log_add_exp(log_reject, exactly[j]);
  }
  return {log_accept, log_reject};
}

double org_screening(const AggregationTree& tree, const OutcomeRef& x) {
  if (x.size() < tree.dimension())
    throw Error(ErrorCode::dimension_mismatch, "outcome shorter than the tree's utilities");
  if (const auto* leaf = std::get_if<tree::Leaf>(&tree.node()))
    return screening_prob(leaf->member.utility, x);
  return tree.log_screening(x).probability();
}

Eigen::VectorXd LseForm::exponents(const OutcomeRef& x) const {
  if (x.size() < betas.cols())
    throw Error(ErrorCode::dimension_mismatch, "outcome shorter than the closed form");
  return alphas + betas * x.head(betas.cols());
}

double LseForm::operator()(const OutcomeRef& x) const { return sign * log_sum_exp(exponents(x)); }

double LseForm::operator()(double x) const {
  const Eigen::Matrix<double, 1, 1> v(x);
  return (*this)(v);
}

LseForm unanimity_closed_form(const std::vector<UtilityExpr>& members) {
  return closed_form(members, -1);
}

LseForm polyarchy_closed_form(const std::vector<UtilityExpr>& members) {
  return closed_form(members, +1);
}

LseBounds lse_with_bounds(const Eigen::Ref<const Eigen::VectorXd>& args) {
  if (args.size() == 0) throw Error(ErrorCode::empty_input, "LSE of no arguments");
  if (!args.allFinite()) throw Error(ErrorCode::invalid_config, "LSE arguments must be finite");
  const double m = args.maxCoeff();
  return {log_sum_exp(args), m, m + std::log(static_cast<double>(args.size()))};
}

double Envelope::operator()(const OutcomeRef& x) const {
  if (x.size() < betas.cols())
    throw Error(ErrorCode::dimension_mismatch, "outcome shorter than the envelope");
  const Eigen::VectorXd values = alphas + betas * x.head(betas.cols());
  return kind == Kind::min ? values.minCoeff() : values.maxCoeff();
}

double Envelope::operator()(double x) const {
  const Eigen::Matrix<double, 1, 1> v(x);
  return (*this)(v);
}

Monotonicity detect_monotonicity(const std::function<double(double)>& f, Interval domain,
                                 int points) {
  const double h = domain.width() / (points - 1);
  bool up = true, down = true;
  double prev = f(domain.lo);
  for (int i = 1; i < points && (up || down); ++i) {
    const double cur = f(i + 1 == points ? domain.hi : domain.lo + i * h);
    const double diff = cur - prev;
    if (!(diff > 1e-12)) up = false;
    if (!(diff < -1e-12)) down = false;
    prev = cur;
  }
  if (up) return Monotonicity::increasing;
  if (down) return Monotonicity::decreasing;
  return Monotonicity::none;
}

double OrgUtility::operator()(const OutcomeRef& x) const {
  if (x.size() < dimension())
    throw Error(ErrorCode::dimension_mismatch, "outcome shorter than the tree's utilities");
  const LogScreening s = tree_.log_screening(x);
  if (!s.saturated()) return s.utility();
  if (closed_form_) return (*closed_form_)(x);
  std::ostringstream msg;
  msg << "organizational screening saturates at x = [" << x.transpose() << "]";
  throw Error(ErrorCode::degenerate_probability, msg.str());
}

double OrgUtility::operator()(double x) const {
  const Eigen::Matrix<double, 1, 1> v(x);
  return (*this)(v);
}

double OrgUtility::screening(const OutcomeRef& x) const { return org_screening(tree_, x); }

OrgUtility derive_org_utility(const AggregationTree& tree, Interval domain) {
  if (!(domain.lo < domain.hi))
    throw Error(ErrorCode::bad_domain, "derivation domain must have lo < hi");
  OrgUtility org(tree);
  org.domain_ = domain;

  if (auto pure = pure_structure(tree);
      pure && pure->second.size() <= static_cast<std::size_t>(max_closed_form_members)) {
    const auto members = utilities(pure->second);
    const bool affine = std::all_of(members.begin(), members.end(),
                                    [](const UtilityExpr& u) { return u.affine_form().has_value(); });
    if (affine)
      org.closed_form_ = pure->first == PureKind::all ? unanimity_closed_form(members)
                                                      : polyarchy_closed_form(members);
  }

  const Eigen::Index dim = tree.dimension();
  const double mid = 0.5 * (domain.lo + domain.hi);
  for (Eigen::Index d = 0; d < dim; ++d) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(dim, mid);
    org.monotonicity_.push_back(detect_monotonicity(
        [&](double t) {
          x[d] = t;
          return org(x);
        },
        domain));
  }
  return org;
}

Envelope approx_org_utility(const AggregationTree& tree) {
  Envelope env;
  if (const auto* leaf = std::get_if<tree::Leaf>(&tree.node())) {
    const auto forms = affine_members({leaf->member.utility});
    env.alphas = Eigen::VectorXd::Constant(1, forms[0].alpha);
    env.betas = forms[0].beta.transpose();
    return env;
  }
  auto pure = pure_structure(tree);
  if (!pure) throw Error(ErrorCode::invalid_tree, "approximation needs a pure and/or tree");
  const auto members = utilities(pure->second);
  if (members.size() > static_cast<std::size_t>(max_closed_form_members))
    throw Error(ErrorCode::arity, "too many members for the subset expansion");
  env.kind = pure->first == PureKind::all ? Envelope::Kind::min : Envelope::Kind::max;
  subset_sums(affine_members(members), env.alphas, env.betas);
  return env;
}

}  // namespace orgutil
