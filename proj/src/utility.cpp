#include "orgutil/utility.hpp"

#include "orgutil/error.hpp"
#include "orgutil/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace orgutil {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double evaluate(const expr::Node& node, const OutcomeRef& x) {
  return std::visit(
      overloaded{
          [](const expr::Constant& c) { return c.value; },
          [&](const expr::Var& v) { return x[v.index]; },
          [&](const expr::Affine& a) { return a.form(x); },
          [&](const expr::ExpCara& c) { return c.scale * -std::expm1(-x[0] / c.rate); },
          [&](const expr::Sum& s) {
            double acc = 0.0;
            for (const auto& child : s.children) acc += evaluate(child.node(), x);
            return acc;
          },
          [&](const expr::Scale& s) { return s.factor * evaluate(s.child->node(), x); },
          [&](const expr::Negate& n) { return -evaluate(n.child->node(), x); },
      },
      node);
}

}  // namespace

double AffineForm::operator()(const OutcomeRef& x) const {
  return alpha + beta.dot(x.head(beta.size()));
}

UtilityExpr::UtilityExpr(expr::Node node)
    : node_(std::make_shared<const expr::Node>(std::move(node))) {}

UtilityExpr UtilityExpr::constant(double value) { return UtilityExpr(expr::Constant{value}); }

UtilityExpr UtilityExpr::var(Eigen::Index index) {
  if (index < 0) throw Error(ErrorCode::dimension_mismatch, "negative variable index");
  return UtilityExpr(expr::Var{index});
}

UtilityExpr UtilityExpr::affine(double alpha, Eigen::VectorXd beta) {
  return UtilityExpr(expr::Affine{AffineForm{alpha, std::move(beta)}});
}

UtilityExpr UtilityExpr::affine(double alpha, std::initializer_list<double> beta) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(beta.size()));
  std::copy(beta.begin(), beta.end(), b.data());
  return affine(alpha, std::move(b));
}

UtilityExpr UtilityExpr::exp_cara(double scale, double rate) {
  if (rate == 0.0 || !std::isfinite(rate) || !std::isfinite(scale))
    throw Error(ErrorCode::invalid_config, "exp_cara needs finite scale and nonzero rate");
  return UtilityExpr(expr::ExpCara{scale, rate});
}

UtilityExpr UtilityExpr::sum(std::vector<UtilityExpr> children) {
  return UtilityExpr(expr::Sum{std::move(children)});
}

UtilityExpr UtilityExpr::scaled(double factor, UtilityExpr child) {
  return UtilityExpr(expr::Scale{factor, std::make_shared<const UtilityExpr>(std::move(child))});
}

UtilityExpr UtilityExpr::negate(UtilityExpr child) {
  return UtilityExpr(expr::Negate{std::make_shared<const UtilityExpr>(std::move(child))});
}

Eigen::Index UtilityExpr::dimension() const {
  return std::visit(
      overloaded{
          [](const expr::Constant&) -> Eigen::Index { return 0; },
          [](const expr::Var& v) -> Eigen::Index { return v.index + 1; },
          [](const expr::Affine& a) -> Eigen::Index { return a.form.beta.size(); },
          [](const expr::ExpCara&) -> Eigen::Index { return 1; },
          [](const expr::Sum& s) -> Eigen::Index {
            Eigen::Index d = 0;
            for (const auto& child : s.children) d = std::max(d, child.dimension());
            return d;
          },
          [](const expr::Scale& s) -> Eigen::Index { return s.child->dimension(); },
          [](const expr::Negate& n) -> Eigen::Index { return n.child->dimension(); },
      },
      *node_);
}

double UtilityExpr::operator()(const OutcomeRef& x) const {
  if (x.size() < dimension())
    throw Error(ErrorCode::dimension_mismatch,
                "outcome has " + std::to_string(x.size()) + " components, utility reads " +
                    std::to_string(dimension()));
  return evaluate(*node_, x);
}

double UtilityExpr::operator()(double x) const {
  const Eigen::Matrix<double, 1, 1> v(x);
  return (*this)(v);
}

std::optional<AffineForm> UtilityExpr::affine_form() const {
  const auto widen = [](AffineForm f, Eigen::Index d) {
    if (f.beta.size() < d) f.beta.conservativeResizeLike(Eigen::VectorXd::Zero(d));
    return f;
  };
  return std::visit(
      overloaded{
          [](const expr::Constant& c) -> std::optional<AffineForm> {
            return AffineForm{c.value, Eigen::VectorXd()};
          },
          [](const expr::Var& v) -> std::optional<AffineForm> {
            Eigen::VectorXd beta = Eigen::VectorXd::Zero(v.index + 1);
            beta[v.index] = 1.0;
            return AffineForm{0.0, beta};
          },
          [](const expr::Affine& a) -> std::optional<AffineForm> { return a.form; },
          [](const expr::ExpCara&) -> std::optional<AffineForm> { return std::nullopt; },
          [&](const expr::Sum& s) -> std::optional<AffineForm> {
            AffineForm acc{0.0, Eigen::VectorXd()};
            for (const auto& child : s.children) {
              auto f = child.affine_form();
              if (!f) return std::nullopt;
              const Eigen::Index d = std::max(acc.beta.size(), f->beta.size());
              acc = widen(acc, d);
              *f = widen(*f, d);
              acc.alpha += f->alpha;
              acc.beta += f->beta;
            }
            return acc;
          },
          [](const expr::Scale& s) -> std::optional<AffineForm> {
            auto f = s.child->affine_form();
            if (!f) return std::nullopt;
            return AffineForm{s.factor * f->alpha, s.factor * f->beta};
          },
          [](const expr::Negate& n) -> std::optional<AffineForm> {
            auto f = n.child->affine_form();
            if (!f) return std::nullopt;
            return AffineForm{-f->alpha, -f->beta};
          },
      },
      *node_);
}

UtilityExpr operator+(const UtilityExpr& a, const UtilityExpr& b) {
  return UtilityExpr::sum({a, b});
}
UtilityExpr operator-(const UtilityExpr& a) { return UtilityExpr::negate(a); }
UtilityExpr operator-(const UtilityExpr& a, const UtilityExpr& b) { return a + (-b); }
UtilityExpr operator*(double factor, const UtilityExpr& a) {
  return UtilityExpr::scaled(factor, a);
}

double eval_utility(const UtilityExpr& u, const OutcomeRef& x) { return u(x); }

double screening_prob(const UtilityExpr& u, const OutcomeRef& x) { return logistic(u(x)); }

double utility_from_prob(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::degenerate_probability,
                "probability " + std::to_string(p) + " has no finite utility");
  return logit(p);
}

ErrorRates error_rates(const UtilityExpr& u, Interval domain,
                       std::optional<std::function<double(double)>> quality_density) {
  if (u.dimension() > 1)
    throw Error(ErrorCode::dimension_mismatch, "error rates need a one-dimensional utility");
  if (!(domain.lo < 0.0 && domain.hi > 0.0) || !std::isfinite(domain.lo) ||
      !std::isfinite(domain.hi))
    throw Error(ErrorCode::bad_domain, "domain must be a finite interval straddling 0");

  const double uniform = 1.0 / domain.width();
  const auto density = [&](double x) {
    return quality_density ? (*quality_density)(x) : uniform;
  };
  // 1 - s(x) = logistic(-u(x)) keeps precision in the tails.
  const double omission = integrate_trapezoid(
      [&](double x) { return logistic(-u(x)) * density(x); }, 0.0, domain.hi);
  const double commission = integrate_trapezoid(
      [&](double x) { return logistic(u(x)) * density(x); }, domain.lo, 0.0);
  return {omission, commission};
}

}  // namespace orgutil
