#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

// Scalar helpers for moving between utility space and probability space.
// Everything works on log-probabilities where precision matters.

namespace orgutil {

template <typename Scalar>
Scalar softplus(Scalar z) {
  using std::exp;
  using std::log1p;
  // log(1 + e^z) without overflow.
  return z > Scalar(0) ? z + log1p(exp(-z)) : log1p(exp(z));
}

/// Logistic(0,1) CDF, the probability that u + eps > 0.
template <typename Scalar>
Scalar logistic(Scalar z) {
  using std::exp;
  if (z >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-z));
  const Scalar e = exp(z);
  return e / (Scalar(1) + e);
}

/// log(logistic(z)).
template <typename Scalar>
Scalar log_logistic(Scalar z) {
  return -softplus(-z);
}

template <typename Scalar>
Scalar logit(Scalar p) {
  using std::log;
  using std::log1p;
  return log(p) - log1p(-p);
}

/// log(1 - e^l) for l <= 0; returns -inf at l == 0.
template <typename Scalar>
Scalar log1mexp(Scalar l) {
  using std::exp;
  using std::expm1;
  using std::log;
  using std::log1p;
  if (l >= Scalar(0)) return -std::numeric_limits<Scalar>::infinity();
  return l > Scalar(-0.6931471805599453) ? log(-expm1(l)) : log1p(-exp(l));
}

template <typename Scalar>
Scalar log_add_exp(Scalar a, Scalar b) {
  using std::exp;
  using std::log1p;
  constexpr Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  return a > b ? a + log1p(exp(b - a)) : b + log1p(exp(a - b));
}

/// Max-shifted log(sum(exp(args))). Empty input yields -inf.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& args) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  if (args.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar m = args.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + log((args.derived().array() - m).exp().sum());
}

}  // namespace orgutil
