#pragma once

#include <Eigen/Core>

#include <functional>

namespace orgutil {

/// Nodes and weights of a Gaussian rule.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule on [-1, 1] (Golub-Welsch, Newton-polished).
GaussRule gauss_legendre(int n);

/// Gauss-Hermite rule for the weight exp(-t^2) on the real line.
GaussRule gauss_hermite(int n);

/// Quadrature of f over [lo, hi] split into equal panels, each using `rule`
/// (a Gauss-Legendre rule on [-1, 1]).
double integrate_composite(const std::function<double(double)>& f, double lo, double hi,
                           const GaussRule& rule, int panels);

/// E[f(X)] for X ~ Normal(mean, sd^2) using a Gauss-Hermite rule.
template <typename F>
double normal_expectation(F&& f, double mean, double sd, const GaussRule& hermite) {
  constexpr double sqrt2 = 1.4142135623730950488;
  constexpr double inv_sqrt_pi = 0.56418958354775628695;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < hermite.nodes.size(); ++i)
    acc += hermite.weights[i] * f(mean + sqrt2 * sd * hermite.nodes[i]);
  return acc * inv_sqrt_pi;
}

/// Trapezoid rule on [lo, hi], refined by panel doubling from `min_nodes`
/// until successive estimates agree to `rel_tol`.
double integrate_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                           int min_nodes = 2001, double rel_tol = 1e-6);

}  // namespace orgutil
