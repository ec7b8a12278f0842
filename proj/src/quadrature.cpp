#include "orgutil/quadrature.hpp"

#include "orgutil/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace orgutil {
namespace {

// Eigenvalues of the symmetric tridiagonal Jacobi matrix are the nodes.
Eigen::VectorXd jacobi_nodes(const Eigen::VectorXd& off_diagonal, int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diagonal[k];
    jacobi(k + 1, k) = off_diagonal[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

void check_order(int n) {
  if (n < 1) throw Error(ErrorCode::invalid_config, "quadrature order must be positive");
}

}  // namespace

GaussRule gauss_legendre(int n) {
  check_order(n);
  Eigen::VectorXd beta(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) beta[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  GaussRule rule{jacobi_nodes(beta, n), Eigen::VectorXd(n)};

  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    double derivative = 1.0;
    for (int iter = 0; iter < 3; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      derivative = n * (x * p1 - p0) / (x * x - 1.0);
      x -= p1 / derivative;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
  }
  return rule;
}

GaussRule gauss_hermite(int n) {
  check_order(n);
  Eigen::VectorXd beta(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) beta[k - 1] = std::sqrt(k / 2.0);
  GaussRule rule{jacobi_nodes(beta, n), Eigen::VectorXd(n)};

  const double pi_m4 = std::pow(std::numbers::pi, -0.25);
  for (int i = 0; i < n; ++i) {
    double t = rule.nodes[i];
    double derivative = 1.0;
    for (int iter = 0; iter < 3; ++iter) {
      // Orthonormal Hermite recurrence.
      double p1 = pi_m4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = t * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      derivative = std::sqrt(2.0 * n) * p2;
      t -= p1 / derivative;
    }
    rule.nodes[i] = t;
    rule.weights[i] = 2.0 / (derivative * derivative);
  }
  return rule;
}

double integrate_composite(const std::function<double(double)>& f, double lo, double hi,
                           const GaussRule& rule, int panels) {
  if (!(hi > lo) || panels < 1) return 0.0;
  const double width = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = lo + (p + 0.5) * width;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * f(mid + 0.5 * width * rule.nodes[i]);
    total += 0.5 * width * acc;
  }
  return total;
}

double integrate_trapezoid(const std::function<double(double)>& f, double lo, double hi,
                           int min_nodes, double rel_tol) {
  if (!(hi > lo)) return 0.0;
  int intervals = std::max(min_nodes - 1, 1);
  double h = (hi - lo) / intervals;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < intervals; ++i) sum += f(lo + i * h);
  double estimate = sum * h;

  // Each doubling reuses the previous nodes and adds the midpoints.
  for (int level = 0; level < 12; ++level) {
    double mids = 0.0;
    for (int i = 0; i < intervals; ++i) mids += f(lo + (i + 0.5) * h);
    sum += mids;
    intervals *= 2;
    h *= 0.5;
    const double refined = sum * h;
    const double change = std::abs(refined - estimate);
    estimate = refined;
    if (change <= rel_tol * std::abs(refined) || change < 1e-15) break;
  }
  return estimate;
}

}  // namespace orgutil
