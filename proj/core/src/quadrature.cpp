#include "vkmorley/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace vkm {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
// orthogonal-polynomial recurrence, weights come from the first eigenvector
// components scaled by the zeroth moment.
void golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0,
                  std::vector<double>& x, std::vector<double>& w) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = diag[i];
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw std::runtime_error("quadrature: eigensolver failed");
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()[i];
    double v = es.eigenvectors()(0, i);
    w[i] = mu0 * v * v;
  }
}

// Gauss-Legendre on [-1,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(diag, off, 2.0, x, w);
}

// Gauss-Jacobi on [-1,1] with weight (1-x)^alpha, beta = 0.
void gauss_jacobi_a1(int n, std::vector<double>& x, std::vector<double>& w) {
  const double alpha = 1.0, beta = 0.0;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) {
    double den = (2.0 * k + alpha + beta) * (2.0 * k + alpha + beta + 2.0);
    diag[k] = (k == 0) ? (beta - alpha) / (alpha + beta + 2.0)
                       : (beta * beta - alpha * alpha) / den;
  }
  for (int k = 1; k < n; ++k) {
    double num = 4.0 * k * (k + alpha) * (k + beta) * (k + alpha + beta);
    double den = std::pow(2.0 * k + alpha + beta, 2) * (2.0 * k + alpha + beta + 1.0) *
                 (2.0 * k + alpha + beta - 1.0);
    off[k - 1] = std::sqrt(num / den);
  }
  const double mu0 = 2.0;  // int_{-1}^{1} (1-x) dx
  golub_welsch(diag, off, mu0, x, w);
}

QuadratureRule make_rule(int degree) {
  QuadratureRule rule;
  if (degree <= 2) {
    // Interior three-point rule, exact for quadratics.
    rule.degree = 2;
    rule.nodes = {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0},
                  {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0},
                  {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0}};
    return rule;
  }
  // Conical product of Gauss-Legendre and Gauss-Jacobi(1,0): n x n nodes are
  // exact for total degree 2n-1, all strictly interior with positive weights.
  const int n = (degree + 2) / 2;
  std::vector<double> xg, wg, xj, wj;
  gauss_legendre(n, xg, wg);
  gauss_jacobi_a1(n, xj, wj);
  rule.degree = 2 * n - 1;
  rule.nodes.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    double u = 0.5 * (xj[j] + 1.0);        // first barycentric-ish coordinate
    double wu = wj[j] / 4.0;               // (1/2)^2: interval map + weight map
    for (int i = 0; i < n; ++i) {
      double v = 0.5 * (xg[i] + 1.0);
      double wv = wg[i] / 2.0;
      double x = u;
      double y = v * (1.0 - u);
      QuadratureRule::Node node;
      node.l1 = x;
      node.l2 = y;
      node.l0 = 1.0 - x - y;
      node.w = 2.0 * wu * wv;  // reference-triangle area 1/2 -> weights sum to 1
      rule.nodes.push_back(node);
    }
  }
  return rule;
}

}  // namespace

const QuadratureRule& QuadratureRule::triangle(int degree) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, make_rule(degree)).first;
  return it->second;
}

void gauss_legendre_01(int n, std::vector<double>& x, std::vector<double>& w) {
  gauss_legendre(n, x, w);
  for (int i = 0; i < n; ++i) {
    x[i] = 0.5 * (x[i] + 1.0);
    w[i] *= 0.5;
  }
}

}  // namespace vkm
