#include "sbpglue/poly.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace sbpglue {

std::vector<double> legendre_all(int n, double x) {
  std::vector<double> P(n + 1);
  P[0] = 1.0;
  if (n >= 1) P[1] = x;
  for (int k = 2; k <= n; ++k) P[k] = ((2 * k - 1) * x * P[k - 1] - (k - 1) * P[k - 2]) / k;
  return P;
}

double legendre(int n, double x) { return legendre_all(n, x)[n]; }

double jacobi_normalized(int n, double a, double b, double x) {
  // three-term recurrence for orthonormal Jacobi polynomials
  double g0 = std::pow(2.0, a + b + 1) / (a + b + 1) * std::tgamma(a + 1) *
              std::tgamma(b + 1) / std::tgamma(a + b + 1);
  double p0 = 1.0 / std::sqrt(g0);
  if (n == 0) return p0;
  double g1 = (a + 1) * (b + 1) / (a + b + 3) * g0;
  double p1 = ((a + b + 2) * x / 2 + (a - b) / 2) / std::sqrt(g1);
  if (n == 1) return p1;
  double aold = 2.0 / (2 + a + b) * std::sqrt((a + 1) * (b + 1) / (a + b + 3));
  double pm = p0, pc = p1;
  for (int i = 1; i < n; ++i) {
    double h1 = 2 * i + a + b;
    double anew = 2.0 / (h1 + 2) *
                  std::sqrt((i + 1) * (i + 1 + a + b) * (i + 1 + a) * (i + 1 + b) /
                            (h1 + 1) / (h1 + 3));
    double bnew = -(a * a - b * b) / h1 / (h1 + 2);
    double pn = 1.0 / anew * (-aold * pm + (x - bnew) * pc);
    aold = anew;
    pm = pc;
    pc = pn;
  }
  return pc;
}

double jacobi_normalized_deriv(int n, double a, double b, double x) {
  if (n == 0) return 0.0;
  return std::sqrt(n * (n + a + b + 1)) * jacobi_normalized(n - 1, a + 1, b + 1, x);
}

QuadratureRule gauss_jacobi(int n, double a, double b) {
  QuadratureRule r;
  r.x.resize(n);
  r.w.resize(n);
  if (n == 1) {
    r.x(0) = (b - a) / (a + b + 2);
    r.w(0) = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) /
             std::tgamma(a + b + 2);
    return r;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double h1 = 2.0 * i + a + b;
    T(i, i) = (h1 == 0.0) ? (b - a) / 2.0 : -(a * a - b * b) / (h1 + 2) / h1;
    if (i + 1 < n) {
      double k = i + 1;
      double e = 2.0 / (h1 + 2) *
                 std::sqrt(k * (k + a + b) * (k + a) * (k + b) / (h1 + 1) / (h1 + 3));
      T(i, i + 1) = e;
      T(i + 1, i) = e;
    }
  }
  if (a + b < 10 * std::numeric_limits<double>::epsilon()) T(0, 0) = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  double mu0 = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) /
               std::tgamma(a + b + 2);
  r.x = es.eigenvalues();
  for (int i = 0; i < n; ++i) {
    double v = es.eigenvectors()(0, i);
    r.w(i) = v * v * mu0;
  }
  return r;
}

QuadratureRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

Eigen::VectorXd gauss_lobatto_nodes(int n) {
  Eigen::VectorXd x(n);
  x(0) = -1.0;
  x(n - 1) = 1.0;
  if (n > 2) {
    QuadratureRule g = gauss_jacobi(n - 2, 1.0, 1.0);
    for (int i = 0; i < n - 2; ++i) x(i + 1) = g.x(i);
  }
  return x;
}

}  // namespace sbpglue
