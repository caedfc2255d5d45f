#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sbpglue {

/// Legendre P_0..P_n at x.
std::vector<double> legendre_all(int n, double x);
double legendre(int n, double x);

/// Normalised Jacobi polynomial P_n^{(a,b)}(x), orthonormal on [-1,1] with weight (1-x)^a (1+x)^b.
double jacobi_normalized(int n, double a, double b, double x);
double jacobi_normalized_deriv(int n, double a, double b, double x);

struct QuadratureRule {
  Eigen::VectorXd x;
  Eigen::VectorXd w;
};

/// n-point Gauss-Jacobi rule for weight (1-x)^a (1+x)^b (Golub-Welsch).
QuadratureRule gauss_jacobi(int n, double a, double b);
/// n-point Gauss-Legendre rule on [-1,1], exact to degree 2n-1.
QuadratureRule gauss_legendre(int n);
/// n-point Gauss-Lobatto-Jacobi nodes (endpoints included), weights unused.
Eigen::VectorXd gauss_lobatto_nodes(int n);

/// Legendre modal coefficients (on [-1,1]) of f(x(s)), s in [-1,1], exact for
/// polynomial integrands of degree <= 2*npts-1 - n.
template <class F>
std::vector<double> legendre_coefficients(int n, F&& f, int npts) {
  QuadratureRule g = gauss_legendre(npts);
  std::vector<double> c(n + 1, 0.0);
  for (int k = 0; k < npts; ++k) {
    auto P = legendre_all(n, g.x(k));
    double fv = f(g.x(k));
    for (int i = 0; i <= n; ++i) c[i] += g.w(k) * fv * P[i];
  }
  for (int i = 0; i <= n; ++i) c[i] *= (2.0 * i + 1.0) / 2.0;
  return c;
}

}  // namespace sbpglue
