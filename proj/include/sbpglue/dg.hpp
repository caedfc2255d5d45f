#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sbpglue/fd.hpp"
#include "sbpglue/glue.hpp"

namespace sbpglue {

/// Nodal reference triangle with vertices (-1,-1), (1,-1), (-1,1).
/// Edge K runs from vertex K to vertex K+1 with parameter t in [-1,1].
struct RefTriangle {
  int q = 0;
  int n_nodes = 0;
  Eigen::VectorXd r, s;             // nodes
  Eigen::MatrixXd V, Vinv;          // Dubiner Vandermonde
  Eigen::MatrixXd D1, D2;           // d/dr, d/ds
  Eigen::VectorXd cub_r, cub_s, cub_w;
  Eigen::MatrixXd Pc;               // nodes -> cubature points
  int cubature_degree = 0;
  Eigen::VectorXd edge_t, edge_w;   // Gauss rule on [-1,1]
  std::array<std::vector<int>, 3> edge_nodes;  // L_K, ordered along t
  std::array<Eigen::MatrixXd, 3> Pb;           // nodes -> edge quadrature points (P_bc L_K)
  std::array<Eigen::MatrixXd, 3> Pb_dr, Pb_ds; // derivatives at edge quadrature points

  int n_edge_points() const { return static_cast<int>(edge_t.size()); }
  /// Reference coordinates of edge K at parameter t.
  static void edge_point(int K, double t, double& r, double& s);
  static void edge_tangent(int K, double& dr_dt, double& ds_dt);
};

const RefTriangle& ref_triangle(int q);
RefTriangle build_ref_triangle(int q);

/// Orthonormal Dubiner basis on the reference triangle and its gradient.
Eigen::MatrixXd dubiner_vandermonde(int q, const Eigen::VectorXd& r, const Eigen::VectorXd& s);
void dubiner_gradients(int q, const Eigen::VectorXd& r, const Eigen::VectorXd& s,
                       Eigen::MatrixXd& Vr, Eigen::MatrixXd& Vs);
/// Warp-and-blend interpolation nodes.
void warp_blend_nodes(int q, Eigen::VectorXd& r, Eigen::VectorXd& s);

/// Curved (isoparametric) element with precomputed operators.
struct DgElement {
  std::array<int, 3> vertices{};
  Eigen::VectorXd x1, x2;           // node coordinates
  bool curved = false;
  Eigen::MatrixXd MJ;               // mass matrix
  Eigen::MatrixXd A1, A2;           // M_J^-1 (M_1i D1 + M_2i D2)
  Eigen::MatrixXd A1t, A2t;         // M_J^-1 (D1^T M_1i + D2^T M_2i)
  std::array<Eigen::MatrixXd, 3> lift;      // M_J^-1 Pb_K^T Omega_bc
  std::array<Eigen::VectorXd, 3> sj, n1, n2;
  std::array<Eigen::VectorXd, 3> ex1, ex2;  // edge quadrature point coordinates
  double min_edge = 0.0;
  double min_jacobian = 0.0;
};

/// Builds the element from node coordinates (ordered as ref.r/ref.s).
DgElement build_dg_element(const RefTriangle& ref, const Eigen::VectorXd& x1,
                           const Eigen::VectorXd& x2);

/// Traces at the edge quadrature points: p and outward normal velocity.
FaceTraces dg_edge_traces(const DgElement& e, const RefTriangle& ref, int K, const double* v1,
                          const double* v2, const double* p);

/// Volume terms plus edge fluxes; pen[K] holds p* - p and v* - v at the edge points.
void dg_element_rhs(const DgElement& e, const RefTriangle& ref, const Material& mat,
                    const double* v1, const double* v2, const double* p,
                    const std::array<Penalty, 3>& pen, double* dv1, double* dv2, double* dp);

/// Element-local variant of the energy: rho/2 v^T M_J v + p^T M_J p / (2 lambda).
double dg_element_energy(const DgElement& e, const Material& mat, const double* v1,
                         const double* v2, const double* p);

/// Flux between two DG elements (minus side): identical in form to the conforming penalty.
Penalty dg_dg_flux(const FaceTraces& minus, const FaceTraces& plus, double alpha,
                   const Material& mat);

/// Edge <-> glue pair for one DG edge: a single Legendre interval of order q on
/// [-1,1], source norm = edge quadrature weights.
ProjectionPair dg_edge_projection(const RefTriangle& ref);

/// Checks the DG round trip P_g2f P_f2g = I on degree-q traces and the
/// compatibility identity; throws GlueOrderTooLow / QuadratureTooCoarse.
void check_dg_projection(const ProjectionPair& composed, const RefTriangle& ref);

}  // namespace sbpglue
