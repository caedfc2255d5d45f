#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sbpglue/sbp.hpp"

namespace sbpglue {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Piecewise Legendre space on an interface. Coefficients are stored interval
/// by interval, modes 0..order within each interval.
struct GlueSpace {
  std::vector<double> breakpoints;
  std::vector<int> order;

  int n_intervals() const { return static_cast<int>(order.size()); }
  int size() const;
  int offset(int k) const;
  double width(int k) const { return breakpoints[k + 1] - breakpoints[k]; }
  /// Diagonal of the mass matrix: width/(2i+1) per mode.
  Eigen::VectorXd mass() const;
  /// Coefficients of f restricted to each interval (exact for polynomials up to 2*order+1).
  Eigen::VectorXd project(const std::function<double(double)>& f) const;
  double evaluate(const Eigen::VectorXd& coeffs, double eta) const;
};

/// N intervals aligned with the N+1 grid points on [lo, hi], order p_i - 1 each.
GlueSpace build_glue_for_grid(int n_cells, int interior_order, double lo = -1.0,
                              double hi = 1.0);

/// Grid <-> glue projection pair with Delta * g2f^T * norm = M * f2g.
struct ProjectionPair {
  SpMat f2g;                   // glue.size() x n_points
  SpMat g2f;                   // n_points x glue.size()
  Eigen::VectorXd source_norm; // H (FD) or quadrature weights (DG)
  GlueSpace target;
  double delta = 1.0;

  int n_points() const { return static_cast<int>(source_norm.size()); }
  /// max |Delta g2f^T H - M f2g| / max M
  double compatibility_residual() const;
};

/// Construction parameters for boundary order q.
struct ProjectionParams {
  int q = 0, p_i = 0, p_b = 0, l = 0, s1 = 0, r = 0, n = 0, m = 0;
  int n_c() const;
  int n_d() const;
};
ProjectionParams projection_params(int q);
/// Smallest N the projection for order q can be assembled on.
int min_cells_projection(int q);

struct ConstraintSystem {
  ProjectionParams params;
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  std::vector<double> unit_norm;  // SBP norm weights on a unit grid, long enough for all rows used
  int unknown_count() const { return static_cast<int>(A.cols()); }
  int constraint_count() const { return static_cast<int>(A.rows()); }
  int interior_index(int jp, int i) const { return jp * (params.n + 1) + i; }
  int boundary_index(int k, int t, int i) const {
    return params.m * (params.n + 1) + (k * params.r + t) * (params.n + 1) + i;
  }
};

/// Constraint rows: (a) symmetry of the interior stencil, (b) interior g2f and
/// f2g exactness below degree p_i, (c) boundary g2f and f2g exactness below p_b.
ConstraintSystem assemble_projection_constraints(int q);

/// Unit-grid stencil coefficients solving a ConstraintSystem.
struct ProjectionStencil {
  ProjectionParams params;
  Eigen::VectorXd coeffs;        // unknown vector of the constraint system
  double residual = 0.0;         // max |A z - rhs|
  int rank = 0;
  bool refined = false;
  double objective = 0.0;        // ||S - I||_F^2 on the N=64 refinement grid
};

/// Minimum-norm solution; with refine, null-space directions are moved to pull
/// the spectrum of P_g2f P_f2g toward 1 on a 64-cell grid.
ProjectionStencil solve_projection_stencil(const ConstraintSystem& sys, bool refine);
/// Cached per (q, refine); thread-safe.
const ProjectionStencil& projection_stencil(int q, bool refine = false);

/// Assembles the grid<->glue pair for op's grid from a stencil.
ProjectionPair assemble_projection(const ProjectionStencil& st, const SbpOperator1D& op);
ProjectionPair solve_projection(const ConstraintSystem& sys, const SbpOperator1D& op,
                                bool refine = false);
/// Cached stencil + assembly.
ProjectionPair build_projection(const SbpOperator1D& op, bool refine = false);

/// ||S - I||_F^2 for S = H^{1/2} P_g2f M^{-1} P_g2f^T H^{1/2}.
double eigen_cluster_objective(const ProjectionPair& pp);

/// Max errors of the pair on monomials (x/2)^d, split by closure/interior rows
/// (g2f) and boundary/interior intervals (f2g).
struct ProjectionAccuracy {
  double g2f_interior = 0.0;   // degree < p_i, rows away from the closures
  double g2f_boundary = 0.0;   // degree < p_b, all rows
  double f2g_interior = 0.0;   // degree < p_i, intervals away from the closures
  double f2g_boundary = 0.0;   // degree < p_b, all intervals
};
ProjectionAccuracy projection_accuracy(const ProjectionPair& pp, const ProjectionParams& params);

/// Embedding of a coarse space into a nested fine one and its M-adjoint.
struct GlueTransfer {
  SpMat a2b;  // fine x coarse, exact re-expansion
  SpMat b2a;  // coarse x fine, M_a^{-1} a2b^T M_b
};
GlueTransfer glue_to_glue(const GlueSpace& coarse, const GlueSpace& fine,
                          double tol = 1e-12);

/// One participant of an interface side.
struct GlueParticipant {
  ProjectionPair pair;     // in the participant's own reference coordinate [-1,1]
  double beta_lo = -1.0;   // covered part of the interface parameter
  double beta_hi = 1.0;
  bool reversed = false;   // own coordinate runs against eta
  double delta() const { return (beta_hi - beta_lo) / 2.0; }
};

/// Composed projections onto the common glue; f2g maps into the full common
/// glue vector, with zero rows outside the participant's range.
struct ComposedInterface {
  GlueSpace common;
  std::vector<ProjectionPair> minus;
  std::vector<ProjectionPair> plus;
};

/// Throws PartitionMismatch if either side does not tile [-1,1].
ComposedInterface compose_to_common_glue(const std::vector<GlueParticipant>& minus,
                                         const std::vector<GlueParticipant>& plus,
                                         double tol = 1e-12);

}  // namespace sbpglue
