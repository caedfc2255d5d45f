#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace sbpglue {

/// Raw unit-spacing coefficients of one operator family, as stored in the data file.
struct SbpCoefficients {
  int q = 0;
  int interior_order = 0;
  int closure_width = 0;
  std::vector<double> central;                // a_1..a_q
  std::vector<double> norm;                   // H_0..H_{b-1}
  std::vector<std::vector<double>> qblock;    // b x b
};

const char* embedded_sbp_coefficients();

/// Parses a coefficient file body. Throws DataFile on malformed input.
std::vector<SbpCoefficients> parse_sbp_coefficients(const char* text);

/// Coefficients for boundary order q, parsed once from the embedded table.
const SbpCoefficients& sbp_coefficients(int q);

/// Diagonal-norm first-derivative SBP operator on N cells of [-1,1].
class SbpOperator1D {
 public:
  SbpOperator1D(const SbpCoefficients& c, int n_cells);

  int boundary_order() const { return q_; }
  int interior_order() const { return 2 * q_; }
  int n_cells() const { return n_; }
  int n_points() const { return n_ + 1; }
  int closure_width() const { return b_; }
  double spacing() const { return h_; }

  /// Diagonal of H (already scaled by h).
  const Eigen::VectorXd& norm() const { return H_; }

  Eigen::MatrixXd Q() const;
  Eigen::MatrixXd D() const;
  Eigen::MatrixXd B() const;
  Eigen::MatrixXd H() const { return H_.asDiagonal(); }

  /// out[k*os] = (D u)_k, with u read at u[k*is].
  void apply(const double* u, std::ptrdiff_t is, double* out, std::ptrdiff_t os) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

 private:
  int q_, n_, b_;
  double h_;
  std::vector<double> a_;
  // closure rows of D on a unit grid, width b + q each, already divided by H_k
  std::vector<std::vector<double>> closure_;
  Eigen::MatrixXd qblock_;
  Eigen::VectorXd H_;
};

/// Builds the operator for boundary order q. Throws UnsupportedOrder or GridTooSmall.
SbpOperator1D build_sbp(int q, int n_cells);

/// Minimum N for which build_sbp(q, N) succeeds.
int min_cells_sbp(int q);

struct AccuracyEntry {
  int degree = 0;
  bool boundary = false;   // closure rows (both ends) vs interior rows
  double max_error = 0.0;
  bool required = false;   // degree is within the order contract for this region
  bool violated = false;
};

struct AccuracyReport {
  int q = 0;
  int n_cells = 0;
  std::vector<AccuracyEntry> entries;
  bool ok() const;
};

/// Max pointwise derivative error on x^m, m = 0..p_i, split interior/boundary.
/// A degree is flagged when it is within the contract and exceeds tol.
AccuracyReport verify_sbp_accuracy(const SbpOperator1D& op, double tol = 1e-10);

}  // namespace sbpglue
