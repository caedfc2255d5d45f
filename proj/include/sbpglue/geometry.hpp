#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbpglue {

/// Map value and partials at one reference point.
struct TransformEval {
  double x1 = 0.0, x2 = 0.0;
  double x1_xi1 = 0.0, x1_xi2 = 0.0;  // dx1/dxi1, dx1/dxi2
  double x2_xi1 = 0.0, x2_xi2 = 0.0;
  double jacobian() const { return x1_xi1 * x2_xi2 - x2_xi1 * x1_xi2; }
};

/// Analytic map (xi1, xi2) in [-1,1]^2 -> (x1, x2).
struct Transform {
  std::string name;
  std::function<TransformEval(double, double)> eval;
};

Transform identity_transform();
/// x = A xi + b.
Transform affine_transform(double a11, double a12, double a21, double a22, double b1 = 0.0,
                           double b2 = 0.0);
/// Left block of the curved two-block domain; its east face is x1 = sin(pi(xi2+1))/5.
Transform paper_left_transform();
Transform paper_right_transform();
/// Upper and lower halves (in xi2) of the right block.
Transform right_top_transform();
Transform right_bottom_transform();

/// Name-keyed catalog. Built-ins: identity, affine (x = 2 xi), paper-left,
/// paper-right, right-top, right-bottom.
void register_transform(const std::string& name, std::function<Transform()> factory);
Transform make_transform(const std::string& name);
std::vector<std::string> transform_names();

enum class Face { West = 0, East = 1, South = 2, North = 3 };
const char* face_name(Face f);

struct FaceMetrics {
  Eigen::VectorXd sj;      // surface Jacobian
  Eigen::VectorXd n1, n2;  // outward unit normal
};

/// Metric terms on an (N1+1) x (N2+1) grid, index k*(N2+1)+l.
struct MetricData {
  int n1 = 0, n2 = 0;  // cells
  Eigen::VectorXd x1, x2, J;
  // a_ij = J dxi_i/dx_j
  Eigen::VectorXd a11, a12, a21, a22;
  std::array<FaceMetrics, 4> faces;

  int n_points() const { return (n1 + 1) * (n2 + 1); }
  const FaceMetrics& face(Face f) const { return faces[static_cast<int>(f)]; }
};

/// Analytic metrics; throws NonPositiveJacobian naming the first bad point.
MetricData metrics_for_block(const Transform& t, int n1, int n2);

/// Largest deviation of the stored metric terms from the relations
/// a11 = dx2/dxi2, a12 = -dx1/dxi2, a21 = -dx2/dxi1, a22 = dx1/dxi1, and of
/// a11*a22 - a12*a21 from J, re-evaluating the map at every grid point.
double metric_identity_residual(const Transform& t, const MetricData& m);

}  // namespace sbpglue
