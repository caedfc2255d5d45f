#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbpglue/geometry.hpp"
#include "sbpglue/glue.hpp"
#include "sbpglue/sbp.hpp"

namespace sbpglue {

struct Material {
  double rho = 1.0;
  double lambda = 1.0;
  double c() const;
  /// Impedance as used in the penalties: sqrt(rho / lambda).
  double Z() const;
  void validate() const;
};

/// Curvilinear SBP block on (N1+1) x (N2+1) points, index k*(N2+1)+l.
class Block {
 public:
  Block(std::string name, const Transform& t, int q, int n1, int n2);

  const std::string& name() const { return name_; }
  const Transform& transform() const { return transform_; }
  int q() const { return op1_.boundary_order(); }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int n_points() const { return (n1_ + 1) * (n2_ + 1); }
  int index(int k, int l) const { return k * (n2_ + 1) + l; }
  const SbpOperator1D& op1() const { return op1_; }
  const SbpOperator1D& op2() const { return op2_; }
  const MetricData& metrics() const { return metrics_; }

  int face_size(Face f) const;
  /// Volume index of the j-th point along face f (j runs with xi2 on W/E, xi1 on S/N).
  int face_index(Face f, int j) const;
  /// 1-D norm along the face (H2 on W/E, H1 on S/N).
  const Eigen::VectorXd& face_norm(Face f) const;
  /// Norm weight of the face line in the normal direction (H1_00, H1_NN, H2_00, H2_NN).
  double face_normal_weight(Face f) const;
  /// Diagonal of H1 (x) H2.
  const Eigen::VectorXd& volume_norm() const { return H_; }
  /// Smallest physical distance between grid neighbours.
  double min_spacing() const;

 private:
  std::string name_;
  Transform transform_;
  int n1_, n2_;
  SbpOperator1D op1_, op2_;
  MetricData metrics_;
  Eigen::VectorXd H_;
};

/// Pressure and outward normal velocity along a face.
struct FaceTraces {
  Eigen::VectorXd p, v;
};

/// p* - p and v* - v at the face points.
struct Penalty {
  Eigen::VectorXd dp, dv;
  static Penalty zero(int n);
};

FaceTraces block_face_traces(const Block& b, Face f, const double* v1, const double* v2,
                             const double* p);

/// Volume part of the semi-discretization (no penalties); overwrites dv1, dv2, dp.
void rhs_volume(const Block& b, const Material& mat, const double* v1, const double* v2,
                const double* p, double* dv1, double* dv2, double* dp);

/// Adds the face penalty -H^-1 F scaled by 1/(rho J) and lambda/J.
void apply_face_penalty(const Block& b, const Material& mat, Face f, const Penalty& pen,
                        double* dv1, double* dv2, double* dp);

/// Free-surface (p = 0) penalty: p*-p = -p, v*-v = alpha p / Z.
Penalty boundary_penalty(const FaceTraces& tr, double alpha, const Material& mat);

/// Minus-side penalty for a conforming interface.
Penalty conforming_penalty(const FaceTraces& minus, const FaceTraces& plus, double alpha,
                           const Material& mat);

/// Energy rate contribution of one face (or DG edge):
/// -v^T W S (p*-p) - (v*-v)^T W S p - v^T W S p, W the face quadrature weights.
double edge_dissipation(const Eigen::VectorXd& weights, const Eigen::VectorXd& sj,
                        const FaceTraces& tr, const Penalty& pen);

double block_energy(const Block& b, const Material& mat, const double* v1, const double* v2,
                    const double* p);

/// One participant of a nonconforming interface, already composed onto the
/// common glue (pair.delta carries the interval fraction).
struct InterfaceParticipant {
  const ProjectionPair* pair = nullptr;
  Eigen::VectorXd sj;   // surface Jacobian at the participant's points
  FaceTraces traces;
  bool dg = false;      // DG edges take the flux form without the projection-error term
};

struct GlueValues {
  Eigen::VectorXd p_minus, v_minus, p_plus, v_plus;
};

/// Scaled glue traces: sum_k P_f2g^k (S_J^k / Delta^k)^{1/2} u^k on each side.
GlueValues project_to_glue(const std::vector<InterfaceParticipant>& minus,
                           const std::vector<InterfaceParticipant>& plus);

/// Penalties for every participant (minus first, then plus).
std::vector<Penalty> nonconforming_penalties(const std::vector<InterfaceParticipant>& minus,
                                             const std::vector<InterfaceParticipant>& plus,
                                             double alpha, const Material& mat);

/// Glue-level quadratic form of the interface dissipation:
/// -alpha Z/2 |vbar- + vbar+|_M^2 - alpha/(2Z) |pbar- - pbar+|_M^2.
double glue_dissipation(const GlueValues& g, const Eigen::VectorXd& mass, double alpha,
                        const Material& mat);

}  // namespace sbpglue
