#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbpglue/dg.hpp"
#include "sbpglue/dg_mesh.hpp"
#include "sbpglue/fd.hpp"
#include "sbpglue/glue.hpp"

namespace sbpglue {

enum class Scenario {
  TwoBlockConforming,
  TwoBlockNested,
  TwoBlockUnnested,
  ThreeBlockNested,
  ThreeBlockUnnested,
  SbpDg,
};

const char* scenario_name(Scenario s);
/// Throws ConfigParse for unknown names.
Scenario parse_scenario(const std::string& name);
std::vector<Scenario> all_scenarios();

struct SystemConfig {
  Scenario scenario = Scenario::TwoBlockConforming;
  int q = 2;
  int n = 64;           // base resolution N
  double alpha = 1.0;
  Material material;
  bool refine_glue = true;  // LBFGS refinement of the glue projections
};

struct FieldValue {
  double v1 = 0.0, v2 = 0.0, p = 0.0;
};
using FieldFunction = std::function<FieldValue(double x1, double x2)>;

/// Dissipation of one interface for a given state: the sum of the edge terms
/// of every participant and the closed quadratic form it must equal.
struct InterfaceDissipation {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
};

/// Blocks, DG elements, and all couplings of one scenario. The state vector
/// stores every FD block as [v1 | v2 | p] followed by every DG element as
/// [v1 | v2 | p] over its nodes.
class CoupledSystem {
 public:
  explicit CoupledSystem(const SystemConfig& cfg);
  ~CoupledSystem();
  CoupledSystem(const CoupledSystem&) = delete;
  CoupledSystem& operator=(const CoupledSystem&) = delete;

  const SystemConfig& config() const { return cfg_; }
  int size() const { return size_; }
  int n_blocks() const { return static_cast<int>(blocks_.size()); }
  const Block& block(int b) const { return *blocks_[b]; }
  int block_offset(int b) const { return block_offset_[b]; }
  const DgMesh* dg_mesh() const { return mesh_.get(); }
  int dg_offset() const { return dg_offset_; }

  void rhs(const Eigen::VectorXd& u, Eigen::VectorXd& du) const;
  /// E = u^T W u / 2 with W = diag(rho JH, rho JH, JH/lambda) on blocks and
  /// the M_J analogue on elements.
  double energy(const Eigen::VectorXd& u) const;
  double energy_product(const Eigen::VectorXd& u, const Eigen::VectorXd& w) const;
  /// W u.
  Eigen::VectorXd apply_energy_weight(const Eigen::VectorXd& u) const;
  /// Point values on blocks, nodal values on elements.
  Eigen::VectorXd sample(const FieldFunction& f) const;

  double min_fd_spacing() const;
  double min_dg_edge() const;
  /// 0.25 h_min / c on blocks, 0.25 h_tri / (c q^2) on elements.
  double stable_dt() const;

  /// Per-interface dissipation check for the state u.
  std::vector<InterfaceDissipation> interface_dissipation(const Eigen::VectorXd& u) const;

 private:
  struct FaceRef {
    int block;
    Face face;
  };
  struct Conforming {
    FaceRef a, b;
  };
  struct Nonconforming {
    std::vector<FaceRef> minus, plus;  // FD participants
    bool plus_dg = false;              // plus side is the DG interface edges
    ComposedInterface composed;
  };

  void add_block(const std::string& name, const Transform& t, int n1, int n2);
  void add_nonconforming(std::vector<FaceRef> minus, std::vector<std::pair<double, double>> minus_range,
                         std::vector<FaceRef> plus, std::vector<std::pair<double, double>> plus_range,
                         bool plus_dg);
  void finish_layout();

  FaceTraces fd_traces(const Eigen::VectorXd& u, const FaceRef& f) const;
  void dg_traces(const Eigen::VectorXd& u, std::vector<std::array<FaceTraces, 3>>& tr) const;
  std::vector<InterfaceParticipant> participants(const Nonconforming& nc, const Eigen::VectorXd& u,
                                                 const std::vector<std::array<FaceTraces, 3>>& dg,
                                                 bool minus) const;

  SystemConfig cfg_;
  std::vector<std::unique_ptr<Block>> blocks_;
  std::vector<int> block_offset_;
  std::unique_ptr<DgMesh> mesh_;
  int dg_offset_ = 0;
  int size_ = 0;
  std::vector<FaceRef> boundaries_;
  std::vector<Conforming> conforming_;
  std::vector<Nonconforming> nonconforming_;
};

}  // namespace sbpglue
