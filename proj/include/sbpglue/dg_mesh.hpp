#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sbpglue/dg.hpp"

namespace sbpglue {

/// Triangulation of {c(x2) <= x1 <= 1, -1 <= x2 <= 1} whose left boundary
/// x1 = c(x2) is the coupling interface, parameterised by eta = x2.
struct DgMesh {
  enum class EdgeKind { Interior, Boundary, Interface };
  struct EdgeLink {
    EdgeKind kind = EdgeKind::Boundary;
    int neighbor = -1, neighbor_edge = -1;  // Interior
    int interface_edge = -1;                // Interface
  };
  /// Interface edge in the order of increasing eta.
  struct InterfaceEdge {
    int element = -1, edge = -1;
    double eta_lo = 0.0, eta_hi = 0.0;
    bool reversed = false;  // edge parameter runs against eta
  };

  int q = 0;
  int base_edges = 0;  // interface edges before refinement
  int level = 0;
  std::function<double(double)> curve;
  std::vector<Eigen::Vector2d> vertices;
  std::vector<bool> on_curve;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<DgElement> elements;
  std::vector<std::array<EdgeLink, 3>> links;
  std::vector<InterfaceEdge> interface_edges;

  const RefTriangle& ref() const { return ref_triangle(q); }
  int n_elements() const { return static_cast<int>(triangles.size()); }
  int n_nodes() const { return n_elements() * ref().n_nodes; }
  double min_edge() const;
};

/// The interface curve of the two-block test domain, x1 = sin(pi (x2+1)) / 5.
double paper_interface_curve(double x2);

/// Structured base mesh with `base_edges` interface edges, `level` red
/// refinements, and interface-adjacent elements curved by blending.
DgMesh build_dg_mesh(int q, int base_edges, int level,
                     std::function<double(double)> curve = paper_interface_curve);

/// Base edge count ceil(64/(q+1)) refined log2(N/64) times for N >= 64;
/// ceil(N/(q+1)) unrefined below that.
void dg_mesh_resolution(int q, int n, int& base_edges, int& level);
DgMesh dg_mesh_for_resolution(int q, int n);

}  // namespace sbpglue
