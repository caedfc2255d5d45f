#include "sbpglue/dg_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "sbpglue/errors.hpp"

namespace sbpglue {

double paper_interface_curve(double x2) {
  return 0.2 * std::sin(std::numbers::pi * (x2 + 1.0));
}

double DgMesh::min_edge() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& e : elements) h = std::min(h, e.min_edge);
  return h;
}

namespace {

using Key = std::pair<int, int>;
Key edge_key(int a, int b) { return a < b ? Key{a, b} : Key{b, a}; }

void refine(DgMesh& m) {
  std::map<Key, int> mid;
  auto midpoint = [&](int a, int b) {
    Key k = edge_key(a, b);
    auto it = mid.find(k);
    if (it != mid.end()) return it->second;
    const Eigen::Vector2d& A = m.vertices[a];
    const Eigen::Vector2d& B = m.vertices[b];
    Eigen::Vector2d M = 0.5 * (A + B);
    const bool curve = m.on_curve[a] && m.on_curve[b];
    if (curve) M = Eigen::Vector2d(m.curve(M.y()), M.y());
    const int id = static_cast<int>(m.vertices.size());
    m.vertices.push_back(M);
    m.on_curve.push_back(curve);
    mid[k] = id;
    return id;
  };
  std::vector<std::array<int, 3>> out;
  out.reserve(4 * m.triangles.size());
  for (const auto& t : m.triangles) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = midpoint(a, b), bc = midpoint(b, c), ca = midpoint(c, a);
    out.push_back({a, ab, ca});
    out.push_back({ab, b, bc});
    out.push_back({ca, bc, c});
    out.push_back({ab, bc, ca});
  }
  m.triangles = std::move(out);
}

}  // namespace

DgMesh build_dg_mesh(int q, int base_edges, int level, std::function<double(double)> curve) {
  if (base_edges < 1 || level < 0)
    fail(ErrorCode::GridTooSmall, "DG mesh needs at least one interface edge");
  const RefTriangle& ref = ref_triangle(q);
  DgMesh m;
  m.q = q;
  m.base_edges = base_edges;
  m.level = level;
  m.curve = std::move(curve);

  const int E = base_edges;
  const int nx = (E + 1) / 2;
  auto vid = [&](int i, int j) { return i * (E + 1) + j; };
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= E; ++j) {
      const double x2 = -1.0 + 2.0 * j / E;
      const double f = static_cast<double>(i) / nx;
      m.vertices.emplace_back(m.curve(x2) * (1.0 - f) + f, x2);
      m.on_curve.push_back(i == 0);
    }
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < E; ++j) {
      m.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      m.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  for (int l = 0; l < level; ++l) refine(m);

  // connectivity
  const int ne = m.n_elements();
  m.links.assign(ne, {});
  std::map<Key, std::pair<int, int>> seen;
  for (int e = 0; e < ne; ++e)
    for (int K = 0; K < 3; ++K) {
      const int a = m.triangles[e][K], b = m.triangles[e][(K + 1) % 3];
      Key k = edge_key(a, b);
      auto it = seen.find(k);
      if (it == seen.end()) {
        seen[k] = {e, K};
      } else {
        auto [f, L] = it->second;
        m.links[e][K] = {DgMesh::EdgeKind::Interior, f, L, -1};
        m.links[f][L] = {DgMesh::EdgeKind::Interior, e, K, -1};
      }
    }
  for (int e = 0; e < ne; ++e)
    for (int K = 0; K < 3; ++K) {
      auto& link = m.links[e][K];
      if (link.kind == DgMesh::EdgeKind::Interior) continue;
      const int a = m.triangles[e][K], b = m.triangles[e][(K + 1) % 3];
      if (m.on_curve[a] && m.on_curve[b]) {
        link.kind = DgMesh::EdgeKind::Interface;
        DgMesh::InterfaceEdge ie;
        ie.element = e;
        ie.edge = K;
        const double ea = m.vertices[a].y(), eb = m.vertices[b].y();
        ie.eta_lo = std::min(ea, eb);
        ie.eta_hi = std::max(ea, eb);
        ie.reversed = ea > eb;
        m.interface_edges.push_back(ie);
      }
    }
  std::sort(m.interface_edges.begin(), m.interface_edges.end(),
            [](const auto& x, const auto& y) { return x.eta_lo < y.eta_lo; });
  for (int i = 0; i < static_cast<int>(m.interface_edges.size()); ++i) {
    const auto& ie = m.interface_edges[i];
    m.links[ie.element][ie.edge].interface_edge = i;
  }

  // element nodes: affine map plus blended displacement of the interface edge
  const int np = ref.n_nodes;
  m.elements.reserve(ne);
  for (int e = 0; e < ne; ++e) {
    const auto& t = m.triangles[e];
    Eigen::VectorXd x1(np), x2(np);
    int curved_edge = -1;
    for (int K = 0; K < 3; ++K)
      if (m.links[e][K].kind == DgMesh::EdgeKind::Interface) curved_edge = K;
    for (int i = 0; i < np; ++i) {
      const double r = ref.r(i), s = ref.s(i);
      const std::array<double, 3> lam{-(r + s) / 2.0, (1.0 + r) / 2.0, (1.0 + s) / 2.0};
      Eigen::Vector2d x = lam[0] * m.vertices[t[0]] + lam[1] * m.vertices[t[1]] +
                          lam[2] * m.vertices[t[2]];
      if (curved_edge >= 0) {
        const int ka = curved_edge, kb = (curved_edge + 1) % 3;
        const Eigen::Vector2d& A = m.vertices[t[ka]];
        const Eigen::Vector2d& B = m.vertices[t[kb]];
        const double tt = lam[kb] - lam[ka];
        const double den = 1.0 - tt * tt;
        if (den >= 1e-12) {
          Eigen::Vector2d straight = 0.5 * (1.0 - tt) * A + 0.5 * (1.0 + tt) * B;
          Eigen::Vector2d on(m.curve(straight.y()), straight.y());
          x += 4.0 * lam[ka] * lam[kb] / den * (on - straight);
        }
      }
      x1(i) = x.x();
      x2(i) = x.y();
    }
    m.elements.push_back(build_dg_element(ref, x1, x2));
    m.elements.back().vertices = t;
    m.elements.back().curved = curved_edge >= 0;
  }

  // neighbouring edges must see the same quadrature points in reverse order
  const int nq = ref.n_edge_points();
  for (int e = 0; e < ne; ++e)
    for (int K = 0; K < 3; ++K) {
      const auto& link = m.links[e][K];
      if (link.kind != DgMesh::EdgeKind::Interior) continue;
      const DgElement& A = m.elements[e];
      const DgElement& B = m.elements[link.neighbor];
      for (int i = 0; i < nq; ++i) {
        const int j = nq - 1 - i;
        const double d = std::hypot(A.ex1[K](i) - B.ex1[link.neighbor_edge](j),
                                    A.ex2[K](i) - B.ex2[link.neighbor_edge](j));
        if (d > 1e-10) {
          std::ostringstream os;
          os << "edge quadrature points of elements " << e << " and " << link.neighbor
             << " do not match (" << d << ")";
          fail(ErrorCode::ShapeMismatch, os.str());
        }
      }
    }
  return m;
}

void dg_mesh_resolution(int q, int n, int& base_edges, int& level) {
  if (n >= 64) {
    base_edges = (64 + q) / (q + 1);
    level = static_cast<int>(std::lround(std::log2(n / 64.0)));
  } else {
    base_edges = (n + q) / (q + 1);
    level = 0;
  }
}

DgMesh dg_mesh_for_resolution(int q, int n) {
  int E, L;
  dg_mesh_resolution(q, n, E, L);
  return build_dg_mesh(q, E, L);
}

}  // namespace sbpglue
