#include "sbpglue/dg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sbpglue/errors.hpp"
#include "sbpglue/poly.hpp"

namespace sbpglue {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_order(int q) {
  if (q < 1 || q > 5) fail(ErrorCode::UnsupportedOrder, "DG order must be in 1..5");
}

// Collapsed coordinates of the reference triangle.
void rs_to_ab(double r, double s, double& a, double& b) {
  a = std::abs(1.0 - s) > 1e-14 ? 2.0 * (1.0 + r) / (1.0 - s) - 1.0 : -1.0;
  b = s;
}

VectorXd warp_factor(int q, const VectorXd& rout) {
  VectorXd lgl = gauss_lobatto_nodes(q + 1);
  VectorXd req = VectorXd::LinSpaced(q + 1, -1.0, 1.0);
  MatrixXd Veq(q + 1, q + 1), P(q + 1, rout.size());
  for (int j = 0; j <= q; ++j) {
    for (int i = 0; i <= q; ++i) Veq(i, j) = jacobi_normalized(j, 0, 0, req(i));
    for (int i = 0; i < rout.size(); ++i) P(j, i) = jacobi_normalized(j, 0, 0, rout(i));
  }
  MatrixXd L = Veq.transpose().partialPivLu().solve(P);
  VectorXd warp = L.transpose() * (lgl - req);
  for (int i = 0; i < rout.size(); ++i) {
    if (std::abs(rout(i)) < 1.0 - 1e-10) warp(i) /= 1.0 - rout(i) * rout(i);
    else warp(i) = 0.0;
  }
  return warp;
}

}  // namespace

void warp_blend_nodes(int q, VectorXd& r, VectorXd& s) {
  static const double alpopt[] = {0.0,    0.0,    1.4152, 0.1001, 0.2751, 0.9800, 1.0999, 1.2832,
                                  1.3648, 1.4773, 1.4959, 1.5743, 1.5770, 1.6223, 1.6258};
  const double alpha = q < 16 ? alpopt[q - 1] : 5.0 / 3.0;
  const int np = (q + 1) * (q + 2) / 2;
  VectorXd L1(np), L2(np), L3(np);
  int sk = 0;
  for (int n = 0; n <= q; ++n)
    for (int m = 0; m <= q - n; ++m) {
      L1(sk) = static_cast<double>(n) / q;
      L3(sk) = static_cast<double>(m) / q;
      ++sk;
    }
  L2 = VectorXd::Ones(np) - L1 - L3;
  VectorXd x = -L2 + L3;
  VectorXd y = (-L2 - L3 + 2.0 * L1) / std::sqrt(3.0);
  VectorXd w1 = warp_factor(q, L3 - L2), w2 = warp_factor(q, L1 - L3), w3 = warp_factor(q, L2 - L1);
  const double c2 = std::cos(2 * std::numbers::pi / 3), s2 = std::sin(2 * std::numbers::pi / 3);
  const double c4 = std::cos(4 * std::numbers::pi / 3), s4 = std::sin(4 * std::numbers::pi / 3);
  for (int i = 0; i < np; ++i) {
    const double wa = 4 * L2(i) * L3(i) * w1(i) * (1 + std::pow(alpha * L1(i), 2));
    const double wb = 4 * L1(i) * L3(i) * w2(i) * (1 + std::pow(alpha * L2(i), 2));
    const double wc = 4 * L1(i) * L2(i) * w3(i) * (1 + std::pow(alpha * L3(i), 2));
    x(i) += wa + c2 * wb + c4 * wc;
    y(i) += s2 * wb + s4 * wc;
  }
  // equilateral -> reference triangle
  r.resize(np);
  s.resize(np);
  for (int i = 0; i < np; ++i) {
    const double l1 = (std::sqrt(3.0) * y(i) + 1.0) / 3.0;
    const double l2 = (-3.0 * x(i) - std::sqrt(3.0) * y(i) + 2.0) / 6.0;
    const double l3 = (3.0 * x(i) - std::sqrt(3.0) * y(i) + 2.0) / 6.0;
    r(i) = -l2 + l3 - l1;
    s(i) = -l2 - l3 + l1;
  }
}

MatrixXd dubiner_vandermonde(int q, const VectorXd& r, const VectorXd& s) {
  const int np = (q + 1) * (q + 2) / 2;
  MatrixXd V(r.size(), np);
  for (int k = 0; k < r.size(); ++k) {
    double a, b;
    rs_to_ab(r(k), s(k), a, b);
    int col = 0;
    for (int i = 0; i <= q; ++i)
      for (int j = 0; j <= q - i; ++j)
        V(k, col++) = std::sqrt(2.0) * jacobi_normalized(i, 0, 0, a) *
                      jacobi_normalized(j, 2 * i + 1, 0, b) * std::pow(1.0 - b, i);
  }
  return V;
}

void dubiner_gradients(int q, const VectorXd& r, const VectorXd& s, MatrixXd& Vr, MatrixXd& Vs) {
  const int np = (q + 1) * (q + 2) / 2;
  Vr.resize(r.size(), np);
  Vs.resize(r.size(), np);
  for (int k = 0; k < r.size(); ++k) {
    double a, b;
    rs_to_ab(r(k), s(k), a, b);
    int col = 0;
    for (int i = 0; i <= q; ++i)
      for (int j = 0; j <= q - i; ++j) {
        const double fa = jacobi_normalized(i, 0, 0, a);
        const double dfa = jacobi_normalized_deriv(i, 0, 0, a);
        const double gb = jacobi_normalized(j, 2 * i + 1, 0, b);
        const double dgb = jacobi_normalized_deriv(j, 2 * i + 1, 0, b);
        const double hb = 0.5 * (1.0 - b);
        double dr = dfa * gb;
        if (i > 0) dr *= std::pow(hb, i - 1);
        double ds = dfa * gb * 0.5 * (1.0 + a);
        if (i > 0) ds *= std::pow(hb, i - 1);
        double tmp = dgb * std::pow(hb, i);
        if (i > 0) tmp -= 0.5 * i * gb * std::pow(hb, i - 1);
        ds += fa * tmp;
        const double scale = std::pow(2.0, i + 0.5);
        Vr(k, col) = dr * scale;
        Vs(k, col) = ds * scale;
        ++col;
      }
  }
}

void RefTriangle::edge_point(int K, double t, double& r, double& s) {
  switch (K) {
    case 0: r = t; s = -1.0; break;
    case 1: r = -t; s = t; break;
    default: r = -1.0; s = -t; break;
  }
}

void RefTriangle::edge_tangent(int K, double& dr_dt, double& ds_dt) {
  switch (K) {
    case 0: dr_dt = 1.0; ds_dt = 0.0; break;
    case 1: dr_dt = -1.0; ds_dt = 1.0; break;
    default: dr_dt = 0.0; ds_dt = -1.0; break;
  }
}

RefTriangle build_ref_triangle(int q) {
  check_order(q);
  RefTriangle R;
  R.q = q;
  R.n_nodes = (q + 1) * (q + 2) / 2;
  warp_blend_nodes(q, R.r, R.s);
  R.V = dubiner_vandermonde(q, R.r, R.s);
  R.Vinv = R.V.inverse();
  MatrixXd Vr, Vs;
  dubiner_gradients(q, R.r, R.s, Vr, Vs);
  R.D1 = Vr * R.Vinv;
  R.D2 = Vs * R.Vinv;

  // collapsed Gauss cubature: Legendre in a, Gauss-Jacobi(1,0) in b
  R.cubature_degree = std::max(2 * q + 2, 3 * q);
  const int nc = (R.cubature_degree + 2) / 2;
  QuadratureRule ga = gauss_legendre(nc), gb = gauss_jacobi(nc, 1.0, 0.0);
  R.cub_r.resize(nc * nc);
  R.cub_s.resize(nc * nc);
  R.cub_w.resize(nc * nc);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) {
      const int k = i * nc + j;
      R.cub_r(k) = 0.5 * (1.0 + ga.x(i)) * (1.0 - gb.x(j)) - 1.0;
      R.cub_s(k) = gb.x(j);
      R.cub_w(k) = 0.5 * ga.w(i) * gb.w(j);
    }
  R.Pc = dubiner_vandermonde(q, R.cub_r, R.cub_s) * R.Vinv;

  QuadratureRule ge = gauss_legendre(q + 2);
  R.edge_t = ge.x;
  R.edge_w = ge.w;
  const int ne = R.n_edge_points();
  for (int K = 0; K < 3; ++K) {
    VectorXd er(ne), es(ne);
    for (int i = 0; i < ne; ++i) RefTriangle::edge_point(K, R.edge_t(i), er(i), es(i));
    R.Pb[K] = dubiner_vandermonde(q, er, es) * R.Vinv;
    MatrixXd Er, Es;
    dubiner_gradients(q, er, es, Er, Es);
    R.Pb_dr[K] = Er * R.Vinv;
    R.Pb_ds[K] = Es * R.Vinv;

    std::vector<std::pair<double, int>> on;
    for (int i = 0; i < R.n_nodes; ++i) {
      const double r = R.r(i), s = R.s(i);
      double t;
      bool hit;
      if (K == 0) { hit = std::abs(s + 1.0) < 1e-10; t = r; }
      else if (K == 1) { hit = std::abs(r + s) < 1e-10; t = s; }
      else { hit = std::abs(r + 1.0) < 1e-10; t = -s; }
      if (hit) on.emplace_back(t, i);
    }
    std::sort(on.begin(), on.end());
    for (const auto& e : on) R.edge_nodes[K].push_back(e.second);
  }
  return R;
}

const RefTriangle& ref_triangle(int q) {
  check_order(q);
  static std::mutex mu;
  static std::map<int, std::unique_ptr<RefTriangle>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[q];
  if (!slot) slot = std::make_unique<RefTriangle>(build_ref_triangle(q));
  return *slot;
}

DgElement build_dg_element(const RefTriangle& ref, const VectorXd& x1, const VectorXd& x2) {
  const int np = ref.n_nodes;
  if (x1.size() != np || x2.size() != np)
    fail(ErrorCode::ShapeMismatch, "element node coordinates do not match the reference set");
  DgElement e;
  e.x1 = x1;
  e.x2 = x2;

  // metric terms at the cubature points
  VectorXd xr = ref.Pc * (ref.D1 * x1), xs = ref.Pc * (ref.D2 * x1);
  VectorXd yr = ref.Pc * (ref.D1 * x2), ys = ref.Pc * (ref.D2 * x2);
  VectorXd J = xr.cwiseProduct(ys) - xs.cwiseProduct(yr);
  e.min_jacobian = J.minCoeff();
  if (!(e.min_jacobian > 0.0)) {
    std::ostringstream os;
    os << "element near (" << x1.mean() << "," << x2.mean() << ") has J=" << e.min_jacobian;
    fail(ErrorCode::NonPositiveJacobian, os.str());
  }
  const VectorXd& w = ref.cub_w;
  MatrixXd WPc = w.asDiagonal() * ref.Pc;
  MatrixXd PcD1 = ref.Pc * ref.D1, PcD2 = ref.Pc * ref.D2;
  e.MJ = ref.Pc.transpose() * J.asDiagonal() * WPc;
  Eigen::LLT<MatrixXd> llt(e.MJ);
  if (llt.info() != Eigen::Success) fail(ErrorCode::SingularMass, "element mass matrix is not SPD");

  // A_i = Pc^T W (a_1i Pc D1 + a_2i Pc D2), a11 = y_s, a21 = -y_r, a12 = -x_s, a22 = x_r
  MatrixXd A1 = WPc.transpose() * (ys.asDiagonal() * PcD1 - yr.asDiagonal() * PcD2);
  MatrixXd A2 = WPc.transpose() * (xr.asDiagonal() * PcD2 - xs.asDiagonal() * PcD1);
  e.A1 = llt.solve(A1);
  e.A2 = llt.solve(A2);
  e.A1t = llt.solve(A1.transpose());
  e.A2t = llt.solve(A2.transpose());

  e.min_edge = std::numeric_limits<double>::infinity();
  for (int K = 0; K < 3; ++K) {
    double drt, dst;
    RefTriangle::edge_tangent(K, drt, dst);
    VectorXd dx = drt * (ref.Pb_dr[K] * x1) + dst * (ref.Pb_ds[K] * x1);
    VectorXd dy = drt * (ref.Pb_dr[K] * x2) + dst * (ref.Pb_ds[K] * x2);
    VectorXd sj = (dx.array().square() + dy.array().square()).sqrt();
    if (!(sj.minCoeff() > 0.0))
      fail(ErrorCode::NonPositiveSurfaceJacobian, "degenerate element edge");
    e.sj[K] = sj;
    e.n1[K] = dy.cwiseQuotient(sj);
    e.n2[K] = -dx.cwiseQuotient(sj);
    e.ex1[K] = ref.Pb[K] * x1;
    e.ex2[K] = ref.Pb[K] * x2;
    e.lift[K] = llt.solve(ref.Pb[K].transpose() * ref.edge_w.asDiagonal());
    // straight vertex-to-vertex length
    const auto& nodes = ref.edge_nodes[K];
    const int a = nodes.front(), b = nodes.back();
    e.min_edge = std::min(e.min_edge, std::hypot(x1(b) - x1(a), x2(b) - x2(a)));
  }
  return e;
}

FaceTraces dg_edge_traces(const DgElement& e, const RefTriangle& ref, int K, const double* v1,
                          const double* v2, const double* p) {
  const int np = ref.n_nodes;
  Eigen::Map<const VectorXd> V1(v1, np), V2(v2, np), P(p, np);
  FaceTraces tr;
  tr.p = ref.Pb[K] * P;
  tr.v = e.n1[K].cwiseProduct(ref.Pb[K] * V1) + e.n2[K].cwiseProduct(ref.Pb[K] * V2);
  return tr;
}

void dg_element_rhs(const DgElement& e, const RefTriangle& ref, const Material& mat,
                    const double* v1, const double* v2, const double* p,
                    const std::array<Penalty, 3>& pen, double* dv1, double* dv2, double* dp) {
  const int np = ref.n_nodes;
  const int ne = ref.n_edge_points();
  Eigen::Map<const VectorXd> V1(v1, np), V2(v2, np), P(p, np);
  Eigen::Map<VectorXd> DV1(dv1, np), DV2(dv2, np), DP(dp, np);
  // velocity in weak form, pressure in strong form
  DV1.noalias() = e.A1t * P / mat.rho;
  DV2.noalias() = e.A2t * P / mat.rho;
  DP.noalias() = -mat.lambda * (e.A1 * V1 + e.A2 * V2);
  for (int K = 0; K < 3; ++K) {
    if (pen[K].dp.size() != ne || pen[K].dv.size() != ne)
      fail(ErrorCode::ShapeMismatch, "DG flux length does not match the edge quadrature");
    VectorXd pstar = ref.Pb[K] * P + pen[K].dp;
    VectorXd sp = e.sj[K].cwiseProduct(pstar);
    DV1.noalias() -= e.lift[K] * e.n1[K].cwiseProduct(sp) / mat.rho;
    DV2.noalias() -= e.lift[K] * e.n2[K].cwiseProduct(sp) / mat.rho;
    DP.noalias() -= mat.lambda * (e.lift[K] * e.sj[K].cwiseProduct(pen[K].dv));
  }
}

double dg_element_energy(const DgElement& e, const Material& mat, const double* v1,
                         const double* v2, const double* p) {
  const int np = static_cast<int>(e.MJ.rows());
  Eigen::Map<const VectorXd> V1(v1, np), V2(v2, np), P(p, np);
  return 0.5 * mat.rho * (V1.dot(e.MJ * V1) + V2.dot(e.MJ * V2)) +
         0.5 / mat.lambda * P.dot(e.MJ * P);
}

Penalty dg_dg_flux(const FaceTraces& minus, const FaceTraces& plus, double alpha,
                   const Material& mat) {
  return conforming_penalty(minus, plus, alpha, mat);
}

ProjectionPair dg_edge_projection(const RefTriangle& ref) {
  const int q = ref.q;
  const int ne = ref.n_edge_points();
  ProjectionPair pp;
  pp.target.breakpoints = {-1.0, 1.0};
  pp.target.order = {q};
  pp.source_norm = ref.edge_w;
  pp.delta = 1.0;
  MatrixXd G(ne, q + 1);
  for (int j = 0; j < ne; ++j) {
    auto P = legendre_all(q, ref.edge_t(j));
    for (int i = 0; i <= q; ++i) G(j, i) = P[i];
  }
  VectorXd minv = pp.target.mass().cwiseInverse();
  MatrixXd F = minv.asDiagonal() * G.transpose() * ref.edge_w.asDiagonal();
  pp.g2f = G.sparseView();
  pp.f2g = F.sparseView();
  return pp;
}

void check_dg_projection(const ProjectionPair& composed, const RefTriangle& ref) {
  const int q = ref.q;
  const int ne = ref.n_edge_points();
  if (composed.n_points() != ne)
    fail(ErrorCode::ShapeMismatch, "composed DG projection has the wrong number of points");
  // every glue interval touched by this edge must carry order >= q
  const GlueSpace& g = composed.target;
  const MatrixXd Gd = MatrixXd(composed.g2f);
  for (int k = 0; k < g.n_intervals(); ++k) {
    bool used = false;
    for (int i = g.offset(k); i < g.offset(k) + g.order[k] + 1; ++i)
      if (Gd.col(i).norm() > 0.0) used = true;
    if (used && g.order[k] < q) {
      std::ostringstream os;
      os << "glue interval " << k << " has order " << g.order[k] << " < DG order " << q;
      fail(ErrorCode::GlueOrderTooLow, os.str());
    }
  }
  // round trip on degree <= q traces
  MatrixXd U(ne, q + 1);
  for (int j = 0; j < ne; ++j)
    for (int d = 0; d <= q; ++d) U(j, d) = std::pow(ref.edge_t(j), d);
  MatrixXd R = composed.g2f * (composed.f2g * U) - U;
  const double rt = R.cwiseAbs().maxCoeff();
  const double cr = composed.compatibility_residual();
  if (rt > 1e-10 || cr > 1e-10) {
    std::ostringstream os;
    os << "DG round trip residual " << rt << ", compatibility residual " << cr;
    fail(ErrorCode::QuadratureTooCoarse, os.str());
  }
}

}  // namespace sbpglue
