#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sbpglue/dg.hpp"
#include "sbpglue/dg_mesh.hpp"
#include "sbpglue/errors.hpp"

using namespace sbpglue;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

double monomial_integral(int n) { return n % 2 == 0 ? 2.0 / (n + 1) : 0.0; }

// integral of r^a s^b over the reference triangle by iterated integration
double triangle_monomial(int a, int b) {
  // int_{-1}^{1} s^b [(-s)^{a+1} - (-1)^{a+1}] / (a+1) ds
  const double sg = (a + 1) % 2 == 0 ? 1.0 : -1.0;
  return (sg * monomial_integral(a + 1 + b) - sg * monomial_integral(b)) / (a + 1);
}

DgElement affine_element(const RefTriangle& ref, Eigen::Vector2d A, Eigen::Vector2d B,
                         Eigen::Vector2d C) {
  VectorXd x1(ref.n_nodes), x2(ref.n_nodes);
  for (int i = 0; i < ref.n_nodes; ++i) {
    const double l0 = -(ref.r(i) + ref.s(i)) / 2, l1 = (1 + ref.r(i)) / 2, l2 = (1 + ref.s(i)) / 2;
    Eigen::Vector2d x = l0 * A + l1 * B + l2 * C;
    x1(i) = x.x();
    x2(i) = x.y();
  }
  return build_dg_element(ref, x1, x2);
}

}  // namespace

TEST(DgReference, LinearElementBasics) {
  const RefTriangle& ref = ref_triangle(1);
  EXPECT_EQ(ref.n_nodes, 3);
  EXPECT_LE((ref.D1 * VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((ref.D2 * VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(build_ref_triangle(6), Error);
}

TEST(DgReference, CubatureAndEdgeQuadrature) {
  for (int q = 1; q <= 5; ++q) {
    const RefTriangle& ref = ref_triangle(q);
    EXPECT_GE(ref.cubature_degree, 2 * q + 2);
    EXPECT_GT(ref.cub_w.minCoeff(), 0.0);
    EXPECT_GT(ref.edge_w.minCoeff(), 0.0);
    EXPECT_NEAR(ref.cub_w.sum(), 2.0, 1e-14);
    for (int a = 0; a <= ref.cubature_degree; ++a)
      for (int b = 0; a + b <= ref.cubature_degree; ++b) {
        double s = 0.0;
        for (int k = 0; k < ref.cub_w.size(); ++k)
          s += ref.cub_w(k) * std::pow(ref.cub_r(k), a) * std::pow(ref.cub_s(k), b);
        EXPECT_NEAR(s, triangle_monomial(a, b), 1e-13) << "q=" << q << " a=" << a << " b=" << b;
      }
    for (int d = 0; d <= 2 * q + 3; ++d) {
      double s = 0.0;
      for (int k = 0; k < ref.n_edge_points(); ++k) s += ref.edge_w(k) * std::pow(ref.edge_t(k), d);
      EXPECT_NEAR(s, monomial_integral(d), 1e-14);
    }
    for (int K = 0; K < 3; ++K) EXPECT_EQ(static_cast<int>(ref.edge_nodes[K].size()), q + 1);
  }
}

TEST(DgReference, DifferentiationIsExactOnPolynomials) {
  for (int q = 1; q <= 5; ++q) {
    const RefTriangle& ref = ref_triangle(q);
    for (int a = 0; a <= q; ++a)
      for (int b = 0; a + b <= q; ++b) {
        VectorXd u(ref.n_nodes), ur(ref.n_nodes), us(ref.n_nodes);
        for (int i = 0; i < ref.n_nodes; ++i) {
          const double r = ref.r(i), s = ref.s(i);
          u(i) = std::pow(r, a) * std::pow(s, b);
          ur(i) = a ? a * std::pow(r, a - 1) * std::pow(s, b) : 0.0;
          us(i) = b ? b * std::pow(r, a) * std::pow(s, b - 1) : 0.0;
        }
        EXPECT_LE((ref.D1 * u - ur).cwiseAbs().maxCoeff(), 1e-11) << q << a << b;
        EXPECT_LE((ref.D2 * u - us).cwiseAbs().maxCoeff(), 1e-11) << q << a << b;
        // interpolation to edge points is exact
        for (int K = 0; K < 3; ++K) {
          VectorXd e = ref.Pb[K] * u;
          for (int k = 0; k < ref.n_edge_points(); ++k) {
            double r, s;
            RefTriangle::edge_point(K, ref.edge_t(k), r, s);
            EXPECT_NEAR(e(k), std::pow(r, a) * std::pow(s, b), 1e-12);
          }
        }
      }
  }
}

TEST(DgElementTest, StraightElementLinearPressure) {
  for (int q = 1; q <= 4; ++q) {
    const RefTriangle& ref = ref_triangle(q);
    DgElement e = affine_element(ref, {0.1, -0.3}, {0.7, 0.0}, {0.2, 0.4});
    Material mat{2.0, 1.0};
    const int np = ref.n_nodes;
    VectorXd v1 = VectorXd::Zero(np), v2 = v1, p = e.x1, dv1(np), dv2(np), dp(np);
    std::array<Penalty, 3> pen;
    for (int K = 0; K < 3; ++K) {
      FaceTraces m = dg_edge_traces(e, ref, K, v1.data(), v2.data(), p.data());
      FaceTraces pl{m.p, -m.v};
      pen[K] = dg_dg_flux(m, pl, 1.0, mat);
    }
    dg_element_rhs(e, ref, mat, v1.data(), v2.data(), p.data(), pen, dv1.data(), dv2.data(),
                   dp.data());
    EXPECT_LE((dv1 + VectorXd::Constant(np, 0.5)).cwiseAbs().maxCoeff(), 1e-11) << q;
    EXPECT_LE(dv2.cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_LE(dp.cwiseAbs().maxCoeff(), 1e-11);
    // straight elements: outward normals are constant and unit
    for (int K = 0; K < 3; ++K)
      EXPECT_LE((e.n1[K].array() - e.n1[K](0)).abs().maxCoeff(), 1e-14);
  }
}

TEST(DgElementTest, ZeroStateZeroFluxes) {
  const RefTriangle& ref = ref_triangle(3);
  DgElement e = affine_element(ref, {0, 0}, {1, 0}, {0, 1});
  const int np = ref.n_nodes, nq = ref.n_edge_points();
  VectorXd z = VectorXd::Zero(np), dv1(np), dv2(np), dp(np);
  std::array<Penalty, 3> pen{Penalty::zero(nq), Penalty::zero(nq), Penalty::zero(nq)};
  dg_element_rhs(e, ref, Material{}, z.data(), z.data(), z.data(), pen, dv1.data(), dv2.data(),
                 dp.data());
  EXPECT_EQ(dv1.norm() + dv2.norm() + dp.norm(), 0.0);
  pen[1] = Penalty::zero(nq + 1);
  EXPECT_THROW(dg_element_rhs(e, ref, Material{}, z.data(), z.data(), z.data(), pen, dv1.data(),
                              dv2.data(), dp.data()),
               Error);
}

TEST(DgElementTest, EnergyRateIdentityOnCurvedElements) {
  std::mt19937 rng(7);
  for (int q = 1; q <= 4; ++q) {
    DgMesh mesh = build_dg_mesh(q, 4, 0);
    const RefTriangle& ref = mesh.ref();
    Material mat{1.3, 0.9};
    const int np = ref.n_nodes, nq = ref.n_edge_points();
    for (int ei : {0, 1, mesh.n_elements() - 1}) {
      const DgElement& e = mesh.elements[ei];
      VectorXd v1 = random_vector(np, rng), v2 = random_vector(np, rng), p = random_vector(np, rng);
      VectorXd dv1(np), dv2(np), dp(np);
      std::array<Penalty, 3> pen;
      double D = 0.0;
      for (int K = 0; K < 3; ++K) {
        pen[K] = Penalty{random_vector(nq, rng), random_vector(nq, rng)};
        D += edge_dissipation(ref.edge_w, e.sj[K],
                              dg_edge_traces(e, ref, K, v1.data(), v2.data(), p.data()), pen[K]);
      }
      dg_element_rhs(e, ref, mat, v1.data(), v2.data(), p.data(), pen, dv1.data(), dv2.data(),
                     dp.data());
      const double dE = mat.rho * (v1.dot(e.MJ * dv1) + v2.dot(e.MJ * dv2)) +
                        p.dot(e.MJ * dp) / mat.lambda;
      EXPECT_NEAR(dE, D, 1e-11 * (1.0 + std::abs(D))) << "q=" << q << " elem=" << ei;
      EXPECT_GT(dg_element_energy(e, mat, v1.data(), v2.data(), p.data()), 0.0);
    }
  }
}

TEST(DgFlux, ConsistencyAndUpwindValues) {
  Material mat;
  FaceTraces m{VectorXd::Constant(2, 0.4), VectorXd::Constant(2, 0.3)};
  FaceTraces p{VectorXd::Constant(2, 0.4), VectorXd::Constant(2, -0.3)};
  Penalty c = dg_dg_flux(m, p, 1.0, mat);
  EXPECT_NEAR(c.dp.norm() + c.dv.norm(), 0.0, 1e-15);
  // alpha = 1, Z = 1: p* - p = (p+ - p-)/2 + (v+ + v-)/2, v* - v = -(v+ + v-)/2 - (p+ - p-)/2
  FaceTraces a{VectorXd::Constant(1, 1.0), VectorXd::Constant(1, 2.0)};
  FaceTraces b{VectorXd::Constant(1, 3.0), VectorXd::Constant(1, 5.0)};
  Penalty u = dg_dg_flux(a, b, 1.0, mat);
  EXPECT_DOUBLE_EQ(u.dp(0), 1.0 + 3.5);
  EXPECT_DOUBLE_EQ(u.dv(0), -3.5 - 1.0);
}

TEST(DgFlux, TwoElementDissipation) {
  std::mt19937 rng(9);
  DgMesh mesh = build_dg_mesh(3, 2, 0);
  const RefTriangle& ref = mesh.ref();
  Material mat{1.0, 2.0};
  const int np = ref.n_nodes;
  int K = 0;
  while (mesh.links[0][K].kind != DgMesh::EdgeKind::Interior) ++K;
  const auto& link = mesh.links[0][K];
  const DgElement& A = mesh.elements[0];
  const DgElement& B = mesh.elements[link.neighbor];
  VectorXd a1 = random_vector(np, rng), a2 = random_vector(np, rng), ap = random_vector(np, rng);
  VectorXd b1 = random_vector(np, rng), b2 = random_vector(np, rng), bp = random_vector(np, rng);
  FaceTraces ta = dg_edge_traces(A, ref, K, a1.data(), a2.data(), ap.data());
  FaceTraces tb = dg_edge_traces(B, ref, link.neighbor_edge, b1.data(), b2.data(), bp.data());
  // neighbour points run in the opposite direction
  tb.p.reverseInPlace();
  tb.v.reverseInPlace();
  EXPECT_LE((A.sj[K] - B.sj[link.neighbor_edge].reverse()).cwiseAbs().maxCoeff(), 1e-12);
  for (double alpha : {0.0, 1.0}) {
    const double D = edge_dissipation(ref.edge_w, A.sj[K], ta, dg_dg_flux(ta, tb, alpha, mat)) +
                     edge_dissipation(ref.edge_w, A.sj[K], tb, dg_dg_flux(tb, ta, alpha, mat));
    VectorXd ws = ref.edge_w.cwiseProduct(A.sj[K]);
    VectorXd vs = ta.v + tb.v, pd = ta.p - tb.p;
    const double Z = mat.Z();
    const double expect = -alpha * Z / 2 * vs.dot(ws.cwiseProduct(vs)) -
                          alpha / (2 * Z) * pd.dot(ws.cwiseProduct(pd));
    EXPECT_NEAR(D, expect, 1e-13);
  }
}

TEST(DgCoupling, RoundTripAndDissipation) {
  std::mt19937 rng(13);
  Material mat{1.1, 0.9};
  for (int q = 1; q <= 4; ++q) {
    const RefTriangle& ref = ref_triangle(q);
    const int n = min_cells_projection(q) + 1;
    GlueParticipant fd;
    fd.pair = build_projection(build_sbp(q, n));
    std::vector<GlueParticipant> dg;
    const int edges = 3;
    for (int k = 0; k < edges; ++k) {
      GlueParticipant gp;
      gp.pair = dg_edge_projection(ref);
      gp.beta_lo = -1.0 + 2.0 * k / edges;
      gp.beta_hi = -1.0 + 2.0 * (k + 1) / edges;
      gp.reversed = true;
      dg.push_back(gp);
    }
    ComposedInterface ci = compose_to_common_glue({fd}, dg);
    for (const auto& pp : ci.plus) {
      EXPECT_NO_THROW(check_dg_projection(pp, ref));
      MatrixXd U(ref.n_edge_points(), q + 1);
      for (int j = 0; j < U.rows(); ++j)
        for (int d = 0; d <= q; ++d) U(j, d) = std::pow(ref.edge_t(j), d);
      EXPECT_LE((MatrixXd(pp.g2f * (pp.f2g * U)) - U).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE(pp.compatibility_residual(), 1e-12);
    }
    std::vector<InterfaceParticipant> m(1), p;
    m[0].pair = &ci.minus[0];
    m[0].sj = random_vector(n + 1, rng).cwiseAbs().array() + 0.5;
    m[0].traces = FaceTraces{random_vector(n + 1, rng), random_vector(n + 1, rng)};
    for (const auto& pp : ci.plus) {
      InterfaceParticipant ip;
      ip.pair = &pp;
      ip.dg = true;
      const int nq = ref.n_edge_points();
      ip.sj = random_vector(nq, rng).cwiseAbs().array() + 0.5;
      ip.traces = FaceTraces{random_vector(nq, rng), random_vector(nq, rng)};
      p.push_back(ip);
    }
    for (double alpha : {0.0, 1.0}) {
      auto pens = nonconforming_penalties(m, p, alpha, mat);
      double D = edge_dissipation(m[0].pair->source_norm, m[0].sj, m[0].traces, pens[0]);
      for (size_t k = 0; k < p.size(); ++k)
        D += edge_dissipation(ref.edge_w, p[k].sj, p[k].traces, pens[k + 1]);
      const double G = glue_dissipation(project_to_glue(m, p), ci.common.mass(), alpha, mat);
      EXPECT_NEAR(D, G, 1e-11 * (1.0 + std::abs(G))) << "q=" << q;
    }
  }
}

TEST(DgCoupling, GlueOrderTooLow) {
  const RefTriangle& ref = ref_triangle(2);
  ProjectionPair pp = dg_edge_projection(ref_triangle(1));
  // order-1 glue on a 4-point edge
  const int nq = ref.n_edge_points();
  MatrixXd G(nq, 2);
  for (int j = 0; j < nq; ++j) {
    G(j, 0) = 1.0;
    G(j, 1) = ref.edge_t(j);
  }
  pp.g2f = G.sparseView();
  pp.f2g = MatrixXd(pp.target.mass().cwiseInverse().asDiagonal() * G.transpose() *
                    ref.edge_w.asDiagonal())
               .sparseView();
  pp.source_norm = ref.edge_w;
  try {
    check_dg_projection(pp, ref);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GlueOrderTooLow);
  }
}

TEST(DgMeshTest, CountsAndRefinement) {
  int E, L;
  dg_mesh_resolution(5, 64, E, L);
  EXPECT_EQ(E, 11);
  EXPECT_EQ(L, 0);
  dg_mesh_resolution(2, 256, E, L);
  EXPECT_EQ(E, 22);
  EXPECT_EQ(L, 2);
  DgMesh m0 = build_dg_mesh(2, 6, 0), m1 = build_dg_mesh(2, 6, 1);
  EXPECT_EQ(m1.n_elements(), 4 * m0.n_elements());
  EXPECT_EQ(m0.interface_edges.size(), 6u);
  EXPECT_EQ(m1.interface_edges.size(), 12u);
  for (size_t k = 0; k + 1 < m1.interface_edges.size(); ++k)
    EXPECT_NEAR(m1.interface_edges[k].eta_hi, m1.interface_edges[k + 1].eta_lo, 1e-15);
  EXPECT_NEAR(m1.interface_edges.front().eta_lo, -1.0, 1e-15);
  EXPECT_NEAR(m1.interface_edges.back().eta_hi, 1.0, 1e-15);
  int curved = 0;
  for (const auto& e : m1.elements) curved += e.curved;
  EXPECT_EQ(curved, 12);
  // total area of the half domain: 1 - int c = 1
  double area = 0.0;
  for (const auto& e : m1.elements) area += e.MJ.sum();
  EXPECT_NEAR(area, 2.0, 1e-6);
}

TEST(DgMeshTest, CurvedEdgeArclength) {
  auto integrand = [](double x2) {
    const double d = 0.2 * std::numbers::pi * std::cos(std::numbers::pi * (x2 + 1.0));
    return std::sqrt(1.0 + d * d);
  };
  const double exact =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -1.0, 1.0, 15, 1e-14);
  for (int q : {2, 3, 4}) {
    double prev = 1.0;
    for (int level : {0, 1}) {
      DgMesh m = build_dg_mesh(q, 6, level);
      const RefTriangle& ref = m.ref();
      double len = 0.0;
      for (const auto& ie : m.interface_edges)
        len += ref.edge_w.dot(m.elements[ie.element].sj[ie.edge]);
      const double err = std::abs(len - exact);
      EXPECT_LT(err, 2e-3 * std::pow(0.5, q * level)) << "q=" << q << " level=" << level;
      if (level == 1) EXPECT_LT(err, prev / std::pow(2.0, q)) << "q=" << q;
      prev = err;
    }
  }
}
