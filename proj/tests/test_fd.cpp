#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sbpglue/errors.hpp"
#include "sbpglue/fd.hpp"

using namespace sbpglue;
using Eigen::VectorXd;

namespace {

struct State {
  VectorXd v1, v2, p;
  explicit State(int n) : v1(VectorXd::Zero(n)), v2(VectorXd::Zero(n)), p(VectorXd::Zero(n)) {}
};

VectorXd random_vector(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

FaceTraces random_traces(int n, std::mt19937& rng) {
  return FaceTraces{random_vector(n, rng), random_vector(n, rng)};
}

constexpr Face kFaces[] = {Face::West, Face::East, Face::South, Face::North};

}  // namespace

TEST(FdVolume, ZeroStateGivesZeroRhs) {
  Block b("b", paper_left_transform(), 2, 8, 10);
  State s(b.n_points()), d(b.n_points());
  d.v1.setOnes();
  rhs_volume(b, Material{}, s.v1.data(), s.v2.data(), s.p.data(), d.v1.data(), d.v2.data(),
             d.p.data());
  EXPECT_EQ(d.v1.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(d.v2.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(d.p.cwiseAbs().maxCoeff(), 0.0);
}

TEST(FdVolume, LinearPressureGradient) {
  for (int q = 1; q <= 4; ++q) {
    Block b("b", identity_transform(), q, 2 * min_cells_sbp(q), 2 * min_cells_sbp(q));
    Material mat{2.0, 3.0};
    State s(b.n_points()), d(b.n_points());
    s.p = b.metrics().x1;
    rhs_volume(b, mat, s.v1.data(), s.v2.data(), s.p.data(), d.v1.data(), d.v2.data(),
               d.p.data());
    for (int i = 0; i < b.n_points(); ++i) {
      EXPECT_NEAR(d.v1(i), -0.5, 1e-12) << "q=" << q;
      EXPECT_NEAR(d.v2(i), 0.0, 1e-12);
      EXPECT_NEAR(d.p(i), 0.0, 1e-12);
    }
  }
}

TEST(FdVolume, ManufacturedFieldConvergesOnCurvedBlock) {
  // p = sin(x1) cos(2 x2), v1 = cos(x1 + x2), v2 = x1 x2^2
  auto max_error = [](int q, int n) {
    Block b("b", paper_left_transform(), q, n, n);
    Material mat{1.0, 1.0};
    const auto& m = b.metrics();
    State s(b.n_points()), d(b.n_points());
    double err = 0.0;
    for (int i = 0; i < b.n_points(); ++i) {
      const double x = m.x1(i), y = m.x2(i);
      s.p(i) = std::sin(x) * std::cos(2 * y);
      s.v1(i) = std::cos(x + y);
      s.v2(i) = x * y * y;
    }
    rhs_volume(b, mat, s.v1.data(), s.v2.data(), s.p.data(), d.v1.data(), d.v2.data(),
               d.p.data());
    for (int i = 0; i < b.n_points(); ++i) {
      const double x = m.x1(i), y = m.x2(i);
      err = std::max(err, std::abs(d.v1(i) + std::cos(x) * std::cos(2 * y)));
      err = std::max(err, std::abs(d.v2(i) - 2 * std::sin(x) * std::sin(2 * y)));
      err = std::max(err, std::abs(d.p(i) - (std::sin(x + y) - 2 * x * y)));
    }
    return err;
  };
  for (int q = 1; q <= 3; ++q) {
    const double e1 = max_error(q, 32), e2 = max_error(q, 64);
    EXPECT_GT(std::log2(e1 / e2), q - 0.3) << "q=" << q << " e=" << e1 << "," << e2;
  }
}

TEST(FdPenalty, BoundaryExamples) {
  Material mat;
  FaceTraces zero{VectorXd::Zero(3), VectorXd::Ones(3)};
  Penalty a = boundary_penalty(zero, 1.0, mat);
  EXPECT_EQ(a.dp.norm(), 0.0);
  EXPECT_EQ(a.dv.norm(), 0.0);
  FaceTraces two{VectorXd::Constant(2, 2.0), VectorXd::Zero(2)};
  Penalty c = boundary_penalty(two, 0.0, mat);
  EXPECT_EQ(c.dv.norm(), 0.0);
  EXPECT_DOUBLE_EQ(c.dp(0), -2.0);
  Penalty u = boundary_penalty(two, 1.0, mat);
  EXPECT_DOUBLE_EQ(u.dv(1), 2.0);
  EXPECT_THROW(boundary_penalty(two, -0.1, mat), Error);
}

TEST(FdPenalty, ConformingExamples) {
  Material mat;
  FaceTraces m{VectorXd::Constant(3, 0.7), VectorXd::Constant(3, 0.2)};
  FaceTraces p{VectorXd::Constant(3, 0.7), VectorXd::Constant(3, -0.2)};
  Penalty cont = conforming_penalty(m, p, 1.0, mat);
  EXPECT_NEAR(cont.dp.norm(), 0.0, 1e-15);
  EXPECT_NEAR(cont.dv.norm(), 0.0, 1e-15);

  FaceTraces a{VectorXd::Zero(1), VectorXd::Zero(1)}, b{VectorXd::Ones(1), VectorXd::Zero(1)};
  EXPECT_DOUBLE_EQ(conforming_penalty(a, b, 0.0, mat).dp(0), 0.5);
  try {
    conforming_penalty(a, FaceTraces{VectorXd::Zero(2), VectorXd::Zero(2)}, 0.0, mat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
  try {
    conforming_penalty(a, b, -1.0, mat);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeAlpha);
  }
}

TEST(FdPenalty, ConformingDissipationQuadraticForm) {
  std::mt19937 rng(3);
  Material mat{1.3, 0.6};
  const double Z = mat.Z();
  for (double alpha : {0.0, 0.5, 1.0}) {
    const int n = 9;
    FaceTraces m = random_traces(n, rng), p = random_traces(n, rng);
    VectorXd w = random_vector(n, rng).cwiseAbs().array() + 0.1;
    VectorXd sj = random_vector(n, rng).cwiseAbs().array() + 0.5;
    const double D = edge_dissipation(w, sj, m, conforming_penalty(m, p, alpha, mat)) +
                     edge_dissipation(w, sj, p, conforming_penalty(p, m, alpha, mat));
    VectorXd ws = w.cwiseProduct(sj);
    VectorXd vs = m.v + p.v, pd = m.p - p.p;
    const double expect = -alpha * Z / 2 * vs.dot(ws.cwiseProduct(vs)) -
                          alpha / (2 * Z) * pd.dot(ws.cwiseProduct(pd));
    EXPECT_NEAR(D, expect, 1e-13 * (1 + std::abs(expect)));
    if (alpha == 0.0) EXPECT_NEAR(D, 0.0, 1e-14);
  }
}

TEST(FdPenalty, BoundaryDissipationIsNonPositive) {
  std::mt19937 rng(5);
  Material mat;
  FaceTraces tr = random_traces(7, rng);
  VectorXd w = VectorXd::Constant(7, 0.3), sj = VectorXd::Constant(7, 1.7);
  const double D = edge_dissipation(w, sj, tr, boundary_penalty(tr, 1.0, mat));
  EXPECT_NEAR(D, -1.0 / mat.Z() * tr.p.dot((w.cwiseProduct(sj)).cwiseProduct(tr.p)), 1e-14);
  EXPECT_LT(D, 0.0);
}

TEST(FdPenalty, WestFaceScatterPattern) {
  Block b("b", identity_transform(), 2, 8, 8);
  State d(b.n_points());
  Penalty pen = Penalty::zero(b.face_size(Face::West));
  pen.dp.setOnes();
  apply_face_penalty(b, Material{}, Face::West, pen, d.v1.data(), d.v2.data(), d.p.data());
  for (int k = 0; k <= 8; ++k)
    for (int l = 0; l <= 8; ++l) {
      const int i = b.index(k, l);
      if (k == 0) {
        EXPECT_GT(d.v1(i), 0.0);  // n1 = -1 on the west face
      } else {
        EXPECT_EQ(d.v1(i), 0.0);
      }
      EXPECT_EQ(d.v2(i), 0.0);
      EXPECT_EQ(d.p(i), 0.0);
    }
  EXPECT_THROW(apply_face_penalty(b, Material{}, Face::West, Penalty::zero(3), d.v1.data(),
                                  d.v2.data(), d.p.data()),
               Error);
}

TEST(FdEnergy, ConstantPressureOnSquare) {
  Block b("b", identity_transform(), 3, 12, 14);
  State s(b.n_points());
  EXPECT_EQ(block_energy(b, Material{}, s.v1.data(), s.v2.data(), s.p.data()), 0.0);
  s.p.setOnes();
  EXPECT_NEAR(block_energy(b, Material{}, s.v1.data(), s.v2.data(), s.p.data()), 2.0, 1e-13);
}

TEST(FdEnergy, RateIdentityOnRandomStates) {
  std::mt19937 rng(11);
  for (int q = 1; q <= 4; ++q) {
    const int n = min_cells_sbp(q) + 3;
    for (const char* name : {"paper-left", "right-top", "affine"}) {
      Block b("b", make_transform(name), q, n, n + 2);
      Material mat{1.4, 0.8};
      const int np = b.n_points();
      State s(np), d(np);
      s.v1 = random_vector(np, rng);
      s.v2 = random_vector(np, rng);
      s.p = random_vector(np, rng);
      rhs_volume(b, mat, s.v1.data(), s.v2.data(), s.p.data(), d.v1.data(), d.v2.data(),
                 d.p.data());
      double D = 0.0;
      for (Face f : kFaces) {
        FaceTraces tr = block_face_traces(b, f, s.v1.data(), s.v2.data(), s.p.data());
        const int m = b.face_size(f);
        Penalty pen{random_vector(m, rng), random_vector(m, rng)};
        apply_face_penalty(b, mat, f, pen, d.v1.data(), d.v2.data(), d.p.data());
        D += edge_dissipation(b.face_norm(f), b.metrics().face(f).sj, tr, pen);
      }
      VectorXd w = b.metrics().J.cwiseProduct(b.volume_norm());
      const double dE = mat.rho * (s.v1.dot(w.cwiseProduct(d.v1)) + s.v2.dot(w.cwiseProduct(d.v2))) +
                        s.p.dot(w.cwiseProduct(d.p)) / mat.lambda;
      EXPECT_NEAR(dE, D, 1e-11 * (std::abs(D) + 1.0)) << "q=" << q << " " << name;
    }
  }
}

namespace {

GlueParticipant fd_participant(int q, int n, double lo, double hi) {
  GlueParticipant gp;
  gp.pair = build_projection(build_sbp(q, n));
  gp.beta_lo = lo;
  gp.beta_hi = hi;
  return gp;
}

InterfaceParticipant make_ip(const ProjectionPair& pp, std::mt19937& rng, bool dg = false) {
  InterfaceParticipant ip;
  ip.pair = &pp;
  const int n = pp.n_points();
  ip.sj = random_vector(n, rng).cwiseAbs().array() + 0.5;
  ip.traces = random_traces(n, rng);
  ip.dg = dg;
  return ip;
}

}  // namespace

TEST(FdNonconforming, IdentityProjectionsReduceToConforming) {
  std::mt19937 rng(17);
  Material mat;
  const int n = 11;
  ProjectionPair id;
  id.f2g = VectorXd::Ones(n).asDiagonal().toDenseMatrix().sparseView();
  id.g2f = id.f2g;
  id.source_norm = VectorXd::Ones(n);
  id.delta = 1.0;
  id.target.breakpoints = {-1.0, 1.0};
  id.target.order = {n - 1};
  InterfaceParticipant m = make_ip(id, rng), p = make_ip(id, rng);
  p.sj = m.sj;
  for (double alpha : {0.0, 1.0}) {
    auto pens = nonconforming_penalties({m}, {p}, alpha, mat);
    Penalty cm = conforming_penalty(m.traces, p.traces, alpha, mat);
    Penalty cp = conforming_penalty(p.traces, m.traces, alpha, mat);
    EXPECT_LE((pens[0].dp - cm.dp).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((pens[0].dv - cm.dv).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((pens[1].dp - cp.dp).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((pens[1].dv - cp.dv).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(FdNonconforming, ZeroTracesGiveZeroPenalties) {
  std::mt19937 rng(1);
  auto ci = compose_to_common_glue({fd_participant(2, 16, -1, 1)}, {fd_participant(2, 32, -1, 1)});
  InterfaceParticipant m = make_ip(ci.minus[0], rng), p = make_ip(ci.plus[0], rng);
  m.traces = FaceTraces{VectorXd::Zero(17), VectorXd::Zero(17)};
  p.traces = FaceTraces{VectorXd::Zero(33), VectorXd::Zero(33)};
  for (const auto& pen : nonconforming_penalties({m}, {p}, 1.0, Material{})) {
    EXPECT_EQ(pen.dp.norm(), 0.0);
    EXPECT_EQ(pen.dv.norm(), 0.0);
  }
}

TEST(FdNonconforming, DissipationMatchesGlueQuadraticForm) {
  std::mt19937 rng(23);
  Material mat{1.2, 0.7};
  struct Case {
    std::vector<GlueParticipant> minus, plus;
  };
  std::vector<std::pair<int, Case>> cases;
  for (int q = 1; q <= 4; ++q) {
    const int n = min_cells_projection(q) + 2;
    cases.push_back({q, {{fd_participant(q, n, -1, 1)}, {fd_participant(q, 2 * n, -1, 1)}}});
    cases.push_back({q, {{fd_participant(q, n, -1, 1)}, {fd_participant(q, 2 * n + 1, -1, 1)}}});
    cases.push_back({q,
                     {{fd_participant(q, 2 * n, -1, 1)},
                      {fd_participant(q, n, -1, 0), fd_participant(q, n + 1, 0, 1)}}});
  }
  for (auto& [q, c] : cases) {
    ComposedInterface ci = compose_to_common_glue(c.minus, c.plus);
    std::vector<InterfaceParticipant> m, p;
    for (const auto& pp : ci.minus) m.push_back(make_ip(pp, rng));
    for (const auto& pp : ci.plus) p.push_back(make_ip(pp, rng));
    for (double alpha : {0.0, 1.0}) {
      auto pens = nonconforming_penalties(m, p, alpha, mat);
      double D = 0.0;
      int k = 0;
      for (const auto* side : {&m, &p})
        for (const auto& ip : *side) {
          D += edge_dissipation(ip.pair->source_norm, ip.sj, ip.traces, pens[k++]);
        }
      const double G = glue_dissipation(project_to_glue(m, p), ci.common.mass(), alpha, mat);
      EXPECT_NEAR(D, G, 1e-11 * (1.0 + std::abs(G))) << "q=" << q << " alpha=" << alpha;
      if (alpha == 0.0) EXPECT_NEAR(D, 0.0, 1e-11);
      EXPECT_LE(G, 1e-14);
    }
  }
}
