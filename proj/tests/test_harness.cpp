#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sbpglue/errors.hpp"
#include "sbpglue/harness.hpp"

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

SystemConfig small_config(Scenario s, double alpha) {
  SystemConfig c;
  c.scenario = s;
  c.q = 2;
  c.n = 16;
  c.alpha = alpha;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

}  // namespace

TEST(Rk4, ScalarDecayOneStep) {
  VectorXd u(1);
  u << 2.0;
  int steps = 0;
  VectorXd out = rk4_advance([](const VectorXd& x, VectorXd& dx) { dx = -x; }, u, 0.1, 0.1, {},
                             &steps);
  EXPECT_EQ(steps, 1);
  EXPECT_NEAR(out(0), 2.0 * (1 - 0.1 + 0.005 - 1e-3 / 6 + 1e-4 / 24), 1e-15);
}

TEST(Rk4, ZeroRhsLeavesStateUnchanged) {
  std::mt19937 rng(3);
  VectorXd u = random_vector(7, rng);
  VectorXd out = rk4_advance([](const VectorXd& x, VectorXd& dx) { dx = VectorXd::Zero(x.size()); },
                             u, 0.01, 1.0);
  EXPECT_EQ((out - u).norm(), 0.0);
}

TEST(Rk4, FourthOrderInTime) {
  // u'' = -u as a first-order system
  auto f = [](const VectorXd& x, VectorXd& dx) {
    dx.resize(2);
    dx << x(1), -x(0);
  };
  VectorXd u0(2);
  u0 << 1.0, 0.0;
  double err[2];
  for (int k = 0; k < 2; ++k) {
    VectorXd u = rk4_advance(f, u0, 0.1 / (1 << k), 2.0);
    err[k] = std::hypot(u(0) - std::cos(2.0), u(1) + std::sin(2.0));
  }
  EXPECT_NEAR(std::log2(err[0] / err[1]), 4.0, 0.1);
}

TEST(Rk4, StepCountAndObserver) {
  std::vector<double> times;
  int steps = 0;
  rk4_advance([](const VectorXd& x, VectorXd& dx) { dx = x; }, VectorXd::Ones(1), 0.3, 1.0,
              [&](int, double t, const VectorXd&) { times.push_back(t); }, &steps);
  EXPECT_EQ(steps, 4);
  ASSERT_EQ(times.size(), 4u);
  EXPECT_NEAR(times.back(), 1.0, 1e-15);
}

TEST(Rk4, NonFiniteStateThrows) {
  auto f = [](const VectorXd& x, VectorXd& dx) {
    dx = x;
    dx(0) = std::nan("");
  };
  EXPECT_EQ(code_of([&] { rk4_advance(f, VectorXd::Ones(2), 0.1, 1.0); }),
            ErrorCode::NonFiniteState);
  EXPECT_EQ(code_of([&] { rk4_advance(f, VectorXd::Ones(2), 0.0, 1.0); }), ErrorCode::ConfigParse);
}

TEST(ExactSolutionTest, SatisfiesAcousticEquationsAndFreeSurface) {
  ExactSolution ex;
  const double h = 1e-5;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    const double x = u(rng), y = u(rng), t = 0.5 * (1 + u(rng));
    auto d_t = [&](auto get) { return (get(ex.eval(x, y, t + h)) - get(ex.eval(x, y, t - h))) / (2 * h); };
    const FieldValue xp = ex.eval(x + h, y, t), xm = ex.eval(x - h, y, t);
    const FieldValue yp = ex.eval(x, y + h, t), ym = ex.eval(x, y - h, t);
    const double dpdx = (xp.p - xm.p) / (2 * h), dpdy = (yp.p - ym.p) / (2 * h);
    const double div = (xp.v1 - xm.v1) / (2 * h) + (yp.v2 - ym.v2) / (2 * h);
    EXPECT_NEAR(d_t([](const FieldValue& f) { return f.v1; }), -dpdx, 1e-8);
    EXPECT_NEAR(d_t([](const FieldValue& f) { return f.v2; }), -dpdy, 1e-8);
    EXPECT_NEAR(d_t([](const FieldValue& f) { return f.p; }), -div, 1e-8);
    EXPECT_NEAR(ex.eval(1.0, y, t).p, 0.0, 1e-15);
    EXPECT_NEAR(ex.eval(-1.0, y, t).p, 0.0, 1e-15);
    EXPECT_NEAR(ex.eval(x, 1.0, t).p, 0.0, 1e-15);
    EXPECT_NEAR(ex.eval(x, -1.0, t).p, 0.0, 1e-15);
  }
  EXPECT_EQ(ex.eval(0.3, -0.2, 0.0).v1, 0.0);
}

TEST(ConvergenceRateTest, Examples) {
  EXPECT_NEAR(convergence_rate(1e-2, 1.25e-3, 64, 128), 3.0, 1e-14);
  EXPECT_NEAR(convergence_rate(1e-3, 1e-3, 16, 32), 0.0, 1e-14);
}

TEST(ScenarioNames, RoundTripAndErrors) {
  for (Scenario s : all_scenarios()) EXPECT_EQ(parse_scenario(scenario_name(s)), s);
  EXPECT_EQ(all_scenarios().size(), 6u);
  EXPECT_EQ(code_of([] { parse_scenario("four-block"); }), ErrorCode::ConfigParse);
}

TEST(CoupledSystemTest, ConstructionErrors) {
  SystemConfig c = small_config(Scenario::TwoBlockConforming, -1.0);
  EXPECT_EQ(code_of([&] { CoupledSystem s(c); }), ErrorCode::NegativeAlpha);
  c.alpha = 1.0;
  c.n = 17;
  EXPECT_EQ(code_of([&] { CoupledSystem s(c); }), ErrorCode::GridTooSmall);
  c.n = 16;
  c.q = 6;
  EXPECT_EQ(code_of([&] { CoupledSystem s(c); }), ErrorCode::UnsupportedOrder);
}

TEST(CoupledSystemTest, ErrorIsZeroForExactSamples) {
  ExactSolution ex;
  for (Scenario s : all_scenarios()) {
    CoupledSystem sys(small_config(s, 1.0));
    VectorXd u = sys.sample(ex.at(0.4));
    EXPECT_EQ(compute_error(sys, u, 0.4), 0.0) << scenario_name(s);
    EXPECT_GT(compute_error(sys, u, 0.5), 0.0) << scenario_name(s);
  }
}

TEST(CoupledSystemTest, ZeroStateHasZeroRhs) {
  for (Scenario s : all_scenarios()) {
    CoupledSystem sys(small_config(s, 1.0));
    VectorXd du;
    sys.rhs(VectorXd::Zero(sys.size()), du);
    ASSERT_EQ(du.size(), sys.size());
    EXPECT_EQ(du.cwiseAbs().maxCoeff(), 0.0) << scenario_name(s);
  }
}

TEST(CoupledSystemTest, StableTimeStep) {
  CoupledSystem fd(small_config(Scenario::TwoBlockNested, 1.0));
  EXPECT_DOUBLE_EQ(fd.stable_dt(), 0.25 * fd.min_fd_spacing());
  CoupledSystem dg(small_config(Scenario::SbpDg, 1.0));
  EXPECT_DOUBLE_EQ(dg.stable_dt(),
                   std::min(0.25 * dg.min_fd_spacing(), 0.25 * dg.min_dg_edge() / 4.0));
}

// d/dt E = u^T W A u: zero for the central coupling, non-positive for upwind.
TEST(CoupledSystemTest, SemiDiscreteEnergyRate) {
  std::mt19937 rng(11);
  for (Scenario s : all_scenarios()) {
    for (double alpha : {0.0, 1.0}) {
      CoupledSystem sys(small_config(s, alpha));
      for (int k = 0; k < 3; ++k) {
        VectorXd u = random_vector(sys.size(), rng), du;
        sys.rhs(u, du);
        const double rate = sys.energy_product(u, du), norm = sys.energy_product(u, u);
        if (alpha == 0.0)
          EXPECT_LE(std::abs(rate), 1e-11 * norm) << scenario_name(s);
        else
          EXPECT_LE(rate, 1e-11 * norm) << scenario_name(s);
      }
    }
  }
}

TEST(CoupledSystemTest, InterfaceDissipationMatchesQuadraticForms) {
  std::mt19937 rng(13);
  for (Scenario s : all_scenarios()) {
    for (double alpha : {0.0, 0.5, 1.0}) {
      CoupledSystem sys(small_config(s, alpha));
      VectorXd u = random_vector(sys.size(), rng);
      auto list = sys.interface_dissipation(u);
      ASSERT_FALSE(list.empty()) << scenario_name(s);
      for (const auto& d : list) {
        const double scale = std::max(1.0, std::abs(d.expected));
        EXPECT_LE(std::abs(d.computed - d.expected), 1e-11 * scale)
            << scenario_name(s) << " " << d.name << " alpha=" << alpha;
        EXPECT_LE(d.expected, 1e-14 * scale);
      }
    }
  }
}

TEST(GlobalOperatorTest, MatchesRhsAndIsLinear) {
  CoupledSystem sys(small_config(Scenario::SbpDg, 1.0));
  GlobalOperator g = assemble_global_operator(sys);
  EXPECT_LT(g.linearity_residual, 1e-13);
  std::mt19937 rng(17);
  VectorXd u = random_vector(sys.size(), rng), du;
  sys.rhs(u, du);
  EXPECT_LT((g.A * u - du).norm(), 1e-12 * du.norm());
}

TEST(GlobalOperatorTest, SystemTooLarge) {
  SystemConfig c = small_config(Scenario::TwoBlockConforming, 1.0);
  c.n = 128;
  CoupledSystem sys(c);
  ASSERT_GT(sys.size(), kMaxGlobalDofs);
  EXPECT_EQ(code_of([&] { assemble_global_operator(sys); }), ErrorCode::SystemTooLarge);
}

TEST(SpectrumTest, KnownMatrix) {
  MatrixXd A(3, 3);
  A << 0, -2, 0, 2, 0, 0, 0, 0, -1;
  Spectrum s = eigenvalues(A);
  EXPECT_NEAR(s.max_re(), 0.0, 1e-14);
  EXPECT_NEAR(s.max_abs_re(), 1.0, 1e-14);
  EXPECT_NEAR(s.im.cwiseAbs().maxCoeff(), 2.0, 1e-14);
}

TEST(SpectrumTest, ConformingSystemSignProperty) {
  for (double alpha : {0.0, 1.0}) {
    CoupledSystem sys(small_config(Scenario::TwoBlockConforming, alpha));
    GlobalOperator g = assemble_global_operator(sys);
    Spectrum s = operator_spectrum(sys, g.A);
    if (alpha == 0.0) EXPECT_LE(s.max_abs_re(), 1e-10);
    else EXPECT_LE(s.max_re(), 1e-10);
    EXPECT_LE(max_energy_rate(sys, g.A), 1e-11);
  }
}

// Without penalties, W A + A^T W reduces to the boundary terms: only pairs of
// boundary points couple, and only velocity with pressure.
TEST(SingleBlockOperator, SymmetricPartIsBoundaryOnly) {
  Block b("b", paper_left_transform(), 2, 12, 14);
  const Material mat;
  const int np = b.n_points(), n = 3 * np;
  MatrixXd A(n, n);
  VectorXd e = VectorXd::Zero(n), d(n);
  for (int j = 0; j < n; ++j) {
    e(j) = 1.0;
    rhs_volume(b, mat, e.data(), e.data() + np, e.data() + 2 * np, d.data(), d.data() + np,
               d.data() + 2 * np);
    A.col(j) = d;
    e(j) = 0.0;
  }
  VectorXd w(n);
  const VectorXd& J = b.metrics().J;
  for (int i = 0; i < np; ++i) {
    w(i) = w(np + i) = mat.rho * J(i) * b.volume_norm()(i);
    w(2 * np + i) = J(i) * b.volume_norm()(i) / mat.lambda;
  }
  MatrixXd S = w.asDiagonal() * A;
  S += S.transpose().eval();
  std::vector<bool> boundary(np, false);
  for (Face f : {Face::West, Face::East, Face::South, Face::North})
    for (int j = 0; j < b.face_size(f); ++j) boundary[b.face_index(f, j)] = true;
  double interior = 0.0, edge = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int pi = i % np, pj = j % np;
      const bool same_kind = (i < 2 * np) == (j < 2 * np);
      if (boundary[pi] && boundary[pj] && !same_kind) edge = std::max(edge, std::abs(S(i, j)));
      else interior = std::max(interior, std::abs(S(i, j)));
    }
  EXPECT_LE(interior, 1e-12);
  EXPECT_GT(edge, 1e-3);
}

TEST(EnergyTraceTest, CentralConservesUpwindDecays) {
  SystemConfig c = small_config(Scenario::TwoBlockUnnested, 0.0);
  CoupledSystem central(c);
  auto tr = energy_trace(central, 0.25 * central.stable_dt(), 0.2, 0.05);
  ASSERT_EQ(tr.size(), 5u);
  for (const auto& s : tr) EXPECT_LE(std::abs(s.energy - tr[0].energy), 1e-8 * tr[0].energy);
  c.alpha = 1.0;
  CoupledSystem upwind(c);
  tr = energy_trace(upwind, upwind.stable_dt(), 0.2, 0.05);
  for (size_t k = 1; k < tr.size(); ++k) EXPECT_LE(tr[k].energy, tr[k - 1].energy);
  EXPECT_EQ(code_of([&] { energy_trace(upwind, 0.01, 0.1, 0.0); }), ErrorCode::ConfigParse);
}

TEST(RunSimulationTest, ShortRunConvergesUnderRefinement) {
  SystemConfig c = small_config(Scenario::TwoBlockConforming, 1.0);
  RunResult coarse = run_simulation(c, 0.1);
  EXPECT_GT(coarse.steps, 0);
  EXPECT_NEAR(coarse.dt * coarse.steps, 0.1, 1e-14);
  EXPECT_LE(coarse.energy_final, coarse.energy_initial);
  c.n = 32;
  RunResult fine = run_simulation(c, 0.1);
  EXPECT_GT(convergence_rate(coarse.error, fine.error, 16, 32), 2.0);
}
