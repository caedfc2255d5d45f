#include "sbpglue/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <lapacke.h>

#include "sbpglue/errors.hpp"

namespace sbpglue {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double ExactSolution::omega1() const { return k1 * std::sqrt(2.0); }
double ExactSolution::omega2() const { return k2 * std::sqrt(2.0); }

FieldValue ExactSolution::eval(double x1, double x2, double t) const {
  const double w1 = omega1(), w2 = omega2();
  const double c1 = std::cos(k1 * x1), s1 = std::sin(k1 * x1);
  const double c2 = std::cos(k1 * x2), s2 = std::sin(k1 * x2);
  const double C1 = std::cos(k2 * x1), S1 = std::sin(k2 * x1);
  const double C2 = std::cos(k2 * x2), S2 = std::sin(k2 * x2);
  FieldValue v;
  v.p = std::cos(w1 * t) * c1 * c2 + std::cos(w2 * t) * S1 * S2;
  v.v1 = k1 / w1 * std::sin(w1 * t) * s1 * c2 - k2 / w2 * std::sin(w2 * t) * C1 * S2;
  v.v2 = k1 / w1 * std::sin(w1 * t) * c1 * s2 - k2 / w2 * std::sin(w2 * t) * S1 * C2;
  return v;
}

FieldFunction ExactSolution::at(double t) const {
  ExactSolution e = *this;
  return [e, t](double x1, double x2) { return e.eval(x1, x2, t); };
}

VectorXd rk4_advance(const RhsFunction& f, VectorXd u, double dt, double t_final,
                     const StepObserver& observer, int* steps) {
  if (!(dt > 0.0)) fail(ErrorCode::ConfigParse, "time step must be positive");
  const int n = t_final > 0.0 ? static_cast<int>(std::ceil(t_final / dt - 1e-9)) : 0;
  const double h = n > 0 ? t_final / n : 0.0;
  VectorXd k1(u.size()), k2(u.size()), k3(u.size()), k4(u.size()), tmp(u.size());
  for (int s = 0; s < n; ++s) {
    f(u, k1);
    tmp = u + 0.5 * h * k1;
    f(tmp, k2);
    tmp = u + 0.5 * h * k2;
    f(tmp, k3);
    tmp = u + h * k3;
    f(tmp, k4);
    u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!u.allFinite())
      fail(ErrorCode::NonFiniteState, "state became non-finite at step " + std::to_string(s + 1));
    if (observer) observer(s + 1, (s + 1) * h, u);
  }
  if (steps) *steps = n;
  return u;
}

double compute_error(const CoupledSystem& sys, const VectorXd& u, double t,
                     const ExactSolution& exact) {
  VectorXd d = u - sys.sample(exact.at(t));
  return std::sqrt(std::max(0.0, sys.energy(d)));
}

double convergence_rate(double e_coarse, double e_fine, int n_coarse, int n_fine) {
  return (std::log(e_coarse) - std::log(e_fine)) / (std::log(n_fine) - std::log(n_coarse));
}

RunResult run_simulation(const SystemConfig& cfg, double t_final, double dt) {
  const auto t0 = std::chrono::steady_clock::now();
  CoupledSystem sys(cfg);
  ExactSolution exact;
  RunResult r;
  r.config = cfg;
  r.dofs = sys.size();
  r.t_final = t_final;
  r.dt = dt > 0.0 ? dt : sys.stable_dt();
  VectorXd u = sys.sample(exact.at(0.0));
  r.energy_initial = sys.energy(u);
  u = rk4_advance([&](const VectorXd& x, VectorXd& dx) { sys.rhs(x, dx); }, u, r.dt, t_final, {},
                  &r.steps);
  if (r.steps > 0) r.dt = t_final / r.steps;
  r.energy_final = sys.energy(u);
  r.error = compute_error(sys, u, t_final, exact);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<ConvergenceRow> convergence_study(
    SystemConfig cfg, const std::vector<int>& ns, double t_final,
    const std::function<void(const ConvergenceRow&)>& progress) {
  std::vector<ConvergenceRow> rows;
  for (int n : ns) {
    cfg.n = n;
    ConvergenceRow row;
    row.n = n;
    row.run = run_simulation(cfg, t_final);
    row.error = row.run.error;
    row.rate = rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                            : convergence_rate(rows.back().error, row.error, rows.back().n, n);
    rows.push_back(row);
    if (progress) progress(row);
  }
  return rows;
}

GlobalOperator assemble_global_operator(const CoupledSystem& sys, unsigned seed) {
  const int n = sys.size();
  if (n > kMaxGlobalDofs)
    fail(ErrorCode::SystemTooLarge, "global operator needs " + std::to_string(n) +
                                        " unknowns, limit is " + std::to_string(kMaxGlobalDofs));
  GlobalOperator g;
  g.A.resize(n, n);
  VectorXd e = VectorXd::Zero(n), col(n);
  for (int j = 0; j < n; ++j) {
    e(j) = 1.0;
    sys.rhs(e, col);
    g.A.col(j) = col;
    e(j) = 0.0;
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorXd a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a(i) = dist(rng);
    b(i) = dist(rng);
  }
  VectorXd fa, fb, fab;
  sys.rhs(a, fa);
  sys.rhs(b, fb);
  sys.rhs(a + b, fab);
  const double scale = std::max({fa.norm(), fb.norm(), 1.0});
  g.linearity_residual =
      std::max((fab - fa - fb).norm(), (g.A * a - fa).norm()) / scale;
  return g;
}

double Spectrum::max_re() const {
  return re.size() ? re.maxCoeff() : -std::numeric_limits<double>::infinity();
}

double Spectrum::max_abs_re() const { return re.size() ? re.cwiseAbs().maxCoeff() : 0.0; }

Spectrum eigenvalues(MatrixXd A) {
  const lapack_int n = static_cast<lapack_int>(A.rows());
  Spectrum s;
  s.re.resize(n);
  s.im.resize(n);
  if (n == 0) return s;
  lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, s.re.data(),
                                  s.im.data(), nullptr, 1, nullptr, 1);
  if (info != 0) fail(ErrorCode::SingularMass, "dgeev failed with info " + std::to_string(info));
  return s;
}

Spectrum operator_spectrum(const CoupledSystem& sys, const MatrixXd& A, bool energy_similarity) {
  if (!energy_similarity) return eigenvalues(A);
  const int n = sys.size();
  MatrixXd W(n, n);
  VectorXd e = VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    e(j) = 1.0;
    W.col(j) = sys.apply_energy_weight(e);
    e(j) = 0.0;
  }
  Eigen::LLT<MatrixXd> llt(W);
  if (llt.info() != Eigen::Success) fail(ErrorCode::SingularMass, "energy weight is not SPD");
  W.resize(0, 0);
  const MatrixXd L = llt.matrixL();
  // B = L^T A L^-T
  MatrixXd X = L.triangularView<Eigen::Lower>().solve(A.transpose()).transpose();
  MatrixXd B = L.transpose().triangularView<Eigen::Upper>() * X;
  return eigenvalues(std::move(B));
}

double max_energy_rate(const CoupledSystem& sys, const MatrixXd& A, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  VectorXd u(sys.size());
  for (int k = 0; k < samples; ++k) {
    for (int i = 0; i < u.size(); ++i) u(i) = dist(rng);
    worst = std::max(worst, sys.energy_product(u, A * u) / sys.energy_product(u, u));
  }
  return worst;
}

std::vector<EnergySample> energy_trace(const CoupledSystem& sys, double dt, double t_final,
                                       double interval) {
  if (!(interval > 0.0)) fail(ErrorCode::ConfigParse, "sampling interval must be positive");
  const int n = static_cast<int>(std::ceil(t_final / dt - 1e-9));
  const double h = t_final / std::max(n, 1);
  const int every = std::max(1, static_cast<int>(std::lround(interval / h)));
  std::vector<EnergySample> out;
  VectorXd u = sys.sample(ExactSolution{}.at(0.0));
  out.push_back({0.0, sys.energy(u)});
  rk4_advance([&](const VectorXd& x, VectorXd& dx) { sys.rhs(x, dx); }, u, h, t_final,
              [&](int step, double t, const VectorXd& v) {
                if (step % every == 0 || step == n) out.push_back({t, sys.energy(v)});
              });
  return out;
}

}  // namespace sbpglue
