#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sbpglue/system.hpp"

namespace sbpglue {

/// Standing-wave solution of the free-surface problem on [-1,1]^2 with rho = lambda = 1.
struct ExactSolution {
  double k1 = 1.5707963267948966;  // pi/2
  double k2 = 3.141592653589793;   // pi
  double omega1() const;
  double omega2() const;
  FieldValue eval(double x1, double x2, double t) const;
  FieldFunction at(double t) const;
};

using RhsFunction = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using StepObserver = std::function<void(int step, double t, const Eigen::VectorXd& u)>;

/// Classical RK4 with ceil(t_final/dt) equal steps; observer is called after
/// every step. Throws NonFiniteState when the state stops being finite.
Eigen::VectorXd rk4_advance(const RhsFunction& f, Eigen::VectorXd u, double dt, double t_final,
                            const StepObserver& observer = {}, int* steps = nullptr);

/// sqrt of the energy of (u - exact(t)).
double compute_error(const CoupledSystem& sys, const Eigen::VectorXd& u, double t,
                     const ExactSolution& exact = {});

/// (log e_c - log e_f) / (log n_f - log n_c).
double convergence_rate(double e_coarse, double e_fine, int n_coarse, int n_fine);

struct RunResult {
  SystemConfig config;
  int dofs = 0;
  double dt = 0.0;
  int steps = 0;
  double t_final = 0.0;
  double error = 0.0;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  double seconds = 0.0;
};

/// Exact initial data, RK4 to t_final, error against the exact solution.
/// dt <= 0 selects CoupledSystem::stable_dt.
RunResult run_simulation(const SystemConfig& cfg, double t_final, double dt = 0.0);

struct ConvergenceRow {
  int n = 0;
  double error = 0.0;
  double rate = 0.0;  // NaN on the coarsest row
  RunResult run;
};
std::vector<ConvergenceRow> convergence_study(
    SystemConfig cfg, const std::vector<int>& ns, double t_final,
    const std::function<void(const ConvergenceRow&)>& progress = {});

/// Dense A with du/dt = A u, assembled column by column from the RHS.
struct GlobalOperator {
  Eigen::MatrixXd A;
  double linearity_residual = 0.0;  // relative, on random vectors
};
constexpr int kMaxGlobalDofs = 40000;
GlobalOperator assemble_global_operator(const CoupledSystem& sys, unsigned seed = 1);

struct Spectrum {
  Eigen::VectorXd re, im;
  double max_re() const;
  double max_abs_re() const;
};
/// Eigenvalues by LAPACK dgeev. With energy_similarity, A is first replaced by
/// L^T A L^-T (W = L L^T the energy weight), which has the same spectrum and is
/// normal up to the dissipative part.
Spectrum operator_spectrum(const CoupledSystem& sys, const Eigen::MatrixXd& A,
                           bool energy_similarity = true);
Spectrum eigenvalues(Eigen::MatrixXd A);

/// max over random u of u^T W A u / u^T W u.
double max_energy_rate(const CoupledSystem& sys, const Eigen::MatrixXd& A, int samples = 8,
                       unsigned seed = 2);

struct EnergySample {
  double t = 0.0;
  double energy = 0.0;
};
/// Energy of the exact initial data integrated with RK4, sampled every
/// `interval` (rounded to whole steps).
std::vector<EnergySample> energy_trace(const CoupledSystem& sys, double dt, double t_final,
                                       double interval);

}  // namespace sbpglue
