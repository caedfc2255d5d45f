#include "sbpglue/glue.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "sbpglue/errors.hpp"
#include "sbpglue/poly.hpp"

namespace sbpglue {

int GlueSpace::size() const {
  int s = 0;
  for (int o : order) s += o + 1;
  return s;
}

int GlueSpace::offset(int k) const {
  int s = 0;
  for (int j = 0; j < k; ++j) s += order[j] + 1;
  return s;
}

Eigen::VectorXd GlueSpace::mass() const {
  Eigen::VectorXd m(size());
  int idx = 0;
  for (int k = 0; k < n_intervals(); ++k)
    for (int i = 0; i <= order[k]; ++i) m(idx++) = width(k) / (2.0 * i + 1.0);
  return m;
}

Eigen::VectorXd GlueSpace::project(const std::function<double(double)>& f) const {
  Eigen::VectorXd c(size());
  int idx = 0;
  for (int k = 0; k < n_intervals(); ++k) {
    const double a = breakpoints[k], w = width(k);
    auto ck = legendre_coefficients(
        order[k], [&](double s) { return f(a + 0.5 * (s + 1.0) * w); }, order[k] + 2);
    for (double v : ck) c(idx++) = v;
  }
  return c;
}

double GlueSpace::evaluate(const Eigen::VectorXd& coeffs, double eta) const {
  int k = static_cast<int>(std::upper_bound(breakpoints.begin(), breakpoints.end(), eta) -
                           breakpoints.begin()) - 1;
  k = std::clamp(k, 0, n_intervals() - 1);
  double s = 2.0 * (eta - breakpoints[k]) / width(k) - 1.0;
  auto P = legendre_all(order[k], s);
  double v = 0.0;
  int off = offset(k);
  for (int i = 0; i <= order[k]; ++i) v += coeffs(off + i) * P[i];
  return v;
}

GlueSpace build_glue_for_grid(int n_cells, int interior_order, double lo, double hi) {
  if (n_cells < 1) fail(ErrorCode::GridTooSmall, "glue needs at least one interval");
  if (interior_order < 1) fail(ErrorCode::UnsupportedOrder, "interior order must be >= 1");
  GlueSpace g;
  g.breakpoints.resize(n_cells + 1);
  for (int k = 0; k <= n_cells; ++k) g.breakpoints[k] = lo + (hi - lo) * k / n_cells;
  g.breakpoints[n_cells] = hi;
  g.order.assign(n_cells, interior_order - 1);
  return g;
}

double ProjectionPair::compatibility_residual() const {
  Eigen::VectorXd M = target.mass();
  SpMat lhs = delta * SpMat(g2f.transpose()) * source_norm.asDiagonal();
  SpMat rhs = M.asDiagonal() * f2g;
  Eigen::MatrixXd diff = Eigen::MatrixXd(lhs) - Eigen::MatrixXd(rhs);
  double mmax = M.size() ? M.cwiseAbs().maxCoeff() : 1.0;
  return diff.size() ? diff.cwiseAbs().maxCoeff() / mmax : 0.0;
}

// ---------------------------------------------------------------------------
// constraint system

ProjectionParams projection_params(int q) {
  static const int table[5][3] = {{1, 1, 1}, {2, 4, 5}, {3, 6, 8}, {4, 9, 12}, {5, 12, 16}};
  if (q < 1 || q > 5) fail(ErrorCode::UnsupportedOrder, "q must be in 1..5");
  ProjectionParams p;
  p.q = q;
  p.p_i = 2 * q;
  p.p_b = q;
  p.l = table[q - 1][0];
  p.s1 = table[q - 1][1];
  p.r = table[q - 1][2];
  p.n = p.p_i - 1;
  p.m = 2 * p.l;
  return p;
}

int ProjectionParams::n_c() const {
  return l * (n + 1) + p_i + p_i * (n + 1) + s1 * p_b + r * p_b * (n + 1);
}

int ProjectionParams::n_d() const { return m * (n + 1) + r * s1 * (n + 1); }

int min_cells_projection(int q) { return 2 * projection_params(q).r; }

namespace {

// modal coefficients of ((x)/L)^d on the unit interval [t, t+1]
std::vector<double> monomial_modes(int n, int d, double L, int t) {
  return legendre_coefficients(
      n, [&](double s) { return std::pow((t + 0.5 * (s + 1.0)) / L, d); }, n + 2);
}

}  // namespace

ConstraintSystem assemble_projection_constraints(int q) {
  ConstraintSystem sys;
  const ProjectionParams P = projection_params(q);
  sys.params = P;
  const auto& coef = sbp_coefficients(q);
  const int n1 = P.n + 1;
  const int nrow_norm = P.r + P.m + P.s1 + 2;
  sys.unit_norm.assign(nrow_norm, 1.0);
  for (int k = 0; k < coef.closure_width && k < nrow_norm; ++k) sys.unit_norm[k] = coef.norm[k];

  sys.A = Eigen::MatrixXd::Zero(P.n_c(), P.n_d());
  sys.rhs = Eigen::VectorXd::Zero(P.n_c());
  int row = 0;

  // symmetry: c[l-j][i] = (-1)^i c[l-1+j][i]
  for (int j = 1; j <= P.l; ++j)
    for (int i = 0; i <= P.n; ++i) {
      sys.A(row, sys.interior_index(P.l - j, i)) += 1.0;
      sys.A(row, sys.interior_index(P.l - 1 + j, i)) -= (i % 2 ? -1.0 : 1.0);
      ++row;
    }

  // interior g2f at x = 0 from intervals -l..l-1
  const double Li = P.l;
  for (int d = 0; d < P.p_i; ++d) {
    for (int jp = 0; jp < P.m; ++jp) {
      auto w = monomial_modes(P.n, d, Li, -P.l + jp);
      for (int i = 0; i <= P.n; ++i) sys.A(row, sys.interior_index(jp, i)) = w[i];
    }
    sys.rhs(row) = d == 0 ? 1.0 : 0.0;
    ++row;
  }

  // interior f2g on interval 0 from rows 1-l..l
  for (int d = 0; d < P.p_i; ++d) {
    auto w = monomial_modes(P.n, d, Li, 0);
    for (int i = 0; i <= P.n; ++i) {
      for (int k = 1 - P.l; k <= P.l; ++k)
        sys.A(row, sys.interior_index(P.l - k, i)) += (2.0 * i + 1.0) * std::pow(k / Li, d);
      sys.rhs(row) = w[i];
      ++row;
    }
  }

  // boundary g2f on rows 0..s from intervals 0..r-1
  const double Lb = P.r;
  for (int k = 0; k < P.s1; ++k)
    for (int d = 0; d < P.p_b; ++d) {
      for (int t = 0; t < P.r; ++t) {
        auto w = monomial_modes(P.n, d, Lb, t);
        for (int i = 0; i <= P.n; ++i) sys.A(row, sys.boundary_index(k, t, i)) = w[i];
      }
      sys.rhs(row) = std::pow(k / Lb, d);
      ++row;
    }

  // boundary f2g on intervals 0..r-1: boundary rows plus interior rows touching t
  for (int t = 0; t < P.r; ++t)
    for (int d = 0; d < P.p_b; ++d) {
      auto w = monomial_modes(P.n, d, Lb, t);
      for (int i = 0; i <= P.n; ++i) {
        const double s = 2.0 * i + 1.0;
        for (int k = 0; k < P.s1; ++k)
          sys.A(row, sys.boundary_index(k, t, i)) += s * sys.unit_norm[k] * std::pow(k / Lb, d);
        for (int j = P.s1; j <= t + P.l; ++j) {
          if (j - P.l > t || t > j + P.l - 1) continue;
          sys.A(row, sys.interior_index(t - (j - P.l), i)) +=
              s * sys.unit_norm[j] * std::pow(j / Lb, d);
        }
        sys.rhs(row) = w[i];
        ++row;
      }
    }
  (void)n1;
  return sys;
}

// ---------------------------------------------------------------------------
// assembly pattern shared by assembly and the refinement gradient

namespace {

struct PatternEntry {
  int row, col, unknown;
  double sign;
};

std::vector<PatternEntry> g2f_pattern(const ProjectionParams& P, int N) {
  std::vector<PatternEntry> pat;
  const int n1 = P.n + 1;
  const int nb = P.m * n1;
  for (int k = 0; k < P.s1; ++k)
    for (int t = 0; t < P.r; ++t)
      for (int i = 0; i <= P.n; ++i) {
        int u = nb + (k * P.r + t) * n1 + i;
        pat.push_back({k, t * n1 + i, u, 1.0});
        pat.push_back({N - k, (N - 1 - t) * n1 + i, u, i % 2 ? -1.0 : 1.0});
      }
  for (int k = P.s1; k <= N - P.s1; ++k)
    for (int jp = 0; jp < P.m; ++jp)
      for (int i = 0; i <= P.n; ++i)
        pat.push_back({k, (k - P.l + jp) * n1 + i, jp * n1 + i, 1.0});
  return pat;
}

Eigen::MatrixXd dense_g2f(const std::vector<PatternEntry>& pat, const Eigen::VectorXd& z,
                          int rows, int cols) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(rows, cols);
  for (const auto& e : pat) G(e.row, e.col) += e.sign * z(e.unknown);
  return G;
}

struct ClusterObjective {
  std::vector<PatternEntry> pat;
  int rows, cols;
  Eigen::VectorXd sqrtH, Minv;

  double eval(const Eigen::VectorXd& z, Eigen::VectorXd* grad) const {
    Eigen::MatrixXd G = dense_g2f(pat, z, rows, cols);
    Eigen::MatrixXd W = sqrtH.asDiagonal() * G;                 // H^{1/2} G
    Eigen::MatrixXd S = W * Minv.asDiagonal() * W.transpose();  // H^{1/2} G M^-1 G^T H^{1/2}
    Eigen::MatrixXd R = S - Eigen::MatrixXd::Identity(rows, rows);
    if (grad) {
      Eigen::MatrixXd Gbar = 4.0 * sqrtH.asDiagonal() * R * W * Minv.asDiagonal();
      grad->setZero(z.size());
      for (const auto& e : pat) (*grad)(e.unknown) += e.sign * Gbar(e.row, e.col);
    }
    return R.squaredNorm();
  }
};

class NullSpaceCost : public ceres::FirstOrderFunction {
 public:
  NullSpaceCost(const ClusterObjective* obj, Eigen::VectorXd z0, Eigen::MatrixXd basis)
      : obj_(obj), z0_(std::move(z0)), basis_(std::move(basis)) {}
  bool Evaluate(const double* y, double* cost, double* gradient) const override {
    Eigen::Map<const Eigen::VectorXd> ym(y, basis_.cols());
    Eigen::VectorXd z = z0_ + basis_ * ym;
    Eigen::VectorXd gz;
    *cost = obj_->eval(z, gradient ? &gz : nullptr);
    if (gradient) Eigen::Map<Eigen::VectorXd>(gradient, basis_.cols()) = basis_.transpose() * gz;
    return true;
  }
  int NumParameters() const override { return static_cast<int>(basis_.cols()); }

 private:
  const ClusterObjective* obj_;
  Eigen::VectorXd z0_;
  Eigen::MatrixXd basis_;
};

constexpr int kRefineCells = 64;

ClusterObjective make_objective(const ConstraintSystem& sys) {
  const auto& P = sys.params;
  const int N = std::max(kRefineCells, min_cells_projection(P.q));
  SbpOperator1D op = build_sbp(P.q, N);
  ClusterObjective obj;
  obj.pat = g2f_pattern(P, N);
  obj.rows = N + 1;
  obj.cols = N * (P.n + 1);
  obj.sqrtH = op.norm().cwiseSqrt();
  GlueSpace g = build_glue_for_grid(N, P.p_i);
  obj.Minv = g.mass().cwiseInverse();
  return obj;
}

}  // namespace

ProjectionStencil solve_projection_stencil(const ConstraintSystem& sys, bool refine) {
  ProjectionStencil st;
  st.params = sys.params;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(sys.A);
  st.rank = static_cast<int>(cod.rank());
  st.coeffs = cod.solve(sys.rhs);
  st.residual = (sys.A * st.coeffs - sys.rhs).cwiseAbs().maxCoeff();
  if (!(st.residual <= 1e-8))
    fail(ErrorCode::InconsistentConstraints,
         "projection constraints for q=" + std::to_string(sys.params.q) +
             " are inconsistent, residual " + std::to_string(st.residual));
  ClusterObjective obj = make_objective(sys);
  st.objective = obj.eval(st.coeffs, nullptr);
  if (!refine || st.rank >= sys.unknown_count()) return st;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(sys.A, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  Eigen::MatrixXd basis = svd.matrixV().rightCols(sys.unknown_count() - rank);

  ceres::GradientProblemSolver::Options opts;
  opts.line_search_direction_type = ceres::LBFGS;
  opts.max_num_iterations = 400;
  opts.logging_type = ceres::SILENT;
  opts.minimizer_progress_to_stdout = false;
  ceres::GradientProblem problem(new NullSpaceCost(&obj, st.coeffs, basis));
  std::vector<double> y(basis.cols(), 0.0);
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(opts, problem, y.data(), &summary);
  Eigen::VectorXd z = st.coeffs + basis * Eigen::Map<Eigen::VectorXd>(y.data(), y.size());
  double res = (sys.A * z - sys.rhs).cwiseAbs().maxCoeff();
  double f = obj.eval(z, nullptr);
  if (res <= 1e-10 && f < st.objective) {
    st.coeffs = z;
    st.residual = std::max(st.residual, res);
    st.objective = f;
  }
  st.refined = true;
  return st;
}

const ProjectionStencil& projection_stencil(int q, bool refine) {
  static std::mutex mu;
  static std::map<std::pair<int, bool>, std::unique_ptr<ProjectionStencil>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(q, refine);
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto st = std::make_unique<ProjectionStencil>(
        solve_projection_stencil(assemble_projection_constraints(q), refine));
    it = cache.emplace(key, std::move(st)).first;
  }
  return *it->second;
}

ProjectionPair assemble_projection(const ProjectionStencil& st, const SbpOperator1D& op) {
  const auto& P = st.params;
  if (op.boundary_order() != P.q)
    fail(ErrorCode::ShapeMismatch, "stencil order does not match the operator");
  const int N = op.n_cells();
  if (N < min_cells_projection(P.q))
    fail(ErrorCode::GridTooSmall, "projection for q=" + std::to_string(P.q) + " needs N >= " +
                                      std::to_string(min_cells_projection(P.q)));
  ProjectionPair pp;
  pp.target = build_glue_for_grid(N, P.p_i);
  pp.source_norm = op.norm();
  const int cols = N * (P.n + 1);
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : g2f_pattern(P, N))
    trip.emplace_back(e.row, e.col, e.sign * st.coeffs(e.unknown));
  pp.g2f.resize(N + 1, cols);
  pp.g2f.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd Minv = pp.target.mass().cwiseInverse();
  pp.f2g = Minv.asDiagonal() * SpMat(pp.g2f.transpose()) * pp.source_norm.asDiagonal();
  pp.f2g.makeCompressed();
  return pp;
}

ProjectionPair solve_projection(const ConstraintSystem& sys, const SbpOperator1D& op,
                                bool refine) {
  return assemble_projection(solve_projection_stencil(sys, refine), op);
}

ProjectionPair build_projection(const SbpOperator1D& op, bool refine) {
  return assemble_projection(projection_stencil(op.boundary_order(), refine), op);
}

double eigen_cluster_objective(const ProjectionPair& pp) {
  Eigen::MatrixXd G(pp.g2f);
  Eigen::VectorXd sh = pp.source_norm.cwiseSqrt();
  Eigen::MatrixXd W = sh.asDiagonal() * G;
  Eigen::MatrixXd S = W * pp.target.mass().cwiseInverse().asDiagonal() * W.transpose();
  return (S - Eigen::MatrixXd::Identity(S.rows(), S.cols())).squaredNorm();
}

ProjectionAccuracy projection_accuracy(const ProjectionPair& pp, const ProjectionParams& P) {
  ProjectionAccuracy acc;
  const int N = pp.n_points() - 1;
  const GlueSpace& g = pp.target;
  Eigen::VectorXd x(N + 1);
  for (int k = 0; k <= N; ++k) x(k) = -1.0 + 2.0 * k / N;
  const int n1 = P.n + 1;
  for (int d = 0; d < P.p_i; ++d) {
    auto f = [d](double t) { return std::pow(0.5 * t, d); };
    Eigen::VectorXd samples = x.unaryExpr(f);
    Eigen::VectorXd modes = g.project(f);
    Eigen::VectorXd eg = (pp.g2f * modes - samples).cwiseAbs();
    Eigen::VectorXd ef = (pp.f2g * samples - modes).cwiseAbs();
    for (int k = 0; k <= N; ++k) {
      bool interior = k >= P.s1 && k <= N - P.s1;
      if (interior) acc.g2f_interior = std::max(acc.g2f_interior, eg(k));
      if (d < P.p_b) acc.g2f_boundary = std::max(acc.g2f_boundary, eg(k));
    }
    for (int t = 0; t < N; ++t) {
      bool interior = t >= P.r && t <= N - 1 - P.r;
      double e = ef.segment(t * n1, n1).maxCoeff();
      if (interior) acc.f2g_interior = std::max(acc.f2g_interior, e);
      if (d < P.p_b) acc.f2g_boundary = std::max(acc.f2g_boundary, e);
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// glue to glue

GlueTransfer glue_to_glue(const GlueSpace& coarse, const GlueSpace& fine, double tol) {
  const double scale = std::max(1.0, std::abs(fine.breakpoints.back() - fine.breakpoints.front()));
  if (std::abs(coarse.breakpoints.front() - fine.breakpoints.front()) > tol * scale ||
      std::abs(coarse.breakpoints.back() - fine.breakpoints.back()) > tol * scale)
    fail(ErrorCode::NotNested, "glue spaces cover different ranges");
  for (double b : coarse.breakpoints) {
    bool found = false;
    for (double f : fine.breakpoints)
      if (std::abs(b - f) <= tol * scale) found = true;
    if (!found) fail(ErrorCode::NotNested, "coarse breakpoint missing from fine space");
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int f = 0; f < fine.n_intervals(); ++f) {
    const double e0 = fine.breakpoints[f], e1 = fine.breakpoints[f + 1];
    const double mid = 0.5 * (e0 + e1);
    int c = static_cast<int>(std::upper_bound(coarse.breakpoints.begin(),
                                              coarse.breakpoints.end(), mid) -
                             coarse.breakpoints.begin()) - 1;
    c = std::clamp(c, 0, coarse.n_intervals() - 1);
    if (fine.order[f] < coarse.order[c])
      fail(ErrorCode::NotNested, "fine order below coarse order");
    const double c0 = coarse.breakpoints[c], cw = coarse.width(c);
    for (int i = 0; i <= coarse.order[c]; ++i) {
      auto w = legendre_coefficients(
          fine.order[f],
          [&](double s) {
            double eta = e0 + 0.5 * (s + 1.0) * (e1 - e0);
            return legendre(i, 2.0 * (eta - c0) / cw - 1.0);
          },
          fine.order[f] + 1);
      for (int ip = 0; ip <= fine.order[f]; ++ip)
        if (std::abs(w[ip]) > 1e-15)
          trip.emplace_back(fine.offset(f) + ip, coarse.offset(c) + i, w[ip]);
    }
  }
  GlueTransfer t;
  t.a2b.resize(fine.size(), coarse.size());
  t.a2b.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd Ma = coarse.mass(), Mb = fine.mass();
  t.b2a = Ma.cwiseInverse().asDiagonal() * SpMat(t.a2b.transpose()) * Mb.asDiagonal();
  return t;
}

// ---------------------------------------------------------------------------
// composition onto the common glue

namespace {

void check_tiling(std::vector<const GlueParticipant*> side, double tol, const char* name) {
  if (side.empty()) fail(ErrorCode::PartitionMismatch, std::string(name) + " side is empty");
  std::sort(side.begin(), side.end(),
            [](auto* a, auto* b) { return a->beta_lo < b->beta_lo; });
  double at = -1.0;
  for (auto* p : side) {
    if (std::abs(p->beta_lo - at) > tol || !(p->beta_hi > p->beta_lo))
      fail(ErrorCode::PartitionMismatch,
           std::string(name) + " side does not tile [-1,1] at eta=" + std::to_string(at));
    at = p->beta_hi;
  }
  if (std::abs(at - 1.0) > tol)
    fail(ErrorCode::PartitionMismatch, std::string(name) + " side does not reach eta=1");
}

// own glue mapped to eta plus the signed permutation R taking own coefficients to it
struct MappedGlue {
  GlueSpace space;
  SpMat R;
};

MappedGlue map_to_eta(const GlueParticipant& p) {
  const GlueSpace& own = p.pair.target;
  const int ni = own.n_intervals();
  MappedGlue mg;
  auto to_eta = [&](double xi) { return p.beta_lo + 0.5 * (xi + 1.0) * (p.beta_hi - p.beta_lo); };
  std::vector<Eigen::Triplet<double>> trip;
  if (!p.reversed) {
    for (double b : own.breakpoints) mg.space.breakpoints.push_back(to_eta(b));
    mg.space.order = own.order;
    for (int k = 0; k < own.size(); ++k) trip.emplace_back(k, k, 1.0);
  } else {
    for (int k = ni; k >= 0; --k) mg.space.breakpoints.push_back(to_eta(-own.breakpoints[k]));
    for (int k = ni - 1; k >= 0; --k) mg.space.order.push_back(own.order[k]);
    for (int k = 0; k < ni; ++k) {
      int kk = ni - 1 - k;
      int off_new = 0;
      for (int j = 0; j < kk; ++j) off_new += mg.space.order[j] + 1;
      for (int i = 0; i <= own.order[k]; ++i)
        trip.emplace_back(off_new + i, own.offset(k) + i, i % 2 ? -1.0 : 1.0);
    }
  }
  mg.space.breakpoints.front() = p.beta_lo;
  mg.space.breakpoints.back() = p.beta_hi;
  mg.R.resize(own.size(), own.size());
  mg.R.setFromTriplets(trip.begin(), trip.end());
  return mg;
}

}  // namespace

ComposedInterface compose_to_common_glue(const std::vector<GlueParticipant>& minus,
                                         const std::vector<GlueParticipant>& plus,
                                         double tol) {
  std::vector<const GlueParticipant*> m, p;
  for (auto& x : minus) m.push_back(&x);
  for (auto& x : plus) p.push_back(&x);
  check_tiling(m, 1e-12, "minus");
  check_tiling(p, 1e-12, "plus");

  std::vector<MappedGlue> mapped_m, mapped_p;
  std::vector<double> pts;
  for (auto& x : minus) mapped_m.push_back(map_to_eta(x));
  for (auto& x : plus) mapped_p.push_back(map_to_eta(x));
  for (auto* side : {&mapped_m, &mapped_p})
    for (auto& mg : *side)
      for (double b : mg.space.breakpoints) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  ComposedInterface out;
  for (double b : pts)
    if (out.common.breakpoints.empty() || b - out.common.breakpoints.back() > tol)
      out.common.breakpoints.push_back(b);
  out.common.breakpoints.front() = -1.0;
  out.common.breakpoints.back() = 1.0;
  const int nc = static_cast<int>(out.common.breakpoints.size()) - 1;
  out.common.order.assign(nc, 0);
  for (auto* side : {&mapped_m, &mapped_p})
    for (auto& mg : *side)
      for (int c = 0; c < nc; ++c) {
        double mid = 0.5 * (out.common.breakpoints[c] + out.common.breakpoints[c + 1]);
        const auto& bp = mg.space.breakpoints;
        if (mid < bp.front() || mid > bp.back()) continue;
        int k = static_cast<int>(std::upper_bound(bp.begin(), bp.end(), mid) - bp.begin()) - 1;
        k = std::clamp(k, 0, mg.space.n_intervals() - 1);
        out.common.order[c] = std::max(out.common.order[c], mg.space.order[k]);
      }

  auto compose = [&](const GlueParticipant& part, const MappedGlue& mg) {
    // sub-space of the common glue covering [beta_lo, beta_hi]
    GlueSpace sub;
    int first = -1;
    for (int c = 0; c < nc; ++c) {
      double mid = 0.5 * (out.common.breakpoints[c] + out.common.breakpoints[c + 1]);
      if (mid > part.beta_lo && mid < part.beta_hi) {
        if (first < 0) {
          first = c;
          sub.breakpoints.push_back(out.common.breakpoints[c]);
        }
        sub.breakpoints.push_back(out.common.breakpoints[c + 1]);
        sub.order.push_back(out.common.order[c]);
      }
    }
    GlueSpace own_eta = mg.space;
    own_eta.breakpoints.front() = sub.breakpoints.front();
    own_eta.breakpoints.back() = sub.breakpoints.back();
    GlueTransfer t = glue_to_glue(own_eta, sub, std::max(tol, 1e-12) * 10);
    const int off = out.common.offset(first);
    std::vector<Eigen::Triplet<double>> et;
    for (int i = 0; i < sub.size(); ++i) et.emplace_back(off + i, i, 1.0);
    SpMat E(out.common.size(), sub.size());
    E.setFromTriplets(et.begin(), et.end());
    ProjectionPair pp;
    pp.source_norm = part.pair.source_norm;
    pp.target = out.common;
    pp.delta = part.delta();
    pp.f2g = E * t.a2b * mg.R * part.pair.f2g;
    pp.g2f = part.pair.g2f * SpMat(mg.R.transpose()) * t.b2a * SpMat(E.transpose());
    pp.f2g.prune(0.0);
    pp.g2f.prune(0.0);
    return pp;
  };
  for (size_t k = 0; k < minus.size(); ++k) out.minus.push_back(compose(minus[k], mapped_m[k]));
  for (size_t k = 0; k < plus.size(); ++k) out.plus.push_back(compose(plus[k], mapped_p[k]));
  return out;
}

}  // namespace sbpglue
