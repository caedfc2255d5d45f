#include "sbpglue/fd.hpp"

#include <cmath>
#include <limits>

#include "sbpglue/errors.hpp"

namespace sbpglue {

double Material::c() const { return std::sqrt(lambda / rho); }
double Material::Z() const { return std::sqrt(rho / lambda); }

void Material::validate() const {
  if (!(rho > 0.0) || !(lambda > 0.0))
    fail(ErrorCode::ConfigParse, "material parameters rho and lambda must be positive");
}

Block::Block(std::string name, const Transform& t, int q, int n1, int n2)
    : name_(std::move(name)),
      transform_(t),
      n1_(n1),
      n2_(n2),
      op1_(build_sbp(q, n1)),
      op2_(build_sbp(q, n2)),
      metrics_(metrics_for_block(t, n1, n2)) {
  H_.resize(n_points());
  for (int k = 0; k <= n1_; ++k)
    for (int l = 0; l <= n2_; ++l) H_(index(k, l)) = op1_.norm()(k) * op2_.norm()(l);
}

int Block::face_size(Face f) const {
  return (f == Face::West || f == Face::East) ? n2_ + 1 : n1_ + 1;
}

int Block::face_index(Face f, int j) const {
  switch (f) {
    case Face::West: return index(0, j);
    case Face::East: return index(n1_, j);
    case Face::South: return index(j, 0);
    case Face::North: return index(j, n2_);
  }
  return -1;
}

const Eigen::VectorXd& Block::face_norm(Face f) const {
  return (f == Face::West || f == Face::East) ? op2_.norm() : op1_.norm();
}

double Block::face_normal_weight(Face f) const {
  switch (f) {
    case Face::West: return op1_.norm()(0);
    case Face::East: return op1_.norm()(n1_);
    case Face::South: return op2_.norm()(0);
    case Face::North: return op2_.norm()(n2_);
  }
  return 0.0;
}

double Block::min_spacing() const {
  const auto& m = metrics_;
  double h = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n1_; ++k)
    for (int l = 0; l <= n2_; ++l) {
      const int i = index(k, l);
      if (k < n1_) {
        const int j = index(k + 1, l);
        h = std::min(h, std::hypot(m.x1(j) - m.x1(i), m.x2(j) - m.x2(i)));
      }
      if (l < n2_) {
        const int j = index(k, l + 1);
        h = std::min(h, std::hypot(m.x1(j) - m.x1(i), m.x2(j) - m.x2(i)));
      }
    }
  return h;
}

Penalty Penalty::zero(int n) {
  return Penalty{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
}

FaceTraces block_face_traces(const Block& b, Face f, const double* v1, const double* v2,
                             const double* p) {
  const int n = b.face_size(f);
  const FaceMetrics& fm = b.metrics().face(f);
  FaceTraces tr{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int j = 0; j < n; ++j) {
    const int i = b.face_index(f, j);
    tr.p(j) = p[i];
    tr.v(j) = fm.n1(j) * v1[i] + fm.n2(j) * v2[i];
  }
  return tr;
}

void rhs_volume(const Block& b, const Material& mat, const double* v1, const double* v2,
                const double* p, double* dv1, double* dv2, double* dp) {
  const MetricData& m = b.metrics();
  const int np = b.n_points();
  const int s2 = b.n2() + 1;
  const auto& op1 = b.op1();
  const auto& op2 = b.op2();
  // D1 acts along k (stride N2+1), D2 along l (stride 1)
  auto d1 = [&](const double* u, double* out) {
    for (int l = 0; l < s2; ++l) op1.apply(u + l, s2, out + l, s2);
  };
  auto d2 = [&](const double* u, double* out) {
    for (int k = 0; k <= b.n1(); ++k) op2.apply(u + k * s2, 1, out + k * s2, 1);
  };
  Eigen::VectorXd tmp(np), t1(np), t2(np);
  Eigen::Map<const Eigen::VectorXd> P(p, np), V1(v1, np), V2(v2, np);

  // velocity: -(1/(rho J)) [D1 (a1i p) + D2 (a2i p)]
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd& a1 = i == 0 ? m.a11 : m.a12;
    const Eigen::VectorXd& a2 = i == 0 ? m.a21 : m.a22;
    double* out = i == 0 ? dv1 : dv2;
    tmp = a1.cwiseProduct(P);
    d1(tmp.data(), t1.data());
    tmp = a2.cwiseProduct(P);
    d2(tmp.data(), t2.data());
    Eigen::Map<Eigen::VectorXd>(out, np) = -(t1 + t2).cwiseQuotient(m.J) / mat.rho;
  }

  // pressure: -(lambda/J) [a11 D1 v1 + a21 D2 v1 + a12 D1 v2 + a22 D2 v2]
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(np);
  d1(V1.data(), t1.data());
  d2(V1.data(), t2.data());
  acc += m.a11.cwiseProduct(t1) + m.a21.cwiseProduct(t2);
  d1(V2.data(), t1.data());
  d2(V2.data(), t2.data());
  acc += m.a12.cwiseProduct(t1) + m.a22.cwiseProduct(t2);
  Eigen::Map<Eigen::VectorXd>(dp, np) = -mat.lambda * acc.cwiseQuotient(m.J);
}

void apply_face_penalty(const Block& b, const Material& mat, Face f, const Penalty& pen,
                        double* dv1, double* dv2, double* dp) {
  const int n = b.face_size(f);
  if (pen.dp.size() != n || pen.dv.size() != n)
    fail(ErrorCode::ShapeMismatch, std::string("penalty length mismatch on ") + face_name(f));
  const FaceMetrics& fm = b.metrics().face(f);
  const double hn = b.face_normal_weight(f);
  const auto& J = b.metrics().J;
  for (int j = 0; j < n; ++j) {
    const int i = b.face_index(f, j);
    const double s = fm.sj(j) / (hn * J(i));
    dv1[i] -= s * fm.n1(j) * pen.dp(j) / mat.rho;
    dv2[i] -= s * fm.n2(j) * pen.dp(j) / mat.rho;
    dp[i] -= mat.lambda * s * pen.dv(j);
  }
}

Penalty boundary_penalty(const FaceTraces& tr, double alpha, const Material& mat) {
  if (alpha < 0.0) fail(ErrorCode::NegativeAlpha, "alpha must be non-negative");
  return Penalty{-tr.p, alpha * tr.p / mat.Z()};
}

Penalty conforming_penalty(const FaceTraces& minus, const FaceTraces& plus, double alpha,
                           const Material& mat) {
  if (alpha < 0.0) fail(ErrorCode::NegativeAlpha, "alpha must be non-negative");
  if (minus.p.size() != plus.p.size() || minus.v.size() != plus.v.size() ||
      minus.p.size() != minus.v.size())
    fail(ErrorCode::ShapeMismatch, "conforming traces differ in length");
  const double Z = mat.Z();
  Penalty pen;
  pen.dp = 0.5 * (plus.p - minus.p) + alpha * Z / 2.0 * (plus.v + minus.v);
  pen.dv = -0.5 * (plus.v + minus.v) - alpha / (2.0 * Z) * (plus.p - minus.p);
  return pen;
}

double edge_dissipation(const Eigen::VectorXd& weights, const Eigen::VectorXd& sj,
                        const FaceTraces& tr, const Penalty& pen) {
  Eigen::VectorXd ws = weights.cwiseProduct(sj);
  return -tr.v.dot(ws.cwiseProduct(pen.dp)) - pen.dv.dot(ws.cwiseProduct(tr.p)) -
         tr.v.dot(ws.cwiseProduct(tr.p));
}

double block_energy(const Block& b, const Material& mat, const double* v1, const double* v2,
                    const double* p) {
  const int np = b.n_points();
  Eigen::VectorXd w = b.metrics().J.cwiseProduct(b.volume_norm());
  Eigen::Map<const Eigen::VectorXd> V1(v1, np), V2(v2, np), P(p, np);
  return 0.5 * mat.rho * (V1.dot(w.cwiseProduct(V1)) + V2.dot(w.cwiseProduct(V2))) +
         0.5 / mat.lambda * P.dot(w.cwiseProduct(P));
}

namespace {

Eigen::VectorXd scale_of(const InterfaceParticipant& ip) {
  if (ip.pair == nullptr) fail(ErrorCode::ShapeMismatch, "participant without projection");
  const int n = ip.pair->n_points();
  if (ip.sj.size() != n || ip.traces.p.size() != n || ip.traces.v.size() != n)
    fail(ErrorCode::ShapeMismatch, "participant traces do not match its projection");
  if (!(ip.sj.minCoeff() > 0.0))
    fail(ErrorCode::NonPositiveSurfaceJacobian, "surface Jacobian must be positive");
  return (ip.sj / ip.pair->delta).cwiseSqrt();
}

}  // namespace

GlueValues project_to_glue(const std::vector<InterfaceParticipant>& minus,
                           const std::vector<InterfaceParticipant>& plus) {
  GlueValues g;
  auto side = [](const std::vector<InterfaceParticipant>& parts, Eigen::VectorXd& p,
                 Eigen::VectorXd& v) {
    if (parts.empty()) fail(ErrorCode::ShapeMismatch, "interface side has no participants");
    const int m = parts.front().pair->target.size();
    p = Eigen::VectorXd::Zero(m);
    v = Eigen::VectorXd::Zero(m);
    for (const auto& ip : parts) {
      Eigen::VectorXd w = scale_of(ip);
      if (ip.pair->target.size() != m)
        fail(ErrorCode::ShapeMismatch, "participants project to different glue spaces");
      p += ip.pair->f2g * w.cwiseProduct(ip.traces.p);
      v += ip.pair->f2g * w.cwiseProduct(ip.traces.v);
    }
  };
  side(minus, g.p_minus, g.v_minus);
  side(plus, g.p_plus, g.v_plus);
  if (g.p_minus.size() != g.p_plus.size())
    fail(ErrorCode::ShapeMismatch, "the two sides use different glue spaces");
  return g;
}

std::vector<Penalty> nonconforming_penalties(const std::vector<InterfaceParticipant>& minus,
                                             const std::vector<InterfaceParticipant>& plus,
                                             double alpha, const Material& mat) {
  if (alpha < 0.0) fail(ErrorCode::NegativeAlpha, "alpha must be non-negative");
  GlueValues g = project_to_glue(minus, plus);
  const double Z = mat.Z();
  // glue-level conforming formulas for each side
  auto glue_pen = [&](const Eigen::VectorXd& pm, const Eigen::VectorXd& vm,
                      const Eigen::VectorXd& pp, const Eigen::VectorXd& vp) {
    Penalty gp;
    gp.dp = 0.5 * (pp - pm) + alpha * Z / 2.0 * (vp + vm);
    gp.dv = -0.5 * (vp + vm) - alpha / (2.0 * Z) * (pp - pm);
    return gp;
  };
  Penalty gm = glue_pen(g.p_minus, g.v_minus, g.p_plus, g.v_plus);
  Penalty gpl = glue_pen(g.p_plus, g.v_plus, g.p_minus, g.v_minus);

  std::vector<Penalty> out;
  auto side = [&](const std::vector<InterfaceParticipant>& parts, const Penalty& gpen,
                  const Eigen::VectorXd& pbar, const Eigen::VectorXd& vbar) {
    for (const auto& ip : parts) {
      Eigen::VectorXd winv = scale_of(ip).cwiseInverse();
      const SpMat& G = ip.pair->g2f;
      Penalty pen;
      if (ip.dg) {
        // p* = w^-1 P_g2f pbar*, v* - v = w^-1 P_g2f (vbar* - vbar)
        pen.dp = winv.cwiseProduct(G * (pbar + gpen.dp)) - ip.traces.p;
        pen.dv = winv.cwiseProduct(G * gpen.dv);
      } else {
        pen.dp = winv.cwiseProduct(G * gpen.dp) +
                 0.5 * (winv.cwiseProduct(G * pbar) - ip.traces.p);
        pen.dv = winv.cwiseProduct(G * gpen.dv) +
                 0.5 * (winv.cwiseProduct(G * vbar) - ip.traces.v);
      }
      out.push_back(std::move(pen));
    }
  };
  side(minus, gm, g.p_minus, g.v_minus);
  side(plus, gpl, g.p_plus, g.v_plus);
  return out;
}

double glue_dissipation(const GlueValues& g, const Eigen::VectorXd& mass, double alpha,
                        const Material& mat) {
  const double Z = mat.Z();
  Eigen::VectorXd vs = g.v_minus + g.v_plus;
  Eigen::VectorXd pd = g.p_minus - g.p_plus;
  return -alpha * Z / 2.0 * vs.dot(mass.cwiseProduct(vs)) -
         alpha / (2.0 * Z) * pd.dot(mass.cwiseProduct(pd));
}

}  // namespace sbpglue
