#include "sbpglue/geometry.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sbpglue/errors.hpp"

namespace sbpglue {

using std::numbers::pi;

Transform identity_transform() { return affine_transform(1.0, 0.0, 0.0, 1.0); }

Transform affine_transform(double a11, double a12, double a21, double a22, double b1,
                           double b2) {
  Transform t;
  t.name = "affine";
  t.eval = [=](double xi1, double xi2) {
    TransformEval e;
    e.x1 = a11 * xi1 + a12 * xi2 + b1;
    e.x2 = a21 * xi1 + a22 * xi2 + b2;
    e.x1_xi1 = a11;
    e.x1_xi2 = a12;
    e.x2_xi1 = a21;
    e.x2_xi2 = a22;
    return e;
  };
  return t;
}

Transform paper_left_transform() {
  Transform t;
  t.name = "paper-left";
  t.eval = [](double xi1, double xi2) {
    const double s = std::sin(pi * (xi2 + 1.0)), c = std::cos(pi * (xi2 + 1.0));
    TransformEval e;
    e.x1 = (1.0 + xi1) / 10.0 * s - (1.0 - xi1) / 2.0;
    e.x2 = xi2;
    e.x1_xi1 = s / 10.0 + 0.5;
    e.x1_xi2 = (1.0 + xi1) / 10.0 * pi * c;
    e.x2_xi1 = 0.0;
    e.x2_xi2 = 1.0;
    return e;
  };
  return t;
}

Transform paper_right_transform() {
  Transform t;
  t.name = "paper-right";
  t.eval = [](double xi1, double xi2) {
    const double s = std::sin(pi * (xi2 + 1.0)), c = std::cos(pi * (xi2 + 1.0));
    TransformEval e;
    e.x1 = (1.0 - xi1) / 10.0 * s + (1.0 + xi1) / 2.0;
    e.x2 = xi2;
    e.x1_xi1 = -s / 10.0 + 0.5;
    e.x1_xi2 = (1.0 - xi1) / 10.0 * pi * c;
    e.x2_xi1 = 0.0;
    e.x2_xi2 = 1.0;
    return e;
  };
  return t;
}

namespace {

Transform half_of_right(const char* name, double shift) {
  Transform r = paper_right_transform();
  Transform t;
  t.name = name;
  t.eval = [r, shift](double xi1, double xi2) {
    TransformEval e = r.eval(xi1, 0.5 * (xi2 + shift));
    e.x1_xi2 *= 0.5;
    e.x2_xi2 *= 0.5;
    return e;
  };
  return t;
}

struct Registry {
  std::mutex mu;
  std::map<std::string, std::function<Transform()>> factories{
      {"identity", identity_transform},
      {"affine", [] { return affine_transform(2.0, 0.0, 0.0, 2.0); }},
      {"paper-left", paper_left_transform},
      {"paper-right", paper_right_transform},
      {"right-top", right_top_transform},
      {"right-bottom", right_bottom_transform},
  };
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Transform right_top_transform() { return half_of_right("right-top", 1.0); }
Transform right_bottom_transform() { return half_of_right("right-bottom", -1.0); }

void register_transform(const std::string& name, std::function<Transform()> factory) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  r.factories[name] = std::move(factory);
}

Transform make_transform(const std::string& name) {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  auto it = r.factories.find(name);
  if (it == r.factories.end()) fail(ErrorCode::UnknownTransform, "unknown transform '" + name + "'");
  Transform t = it->second();
  t.name = name;
  return t;
}

std::vector<std::string> transform_names() {
  auto& r = registry();
  std::lock_guard<std::mutex> lock(r.mu);
  std::vector<std::string> out;
  for (const auto& kv : r.factories) out.push_back(kv.first);
  return out;
}

const char* face_name(Face f) {
  switch (f) {
    case Face::West: return "west";
    case Face::East: return "east";
    case Face::South: return "south";
    case Face::North: return "north";
  }
  return "?";
}

MetricData metrics_for_block(const Transform& t, int n1, int n2) {
  if (n1 < 1 || n2 < 1) fail(ErrorCode::GridTooSmall, "block needs at least one cell per direction");
  MetricData m;
  m.n1 = n1;
  m.n2 = n2;
  const int np = m.n_points();
  for (auto* v : {&m.x1, &m.x2, &m.J, &m.a11, &m.a12, &m.a21, &m.a22}) v->resize(np);
  for (int k = 0; k <= n1; ++k)
    for (int l = 0; l <= n2; ++l) {
      const double xi1 = -1.0 + 2.0 * k / n1, xi2 = -1.0 + 2.0 * l / n2;
      TransformEval e = t.eval(xi1, xi2);
      const int i = k * (n2 + 1) + l;
      m.x1(i) = e.x1;
      m.x2(i) = e.x2;
      m.J(i) = e.jacobian();
      if (!(m.J(i) > 0.0)) {
        std::ostringstream os;
        os << "transform '" << t.name << "' has J=" << m.J(i) << " at (xi1,xi2)=(" << xi1 << ","
           << xi2 << ")";
        fail(ErrorCode::NonPositiveJacobian, os.str());
      }
      m.a11(i) = e.x2_xi2;
      m.a12(i) = -e.x1_xi2;
      m.a21(i) = -e.x2_xi1;
      m.a22(i) = e.x1_xi1;
    }
  // face xi_i = -1 / +1: S_J = |J grad xi_i|, n = -/+ J grad xi_i / S_J
  auto build = [&](Face f) {
    const bool along2 = f == Face::West || f == Face::East;
    const int n = along2 ? n2 + 1 : n1 + 1;
    const double sign = (f == Face::West || f == Face::South) ? -1.0 : 1.0;
    FaceMetrics& fm = m.faces[static_cast<int>(f)];
    fm.sj.resize(n);
    fm.n1.resize(n);
    fm.n2.resize(n);
    for (int j = 0; j < n; ++j) {
      int i;
      if (f == Face::West) i = j;
      else if (f == Face::East) i = n1 * (n2 + 1) + j;
      else if (f == Face::South) i = j * (n2 + 1);
      else i = j * (n2 + 1) + n2;
      const double g1 = along2 ? m.a11(i) : m.a21(i);
      const double g2 = along2 ? m.a12(i) : m.a22(i);
      const double s = std::hypot(g1, g2);
      if (!(s > 0.0))
        fail(ErrorCode::NonPositiveSurfaceJacobian,
             std::string("zero surface Jacobian on ") + face_name(f) + " face");
      fm.sj(j) = s;
      fm.n1(j) = sign * g1 / s;
      fm.n2(j) = sign * g2 / s;
    }
  };
  for (Face f : {Face::West, Face::East, Face::South, Face::North}) build(f);
  return m;
}

double metric_identity_residual(const Transform& t, const MetricData& m) {
  double r = 0.0;
  for (int k = 0; k <= m.n1; ++k)
    for (int l = 0; l <= m.n2; ++l) {
      TransformEval e = t.eval(-1.0 + 2.0 * k / m.n1, -1.0 + 2.0 * l / m.n2);
      const int i = k * (m.n2 + 1) + l;
      r = std::max({r, std::abs(m.a11(i) - e.x2_xi2), std::abs(m.a12(i) + e.x1_xi2),
                    std::abs(m.a21(i) + e.x2_xi1), std::abs(m.a22(i) - e.x1_xi1),
                    std::abs(m.a11(i) * m.a22(i) - m.a12(i) * m.a21(i) - m.J(i))});
    }
  return r;
}

}  // namespace sbpglue
