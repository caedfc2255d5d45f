#include "sbpglue/system.hpp"

#include <cmath>
#include <limits>

#include "sbpglue/errors.hpp"

namespace sbpglue {

using Eigen::VectorXd;

namespace {

struct ScenarioName {
  Scenario s;
  const char* name;
};
constexpr ScenarioName kScenarios[] = {
    {Scenario::TwoBlockConforming, "two-block-conforming"},
    {Scenario::TwoBlockNested, "two-block-nested"},
    {Scenario::TwoBlockUnnested, "two-block-unnested"},
    {Scenario::ThreeBlockNested, "three-block-nested"},
    {Scenario::ThreeBlockUnnested, "three-block-unnested"},
    {Scenario::SbpDg, "sbp-dg"},
};

constexpr Face kFaces[] = {Face::West, Face::East, Face::South, Face::North};

const SbpOperator1D& face_op(const Block& b, Face f) {
  return (f == Face::West || f == Face::East) ? b.op2() : b.op1();
}

FaceTraces reversed(const FaceTraces& t) { return FaceTraces{t.p.reverse(), t.v.reverse()}; }

double conforming_form(const VectorXd& w, const VectorXd& sj, const FaceTraces& m,
                       const FaceTraces& p, double alpha, const Material& mat) {
  VectorXd ws = w.cwiseProduct(sj);
  VectorXd vs = m.v + p.v, pd = m.p - p.p;
  const double Z = mat.Z();
  return -alpha * Z / 2 * vs.dot(ws.cwiseProduct(vs)) -
         alpha / (2 * Z) * pd.dot(ws.cwiseProduct(pd));
}

}  // namespace

const char* scenario_name(Scenario s) {
  for (const auto& e : kScenarios)
    if (e.s == s) return e.name;
  return "?";
}

Scenario parse_scenario(const std::string& name) {
  for (const auto& e : kScenarios)
    if (name == e.name) return e.s;
  fail(ErrorCode::ConfigParse, "unknown scenario '" + name + "'");
}

std::vector<Scenario> all_scenarios() {
  std::vector<Scenario> out;
  for (const auto& e : kScenarios) out.push_back(e.s);
  return out;
}

CoupledSystem::~CoupledSystem() = default;

CoupledSystem::CoupledSystem(const SystemConfig& cfg) : cfg_(cfg) {
  cfg_.material.validate();
  if (cfg_.alpha < 0.0) fail(ErrorCode::NegativeAlpha, "alpha must be non-negative");
  const int N = cfg_.n;
  if (N < 2 || N % 2 != 0) fail(ErrorCode::GridTooSmall, "N must be even and at least 2");
  add_block("left", paper_left_transform(), N / 2, N);
  const FaceRef east{0, Face::East};

  switch (cfg_.scenario) {
    case Scenario::TwoBlockConforming:
      add_block("right", paper_right_transform(), N / 2, N);
      conforming_.push_back({east, {1, Face::West}});
      break;
    case Scenario::TwoBlockNested:
    case Scenario::TwoBlockUnnested: {
      const int m = cfg_.scenario == Scenario::TwoBlockNested ? 2 * N : 2 * N + 1;
      add_block("right", paper_right_transform(), N, m);
      add_nonconforming({east}, {{-1.0, 1.0}}, {{1, Face::West}}, {{-1.0, 1.0}}, false);
      break;
    }
    case Scenario::ThreeBlockNested:
    case Scenario::ThreeBlockUnnested: {
      const int m = cfg_.scenario == Scenario::ThreeBlockNested ? N : N + 1;
      add_block("right-bottom", right_bottom_transform(), N, m);
      add_block("right-top", right_top_transform(), N, m);
      add_nonconforming({east}, {{-1.0, 1.0}}, {{1, Face::West}, {2, Face::West}},
                        {{-1.0, 0.0}, {0.0, 1.0}}, false);
      conforming_.push_back({{1, Face::North}, {2, Face::South}});
      break;
    }
    case Scenario::SbpDg: {
      mesh_ = std::make_unique<DgMesh>(dg_mesh_for_resolution(cfg_.q, N));
      add_nonconforming({east}, {{-1.0, 1.0}}, {}, {}, true);
      break;
    }
  }

  for (int b = 0; b < n_blocks(); ++b)
    for (Face f : kFaces) {
      bool used = false;
      auto is = [&](const FaceRef& r) { return r.block == b && r.face == f; };
      for (const auto& c : conforming_) used = used || is(c.a) || is(c.b);
      for (const auto& nc : nonconforming_) {
        for (const auto& r : nc.minus) used = used || is(r);
        for (const auto& r : nc.plus) used = used || is(r);
      }
      if (!used) boundaries_.push_back({b, f});
    }
  finish_layout();
}

void CoupledSystem::add_block(const std::string& name, const Transform& t, int n1, int n2) {
  blocks_.push_back(std::make_unique<Block>(name, t, cfg_.q, n1, n2));
}

void CoupledSystem::add_nonconforming(std::vector<FaceRef> minus,
                                      std::vector<std::pair<double, double>> minus_range,
                                      std::vector<FaceRef> plus,
                                      std::vector<std::pair<double, double>> plus_range,
                                      bool plus_dg) {
  auto fd_side = [&](const std::vector<FaceRef>& refs,
                     const std::vector<std::pair<double, double>>& range) {
    std::vector<GlueParticipant> out;
    for (size_t k = 0; k < refs.size(); ++k) {
      GlueParticipant gp;
      gp.pair = build_projection(face_op(*blocks_[refs[k].block], refs[k].face), cfg_.refine_glue);
      gp.beta_lo = range[k].first;
      gp.beta_hi = range[k].second;
      out.push_back(std::move(gp));
    }
    return out;
  };
  Nonconforming nc;
  nc.minus = std::move(minus);
  nc.plus = std::move(plus);
  nc.plus_dg = plus_dg;
  std::vector<GlueParticipant> gm = fd_side(nc.minus, minus_range);
  std::vector<GlueParticipant> gp;
  if (plus_dg) {
    const RefTriangle& ref = mesh_->ref();
    for (const auto& ie : mesh_->interface_edges) {
      GlueParticipant p;
      p.pair = dg_edge_projection(ref);
      p.beta_lo = ie.eta_lo;
      p.beta_hi = ie.eta_hi;
      p.reversed = ie.reversed;
      gp.push_back(std::move(p));
    }
  } else {
    gp = fd_side(nc.plus, plus_range);
  }
  nc.composed = compose_to_common_glue(gm, gp);
  if (plus_dg)
    for (const auto& pp : nc.composed.plus) check_dg_projection(pp, mesh_->ref());
  nonconforming_.push_back(std::move(nc));
}

void CoupledSystem::finish_layout() {
  int off = 0;
  for (const auto& b : blocks_) {
    block_offset_.push_back(off);
    off += 3 * b->n_points();
  }
  dg_offset_ = off;
  if (mesh_) off += 3 * mesh_->n_nodes();
  size_ = off;
}

FaceTraces CoupledSystem::fd_traces(const VectorXd& u, const FaceRef& f) const {
  const Block& b = *blocks_[f.block];
  const int np = b.n_points();
  const double* base = u.data() + block_offset_[f.block];
  return block_face_traces(b, f.face, base, base + np, base + 2 * np);
}

void CoupledSystem::dg_traces(const VectorXd& u, std::vector<std::array<FaceTraces, 3>>& tr) const {
  const RefTriangle& ref = mesh_->ref();
  const int np = ref.n_nodes;
  tr.resize(mesh_->n_elements());
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    const double* base = u.data() + dg_offset_ + 3 * np * e;
    for (int K = 0; K < 3; ++K)
      tr[e][K] = dg_edge_traces(mesh_->elements[e], ref, K, base, base + np, base + 2 * np);
  }
}

std::vector<InterfaceParticipant> CoupledSystem::participants(
    const Nonconforming& nc, const VectorXd& u, const std::vector<std::array<FaceTraces, 3>>& dg,
    bool minus) const {
  std::vector<InterfaceParticipant> out;
  const auto& pairs = minus ? nc.composed.minus : nc.composed.plus;
  if (!minus && nc.plus_dg) {
    for (size_t k = 0; k < mesh_->interface_edges.size(); ++k) {
      const auto& ie = mesh_->interface_edges[k];
      InterfaceParticipant ip;
      ip.pair = &pairs[k];
      ip.sj = mesh_->elements[ie.element].sj[ie.edge];
      ip.traces = dg[ie.element][ie.edge];
      ip.dg = true;
      out.push_back(std::move(ip));
    }
    return out;
  }
  const auto& refs = minus ? nc.minus : nc.plus;
  for (size_t k = 0; k < refs.size(); ++k) {
    InterfaceParticipant ip;
    ip.pair = &pairs[k];
    ip.sj = blocks_[refs[k].block]->metrics().face(refs[k].face).sj;
    ip.traces = fd_traces(u, refs[k]);
    out.push_back(std::move(ip));
  }
  return out;
}

void CoupledSystem::rhs(const VectorXd& u, VectorXd& du) const {
  if (u.size() != size_) fail(ErrorCode::ShapeMismatch, "state vector has the wrong length");
  du.resize(size_);
  const Material& mat = cfg_.material;
  const double alpha = cfg_.alpha;
  auto ptrs = [&](int b, VectorXd& v) {
    const int np = blocks_[b]->n_points();
    double* base = v.data() + block_offset_[b];
    return std::array<double*, 3>{base, base + np, base + 2 * np};
  };
  auto apply = [&](const FaceRef& f, const Penalty& pen) {
    auto d = ptrs(f.block, du);
    apply_face_penalty(*blocks_[f.block], mat, f.face, pen, d[0], d[1], d[2]);
  };

  for (int b = 0; b < n_blocks(); ++b) {
    const int np = blocks_[b]->n_points();
    const double* s = u.data() + block_offset_[b];
    auto d = ptrs(b, du);
    rhs_volume(*blocks_[b], mat, s, s + np, s + 2 * np, d[0], d[1], d[2]);
  }
  for (const auto& f : boundaries_) apply(f, boundary_penalty(fd_traces(u, f), alpha, mat));
  for (const auto& c : conforming_) {
    FaceTraces a = fd_traces(u, c.a), b = fd_traces(u, c.b);
    apply(c.a, conforming_penalty(a, b, alpha, mat));
    apply(c.b, conforming_penalty(b, a, alpha, mat));
  }

  std::vector<std::array<FaceTraces, 3>> dgtr;
  if (mesh_) dg_traces(u, dgtr);
  std::vector<Penalty> dg_iface;
  for (const auto& nc : nonconforming_) {
    auto m = participants(nc, u, dgtr, true);
    auto p = participants(nc, u, dgtr, false);
    std::vector<Penalty> pens = nonconforming_penalties(m, p, alpha, mat);
    for (size_t k = 0; k < nc.minus.size(); ++k) apply(nc.minus[k], pens[k]);
    if (nc.plus_dg) {
      dg_iface.assign(pens.begin() + nc.minus.size(), pens.end());
    } else {
      for (size_t k = 0; k < nc.plus.size(); ++k) apply(nc.plus[k], pens[nc.minus.size() + k]);
    }
  }

  if (!mesh_) return;
  const RefTriangle& ref = mesh_->ref();
  const int np = ref.n_nodes;
  for (int e = 0; e < mesh_->n_elements(); ++e) {
    std::array<Penalty, 3> pen;
    for (int K = 0; K < 3; ++K) {
      const auto& link = mesh_->links[e][K];
      switch (link.kind) {
        case DgMesh::EdgeKind::Interior:
          pen[K] = dg_dg_flux(dgtr[e][K], reversed(dgtr[link.neighbor][link.neighbor_edge]), alpha,
                              mat);
          break;
        case DgMesh::EdgeKind::Boundary:
          pen[K] = boundary_penalty(dgtr[e][K], alpha, mat);
          break;
        case DgMesh::EdgeKind::Interface:
          pen[K] = dg_iface[link.interface_edge];
          break;
      }
    }
    const double* s = u.data() + dg_offset_ + 3 * np * e;
    double* d = du.data() + dg_offset_ + 3 * np * e;
    dg_element_rhs(mesh_->elements[e], ref, mat, s, s + np, s + 2 * np, pen, d, d + np,
                   d + 2 * np);
  }
}

VectorXd CoupledSystem::apply_energy_weight(const VectorXd& u) const {
  if (u.size() != size_) fail(ErrorCode::ShapeMismatch, "state vector has the wrong length");
  const Material& mat = cfg_.material;
  VectorXd w(size_);
  for (int b = 0; b < n_blocks(); ++b) {
    const int np = blocks_[b]->n_points();
    VectorXd jh = blocks_[b]->metrics().J.cwiseProduct(blocks_[b]->volume_norm());
    const int o = block_offset_[b];
    w.segment(o, np) = mat.rho * jh.cwiseProduct(u.segment(o, np));
    w.segment(o + np, np) = mat.rho * jh.cwiseProduct(u.segment(o + np, np));
    w.segment(o + 2 * np, np) = jh.cwiseProduct(u.segment(o + 2 * np, np)) / mat.lambda;
  }
  if (mesh_) {
    const int np = mesh_->ref().n_nodes;
    for (int e = 0; e < mesh_->n_elements(); ++e) {
      const auto& M = mesh_->elements[e].MJ;
      const int o = dg_offset_ + 3 * np * e;
      w.segment(o, np) = mat.rho * (M * u.segment(o, np));
      w.segment(o + np, np) = mat.rho * (M * u.segment(o + np, np));
      w.segment(o + 2 * np, np) = M * u.segment(o + 2 * np, np) / mat.lambda;
    }
  }
  return w;
}

double CoupledSystem::energy_product(const VectorXd& u, const VectorXd& w) const {
  return u.dot(apply_energy_weight(w));
}

double CoupledSystem::energy(const VectorXd& u) const { return 0.5 * energy_product(u, u); }

VectorXd CoupledSystem::sample(const FieldFunction& f) const {
  VectorXd u(size_);
  for (int b = 0; b < n_blocks(); ++b) {
    const auto& m = blocks_[b]->metrics();
    const int np = blocks_[b]->n_points();
    const int o = block_offset_[b];
    for (int i = 0; i < np; ++i) {
      FieldValue v = f(m.x1(i), m.x2(i));
      u(o + i) = v.v1;
      u(o + np + i) = v.v2;
      u(o + 2 * np + i) = v.p;
    }
  }
  if (mesh_) {
    const int np = mesh_->ref().n_nodes;
    for (int e = 0; e < mesh_->n_elements(); ++e) {
      const auto& el = mesh_->elements[e];
      const int o = dg_offset_ + 3 * np * e;
      for (int i = 0; i < np; ++i) {
        FieldValue v = f(el.x1(i), el.x2(i));
        u(o + i) = v.v1;
        u(o + np + i) = v.v2;
        u(o + 2 * np + i) = v.p;
      }
    }
  }
  return u;
}

double CoupledSystem::min_fd_spacing() const {
  double h = std::numeric_limits<double>::infinity();
  for (const auto& b : blocks_) h = std::min(h, b->min_spacing());
  return h;
}

double CoupledSystem::min_dg_edge() const {
  return mesh_ ? mesh_->min_edge() : std::numeric_limits<double>::infinity();
}

double CoupledSystem::stable_dt() const {
  const double c = cfg_.material.c();
  double dt = 0.25 * min_fd_spacing() / c;
  if (mesh_) dt = std::min(dt, 0.25 * min_dg_edge() / (c * cfg_.q * cfg_.q));
  return dt;
}

std::vector<InterfaceDissipation> CoupledSystem::interface_dissipation(const VectorXd& u) const {
  const Material& mat = cfg_.material;
  const double alpha = cfg_.alpha;
  std::vector<InterfaceDissipation> out;
  for (const auto& c : conforming_) {
    FaceTraces a = fd_traces(u, c.a), b = fd_traces(u, c.b);
    const Block& ba = *blocks_[c.a.block];
    const Block& bb = *blocks_[c.b.block];
    const VectorXd& w = ba.face_norm(c.a.face);
    InterfaceDissipation d;
    d.name = ba.name() + "." + face_name(c.a.face) + "|" + bb.name() + "." + face_name(c.b.face);
    d.computed = edge_dissipation(w, ba.metrics().face(c.a.face).sj, a, conforming_penalty(a, b, alpha, mat)) +
                 edge_dissipation(bb.face_norm(c.b.face), bb.metrics().face(c.b.face).sj, b,
                                  conforming_penalty(b, a, alpha, mat));
    d.expected = conforming_form(w, ba.metrics().face(c.a.face).sj, a, b, alpha, mat);
    out.push_back(d);
  }
  std::vector<std::array<FaceTraces, 3>> dgtr;
  if (mesh_) dg_traces(u, dgtr);
  for (const auto& nc : nonconforming_) {
    auto m = participants(nc, u, dgtr, true);
    auto p = participants(nc, u, dgtr, false);
    auto pens = nonconforming_penalties(m, p, alpha, mat);
    InterfaceDissipation d;
    d.name = nc.plus_dg ? "left.east|dg" : "left.east|right.west";
    size_t k = 0;
    for (const auto* side : {&m, &p})
      for (const auto& ip : *side) {
        const VectorXd& w = ip.dg ? mesh_->ref().edge_w : ip.pair->source_norm;
        d.computed += edge_dissipation(w, ip.sj, ip.traces, pens[k++]);
      }
    d.expected = glue_dissipation(project_to_glue(m, p), nc.composed.common.mass(), alpha, mat);
    out.push_back(d);
  }
  return out;
}

}  // namespace sbpglue
