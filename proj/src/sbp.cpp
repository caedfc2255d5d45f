#include "sbpglue/sbp.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <string>

#include "sbpglue/errors.hpp"

namespace sbpglue {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::Io: return "Io";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::DataFile: return "DataFile";
    case ErrorCode::InconsistentConstraints: return "InconsistentConstraints";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::PartitionMismatch: return "PartitionMismatch";
    case ErrorCode::NonPositiveJacobian: return "NonPositiveJacobian";
    case ErrorCode::UnknownTransform: return "UnknownTransform";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NegativeAlpha: return "NegativeAlpha";
    case ErrorCode::NonPositiveSurfaceJacobian: return "NonPositiveSurfaceJacobian";
    case ErrorCode::UnresolvedFace: return "UnresolvedFace";
    case ErrorCode::SingularMass: return "SingularMass";
    case ErrorCode::GlueOrderTooLow: return "GlueOrderTooLow";
    case ErrorCode::QuadratureTooCoarse: return "QuadratureTooCoarse";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::SystemTooLarge: return "SystemTooLarge";
  }
  return "Unknown";
}

namespace {

std::vector<double> parse_numbers(std::istringstream& in, const std::string& line) {
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      fail(ErrorCode::DataFile, "bad number '" + tok + "' in line: " + line);
    out.push_back(v);
  }
  return out;
}

void check_section(const SbpCoefficients& c) {
  const int b = c.closure_width;
  if (c.interior_order != 2 * c.q || b < 1 || static_cast<int>(c.central.size()) != c.q ||
      static_cast<int>(c.norm.size()) != b || static_cast<int>(c.qblock.size()) != b)
    fail(ErrorCode::DataFile, "incomplete operator section q=" + std::to_string(c.q));
  for (const auto& row : c.qblock)
    if (static_cast<int>(row.size()) != b)
      fail(ErrorCode::DataFile, "qrow width mismatch for q=" + std::to_string(c.q));
}

}  // namespace

std::vector<SbpCoefficients> parse_sbp_coefficients(const char* text) {
  std::vector<SbpCoefficients> ops;
  std::istringstream src(text);
  std::string line;
  SbpCoefficients* cur = nullptr;
  while (std::getline(src, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream in(line);
    std::string key;
    in >> key;
    if (key == "[operator") {
      std::string rest;
      in >> rest;
      ops.emplace_back();
      cur = &ops.back();
      cur->q = std::atoi(rest.c_str());
      continue;
    }
    if (!cur) fail(ErrorCode::DataFile, "data before first section: " + line);
    if (key == "interior_order") {
      in >> cur->interior_order;
    } else if (key == "closure_width") {
      in >> cur->closure_width;
      cur->qblock.assign(cur->closure_width, {});
    } else if (key == "central") {
      cur->central = parse_numbers(in, line);
    } else if (key == "norm") {
      cur->norm = parse_numbers(in, line);
    } else if (key == "qrow") {
      int k = -1;
      in >> k;
      if (k < 0 || k >= static_cast<int>(cur->qblock.size()))
        fail(ErrorCode::DataFile, "qrow index out of range: " + line);
      cur->qblock[k] = parse_numbers(in, line);
    } else {
      fail(ErrorCode::DataFile, "unknown key '" + key + "'");
    }
  }
  for (const auto& c : ops) check_section(c);
  return ops;
}

const SbpCoefficients& sbp_coefficients(int q) {
  static std::once_flag once;
  static std::vector<SbpCoefficients> table;
  std::call_once(once, [] {
    auto ops = parse_sbp_coefficients(embedded_sbp_coefficients());
    table.resize(5);
    for (auto& c : ops)
      if (c.q >= 1 && c.q <= 5) table[c.q - 1] = std::move(c);
    for (int k = 1; k <= 5; ++k) {
      if (table[k - 1].q != k)
        fail(ErrorCode::DataFile, "missing operator q=" + std::to_string(k));
      // gate every table on a grid with a real interior
      SbpOperator1D op(table[k - 1], 4 * table[k - 1].closure_width + 4);
      Eigen::MatrixXd r = op.Q() + op.Q().transpose() - op.B();
      if (r.cwiseAbs().maxCoeff() > 1e-14 || !verify_sbp_accuracy(op).ok() ||
          op.norm().minCoeff() <= 0.0)
        fail(ErrorCode::DataFile, "coefficients for q=" + std::to_string(k) +
                                      " fail the SBP checks");
    }
  });
  if (q < 1 || q > 5) fail(ErrorCode::UnsupportedOrder, "q must be in 1..5");
  return table[q - 1];
}

SbpOperator1D::SbpOperator1D(const SbpCoefficients& c, int n_cells)
    : q_(c.q), n_(n_cells), b_(c.closure_width), h_(2.0 / n_cells), a_(c.central) {
  if (n_ + 1 < 2 * b_)
    fail(ErrorCode::GridTooSmall, "N=" + std::to_string(n_) + " too small for q=" +
                                      std::to_string(q_) + " (need N+1 >= " +
                                      std::to_string(2 * b_) + ")");
  qblock_.resize(b_, b_);
  for (int i = 0; i < b_; ++i)
    for (int j = 0; j < b_; ++j) qblock_(i, j) = c.qblock[i][j];
  H_ = Eigen::VectorXd::Constant(n_ + 1, h_);
  for (int k = 0; k < b_; ++k) {
    H_(k) = h_ * c.norm[k];
    H_(n_ - k) = h_ * c.norm[k];
  }
  const int w = b_ + q_;
  closure_.assign(b_, std::vector<double>(w, 0.0));
  for (int k = 0; k < b_; ++k) {
    for (int j = 0; j < w; ++j) {
      double v = 0.0;
      if (j < b_) {
        v = qblock_(k, j);
      } else if (j - k >= 1 && j - k <= q_) {
        v = a_[j - k - 1];
      }
      closure_[k][j] = v / c.norm[k];
    }
  }
}

Eigen::MatrixXd SbpOperator1D::Q() const {
  const int n = n_ + 1;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int m = 1; m <= q_; ++m) {
      if (k + m < n) Q(k, k + m) = a_[m - 1];
      if (k - m >= 0) Q(k, k - m) = -a_[m - 1];
    }
  for (int i = 0; i < b_; ++i)
    for (int j = 0; j < b_; ++j) {
      Q(i, j) = qblock_(i, j);
      Q(n_ - i, n_ - j) = -qblock_(i, j);
    }
  return Q;
}

Eigen::MatrixXd SbpOperator1D::D() const {
  return H_.cwiseInverse().asDiagonal() * Q();
}

Eigen::MatrixXd SbpOperator1D::B() const {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n_ + 1, n_ + 1);
  B(0, 0) = -1.0;
  B(n_, n_) = 1.0;
  return B;
}

void SbpOperator1D::apply(const double* u, std::ptrdiff_t is, double* out,
                          std::ptrdiff_t os) const {
  const double ih = 1.0 / h_;
  const int w = b_ + q_;
  for (int k = 0; k < b_; ++k) {
    const auto& row = closure_[k];
    double sl = 0.0, sr = 0.0;
    for (int j = 0; j < w; ++j) {
      sl += row[j] * u[j * is];
      sr += row[j] * u[(n_ - j) * is];
    }
    out[k * os] = sl * ih;
    out[(n_ - k) * os] = -sr * ih;
  }
  for (int k = b_; k <= n_ - b_; ++k) {
    double s = 0.0;
    for (int m = 1; m <= q_; ++m) s += a_[m - 1] * (u[(k + m) * is] - u[(k - m) * is]);
    out[k * os] = s * ih;
  }
}

Eigen::VectorXd SbpOperator1D::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  apply(u.data(), 1, out.data(), 1);
  return out;
}

SbpOperator1D build_sbp(int q, int n_cells) {
  if (q < 1 || q > 5) fail(ErrorCode::UnsupportedOrder, "q must be in 1..5");
  return SbpOperator1D(sbp_coefficients(q), n_cells);
}

int min_cells_sbp(int q) { return 2 * sbp_coefficients(q).closure_width - 1; }

bool AccuracyReport::ok() const {
  for (const auto& e : entries)
    if (e.violated) return false;
  return true;
}

AccuracyReport verify_sbp_accuracy(const SbpOperator1D& op, double tol) {
  AccuracyReport rep;
  rep.q = op.boundary_order();
  rep.n_cells = op.n_cells();
  const int n = op.n_points();
  const int b = op.closure_width();
  Eigen::VectorXd x(n);
  for (int k = 0; k < n; ++k) x(k) = -1.0 + k * op.spacing();
  for (int m = 0; m <= op.interior_order(); ++m) {
    Eigen::VectorXd f(n), df(n);
    for (int k = 0; k < n; ++k) {
      f(k) = std::pow(x(k), m);
      df(k) = m == 0 ? 0.0 : m * std::pow(x(k), m - 1);
    }
    Eigen::VectorXd err = (op.apply(f) - df).cwiseAbs();
    double ei = 0.0, eb = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k < b || k > n - 1 - b)
        eb = std::max(eb, err(k));
      else
        ei = std::max(ei, err(k));
    }
    AccuracyEntry in{m, false, ei, m <= op.interior_order(), false};
    in.violated = in.required && ei > tol;
    AccuracyEntry bd{m, true, eb, m <= op.boundary_order(), false};
    bd.violated = bd.required && eb > tol;
    rep.entries.push_back(in);
    rep.entries.push_back(bd);
  }
  return rep;
}

}  // namespace sbpglue
