#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sbpglue/config.hpp"
#include "sbpglue/csv.hpp"
#include "sbpglue/errors.hpp"
#include "sbpglue/glue.hpp"
#include "sbpglue/harness.hpp"
#include "sbpglue/sbp.hpp"

namespace sbpglue::cli {

namespace {

// (n_c, n_d) of the projection constraint system for q = 1..5.
constexpr int kConstraintTable[5][2] = {{11, 6}, {76, 96}, {222, 324}, {524, 928}, {1020, 2020}};

constexpr double kSbpTol = 1e-14;
constexpr double kAccuracyTol = 1e-10;
constexpr double kCompatibilityTol = 1e-12;
constexpr double kConstraintTol = 1e-8;

/// Flags shared by the simulation subcommands; unset flags keep the file value.
struct RunFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void add_to(CLI::App* app, bool levels, bool interval) {
    app->add_option("--config", config_file, "key-value config file")->check(CLI::ExistingFile);
    add(app, "--scenario", "scenario");
    add(app, "--q", "q");
    add(app, "--N", "N");
    add(app, "--alpha", "alpha");
    add(app, "--t-final", "t_final");
    add(app, "--dt", "dt");
    add(app, "--output-dir", "output_dir");
    add(app, "--refine", "refine");
    if (levels) add(app, "--levels", "levels");
    if (interval) add(app, "--interval", "interval");
  }

  void add(CLI::App* app, const std::string& flag, const std::string& key) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values[key] = v; }, "overrides '" + key + "'");
  }

  RunConfig resolve() const {
    RunConfig cfg = config_file.empty() ? RunConfig{} : load_run_config(config_file);
    apply_environment(cfg);
    // scenario first so a later key cannot be validated against the wrong one
    if (auto it = values.find("scenario"); it != values.end()) set_config_value(cfg, it->first, it->second);
    for (const auto& [k, v] : values)
      if (k != "scenario") set_config_value(cfg, k, v);
    validate(cfg);
    return cfg;
  }
};

std::string output_dir_only(const std::string& flag_value) {
  RunConfig cfg;
  apply_environment(cfg);
  if (!flag_value.empty()) cfg.output_dir = flag_value;
  return cfg.output_dir;
}

int ops_verify(const std::vector<int>& qs, const std::vector<int>& ns, const std::string& dir,
               std::ostream& out) {
  CsvTable t({"q", "N", "sbp_residual", "accuracy_error", "status"});
  bool all = true;
  for (int q : qs) {
    for (int n : ns) {
      try {
        SbpOperator1D op = build_sbp(q, n);
        const double sbp = (op.Q() + op.Q().transpose() - op.B()).cwiseAbs().maxCoeff();
        double acc = 0.0;
        bool ok = sbp <= kSbpTol;
        for (const auto& e : verify_sbp_accuracy(op, kAccuracyTol).entries) {
          if (!e.required) continue;
          acc = std::max(acc, e.max_error);
          ok = ok && !e.violated;
        }
        all = all && ok;
        t.add_row({q, n, sbp, acc, std::string(ok ? "pass" : "fail")});
      } catch (const Error& e) {
        all = false;
        t.add_row({q, n, std::string(), std::string(), std::string(error_name(e.code()))});
      }
    }
  }
  out << "wrote " << t.write(dir, "ops_verify.csv") << "\n";
  return all ? 0 : 1;
}

int glue_build(int q, int n, bool refine, const std::string& dir, std::ostream& out) {
  if (q < 1 || q > 5) fail(ErrorCode::UnsupportedOrder, "q must be in 1..5");
  CsvTable t({"check", "value", "limit", "status"});
  bool all = true;
  auto row = [&](const std::string& name, CsvCell value, CsvCell limit, bool ok) {
    all = all && ok;
    t.add_row({name, value, limit, std::string(ok ? "pass" : "fail")});
  };
  const ConstraintSystem sys = assemble_projection_constraints(q);
  row("constraint_count", sys.constraint_count(), kConstraintTable[q - 1][0],
      sys.constraint_count() == kConstraintTable[q - 1][0]);
  row("unknown_count", sys.unknown_count(), kConstraintTable[q - 1][1],
      sys.unknown_count() == kConstraintTable[q - 1][1]);
  const ProjectionStencil& st = projection_stencil(q, refine);
  row("constraint_residual", st.residual, kConstraintTol, st.residual <= kConstraintTol);
  const ProjectionPair pp = assemble_projection(st, build_sbp(q, n));
  const double compat = pp.compatibility_residual();
  row("compatibility_residual", compat, kCompatibilityTol, compat <= kCompatibilityTol);
  const ProjectionAccuracy acc = projection_accuracy(pp, sys.params);
  row("g2f_interior_exactness", acc.g2f_interior, kAccuracyTol, acc.g2f_interior <= kAccuracyTol);
  row("g2f_boundary_exactness", acc.g2f_boundary, kAccuracyTol, acc.g2f_boundary <= kAccuracyTol);
  row("f2g_interior_exactness", acc.f2g_interior, kAccuracyTol, acc.f2g_interior <= kAccuracyTol);
  row("f2g_boundary_exactness", acc.f2g_boundary, kAccuracyTol, acc.f2g_boundary <= kAccuracyTol);
  out << "wrote " << t.write(dir, fmt::format("glue_certificate_q{}.csv", q)) << "\n";
  out << "certificate " << (all ? "pass" : "fail") << "\n";
  return all ? 0 : 1;
}

int run_command(const RunConfig& cfg, std::ostream& out) {
  RunResult r = run_simulation(to_system_config(cfg), cfg.t_final, cfg.dt);
  CsvTable t({"scenario", "q", "N", "alpha", "dofs", "dt", "steps", "t_final", "error",
              "energy_initial", "energy_final"});
  t.add_row({std::string(scenario_name(cfg.scenario)), cfg.q, cfg.n, cfg.alpha, r.dofs, r.dt,
             r.steps, r.t_final, r.error, r.energy_initial, r.energy_final});
  out << "error " << format_number(r.error) << "\n";
  out << "wrote " << t.write(cfg.output_dir, "run.csv") << "\n";
  return 0;
}

int converge_command(const RunConfig& cfg, std::ostream& out) {
  std::vector<int> ns;
  for (int k = 0; k < cfg.levels; ++k) ns.push_back(cfg.n << k);
  CsvTable t({"q", "N", "config", "error", "rate"});
  convergence_study(to_system_config(cfg), ns, cfg.t_final, [&](const ConvergenceRow& row) {
    out << "N=" << row.n << " error=" << format_number(row.error);
    if (!std::isnan(row.rate)) out << " rate=" << format_number(row.rate);
    out << "\n";
    t.add_row({cfg.q, row.n, std::string(scenario_name(cfg.scenario)), row.error,
               std::isnan(row.rate) ? CsvCell(std::string()) : CsvCell(row.rate)});
  });
  out << "wrote " << t.write(cfg.output_dir, "errors.csv") << "\n";
  return 0;
}

int eig_command(const RunConfig& cfg, std::ostream& out) {
  CoupledSystem sys(to_system_config(cfg));
  GlobalOperator g = assemble_global_operator(sys);
  Spectrum s = operator_spectrum(sys, g.A);
  std::vector<std::pair<double, double>> ev(s.re.size());
  for (int i = 0; i < s.re.size(); ++i) ev[i] = {s.re(i), s.im(i)};
  std::sort(ev.begin(), ev.end());
  CsvTable t({"Re", "Im"});
  for (const auto& [re, im] : ev) t.add_row({re, im});
  out << "dofs " << sys.size() << "\n";
  out << "max_re " << format_number(s.max_re()) << "\n";
  out << "max_abs_re " << format_number(s.max_abs_re()) << "\n";
  out << "wrote " << t.write(cfg.output_dir, "spectrum.csv") << "\n";
  return 0;
}

int energy_command(const RunConfig& cfg, std::ostream& out) {
  CoupledSystem sys(to_system_config(cfg));
  const double dt = cfg.dt > 0.0 ? cfg.dt : sys.stable_dt();
  CsvTable t({"t", "energy"});
  for (const auto& s : energy_trace(sys, dt, cfg.t_final, cfg.interval)) t.add_row({s.t, s.energy});
  out << "samples " << t.rows() << "\n";
  out << "wrote " << t.write(cfg.output_dir, "energy.csv") << "\n";
  return 0;
}

void report_error(std::ostream& err, ErrorCode code, const std::string& message) {
  nlohmann::json j;
  j["error"] = error_name(code);
  j["code"] = static_cast<int>(code);
  j["message"] = message;
  err << j.dump() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SBP finite difference / DG coupling toolkit", "sbpglue"};
  app.require_subcommand(1);

  auto* ops = app.add_subcommand("ops", "SBP operator tools");
  ops->require_subcommand(1);
  auto* ops_verify_cmd = ops->add_subcommand("verify", "certify SBP operators");
  std::vector<int> ops_q{1, 2, 3, 4, 5}, ops_n{16, 32, 64};
  std::string ops_dir;
  ops_verify_cmd->add_option("--q", ops_q, "boundary orders")->check(CLI::Range(1, 5));
  ops_verify_cmd->add_option("--N", ops_n, "cell counts");
  ops_verify_cmd->add_option("--output-dir", ops_dir, "output directory");

  auto* glue = app.add_subcommand("glue", "glue projection tools");
  glue->require_subcommand(1);
  auto* glue_build_cmd = glue->add_subcommand("build", "build and certify a projection pair");
  int glue_q = 2, glue_n = 64;
  bool glue_refine = false;
  std::string glue_dir;
  glue_build_cmd->add_option("--q", glue_q, "boundary order")->required();
  glue_build_cmd->add_option("--N", glue_n, "grid cells for the assembled pair");
  glue_build_cmd->add_flag("--refine", glue_refine, "refine the null-space part");
  glue_build_cmd->add_option("--output-dir", glue_dir, "output directory");

  RunFlags run_flags, converge_flags, eig_flags, energy_flags;
  auto* run = app.add_subcommand("run", "one simulation to t_final, writes run.csv");
  run_flags.add_to(run, false, false);
  auto* converge = app.add_subcommand("converge", "resolution study, writes errors.csv");
  converge_flags.add_to(converge, true, false);
  auto* eig = app.add_subcommand("eig", "spectrum of the semi-discrete operator, writes spectrum.csv");
  eig_flags.add_to(eig, false, false);
  auto* energy = app.add_subcommand("energy", "energy history, writes energy.csv");
  energy_flags.add_to(energy, false, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      app.exit(e, out, err);
      return 0;
    }
    report_error(err, ErrorCode::ConfigParse, e.what());
    return static_cast<int>(ErrorCode::ConfigParse);
  }

  try {
    if (ops_verify_cmd->parsed()) return ops_verify(ops_q, ops_n, output_dir_only(ops_dir), out);
    if (glue_build_cmd->parsed())
      return glue_build(glue_q, glue_n, glue_refine, output_dir_only(glue_dir), out);
    if (run->parsed()) return run_command(run_flags.resolve(), out);
    if (converge->parsed()) return converge_command(converge_flags.resolve(), out);
    if (eig->parsed()) return eig_command(eig_flags.resolve(), out);
    if (energy->parsed()) return energy_command(energy_flags.resolve(), out);
  } catch (const Error& e) {
    report_error(err, e.code(), e.what());
    return static_cast<int>(e.code());
  }
  return 0;
}

}  // namespace sbpglue::cli
