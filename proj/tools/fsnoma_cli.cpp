// Command-line front end: sweep, optimize, validate, print-config.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "fsnoma/capacity_oma.hpp"
#include "fsnoma/config.hpp"
#include "fsnoma/errors.hpp"
#include "fsnoma/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

struct Overrides {
  std::optional<double> snr_db, a2, cap_tol;
  std::optional<long long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> output;
  bool timing = false;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--snr-db", o.snr_db, "Mean SNR in dB");
  cmd->add_option("--a2", o.a2, "Power fraction of the relay symbol");
  cmd->add_option("--samples", o.samples, "Monte-Carlo samples per point");
  cmd->add_option("--seed", o.seed, "Monte-Carlo master seed");
  cmd->add_option("--workers", o.workers, "Worker threads (overrides FSNOMA_WORKERS)");
  cmd->add_option("-o,--output", o.output, "Output CSV path");
  cmd->add_flag("--timing", o.timing, "Record wall_ms per row");
}

fsnoma::RunConfig resolve(const std::string& path, const Overrides& o) {
  fsnoma::RunConfig rc = path.empty() ? fsnoma::RunConfig{} : fsnoma::load_config(path);
  auto& sp = rc.sweep;
  if (const char* env = std::getenv("FSNOMA_WORKERS")) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (*env == '\0' || *end != '\0' || w < 1) throw fsnoma::DomainError("FSNOMA_WORKERS must be a positive integer");
    sp.mc.n_workers = static_cast<int>(w);
  }
  if (o.snr_db) sp.base.snr_db = *o.snr_db;
  if (o.a2) sp.base.a2 = *o.a2;
  if (o.samples) sp.mc.n_samples = *o.samples;
  if (o.seed) sp.mc.master_seed = *o.seed;
  if (o.workers) sp.mc.n_workers = *o.workers;
  if (o.output) sp.output_path = *o.output;
  if (o.timing) sp.timing = true;
  return rc;
}

fsnoma::SystemConfig base_config(const fsnoma::SweepSpec& sp) {
  return fsnoma::make_config(sp.base.sr, sp.base.rd, sp.base.sd, sp.base.a2, fsnoma::db_to_linear(sp.base.snr_db));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    fsnoma::write_file_atomic(path, text);
}

std::string fmt(double x) { return fsnoma::format_number(x); }

int cmd_sweep(const fsnoma::RunConfig& rc) {
  const auto rows = fsnoma::run_sweep(rc.sweep);
  emit(rc.sweep.output_path, fsnoma::to_csv(rows));
  for (const auto& r : rows)
    if (r.status == "error") return kNumerical;
  return kOk;
}

// Without a sweep section the base point is optimized; otherwise every axis value.
int cmd_optimize(const fsnoma::RunConfig& rc) {
  const auto& sp = rc.sweep;
  std::string out = "axis_name,axis_value,a2_opt,c_noma_max,c_oma_exact\n";
  auto one = [&](const fsnoma::SystemConfig& cfg, const std::string& axis, double x) {
    const auto opt = fsnoma::optimize_a2(cfg, sp.pol, rc.opt_eps, rc.opt_grid);
    const double oma = fsnoma::c_oma_exact(cfg, sp.pol).value;
    out += axis + "," + fmt(x) + "," + fmt(opt.a2) + "," + fmt(opt.c_max.value) + "," + fmt(oma) + "\n";
  };
  if (sp.values.empty()) {
    one(base_config(sp), "base", sp.base.snr_db);
  } else {
    fsnoma::validate(sp.pol);
    for (double x : sp.values) one(fsnoma::point_config(sp, x), std::string(fsnoma::to_string(sp.axis)), x);
  }
  emit(sp.output_path, out);
  return kOk;
}

int cmd_validate(const fsnoma::RunConfig& rc, std::optional<double> cap_tol) {
  const auto& sp = rc.sweep;
  const auto checks =
      fsnoma::triangle_checks(base_config(sp), sp.pol, sp.mc, cap_tol ? *cap_tol : sp.pol.cap_tol);
  std::string out = "name,closed,quadrature,mc,tolerance,result\n";
  bool ok = true;
  for (const auto& c : checks) {
    out += fsnoma::format_check(c) + "\n";
    ok = ok && c.pass;
  }
  std::cout << out;
  return ok ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ergodic capacity of cooperative NOMA and OMA relaying over Fisher-Snedecor F fading"};
  app.require_subcommand(1);

  Overrides o;
  std::string spec_path;
  std::optional<double> cap_tol;

  auto* sweep = app.add_subcommand("sweep", "Evaluate methods over one parameter axis and write CSV");
  sweep->add_option("spec", spec_path, "YAML spec file")->required()->check(CLI::ExistingFile);
  add_overrides(sweep, o);

  auto* optimize = app.add_subcommand("optimize", "Maximize the NOMA capacity over a2");
  optimize->add_option("spec", spec_path, "YAML spec file")->required()->check(CLI::ExistingFile);
  add_overrides(optimize, o);

  auto* val = app.add_subcommand("validate", "Run the closed-form / quadrature / Monte-Carlo checks");
  val->add_option("spec", spec_path, "YAML spec file")->required()->check(CLI::ExistingFile);
  val->add_option("--cap-tol", cap_tol, "Per-term tolerance in bits/s/Hz");
  add_overrides(val, o);

  auto* print = app.add_subcommand("print-config", "Print the fully resolved configuration");
  print->add_option("spec", spec_path, "YAML spec file")->check(CLI::ExistingFile);
  add_overrides(print, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  fsnoma::RunConfig rc;
  try {
    rc = resolve(spec_path, o);
  } catch (const fsnoma::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*print) {
      std::cout << fsnoma::dump_config(rc);
      return kOk;
    }
    if (*sweep) return cmd_sweep(rc);
    if (*optimize) return cmd_optimize(rc);
    return cmd_validate(rc, cap_tol);
  } catch (const fsnoma::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fsnoma::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const fsnoma::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}
