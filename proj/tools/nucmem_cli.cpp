// Command-line front end: sweeps, operating-point report, invariant suite.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nucmem/errors.hpp"
#include "nucmem/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariantFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::optional<int> points;
  int threads = 1;
  std::string gnuplot_path;
};

nucmem::KeyValueConfig load_config(const CommonOptions& o) {
  if (o.config_path.empty()) return {};
  return nucmem::KeyValueConfig::load(o.config_path);
}

nucmem::GridSpec grid_from(const nucmem::KeyValueConfig& c, const CommonOptions& o,
                           nucmem::GridSpec grid) {
  if (const auto kind = c.text("grid")) {
    if (*kind == "log") {
      grid.logarithmic = true;
    } else if (*kind == "linear") {
      grid.logarithmic = false;
    } else {
      throw nucmem::ConfigError("grid must be 'log' or 'linear'");
    }
  }
  grid.min = c.number_or("grid_min", grid.min);
  grid.max = c.number_or("grid_max", grid.max);
  grid.points = static_cast<int>(c.number_or("points", grid.points));
  if (o.points) grid.points = *o.points;
  if (!(grid.min < grid.max) || grid.points < 2 || (grid.logarithmic && !(grid.min > 0.0))) {
    throw nucmem::ConfigError("grid needs min < max, points >= 2 and min > 0 for log grids");
  }
  return grid;
}

// Writes to --out when given, stdout otherwise.
template <typename Writer>
void emit(const std::string& path, Writer&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw nucmem::ConfigError("cannot open output file " + path);
  write(out);
}

int run_sweep(const CommonOptions& o, nucmem::SweepKind kind, const std::vector<double>& db) {
  const auto config = load_config(o);
  nucmem::SweepSpec spec;
  spec.kind = kind;
  spec.fixed = nucmem::scenario_from_config(config);
  nucmem::GridSpec grid;
  if (kind == nucmem::SweepKind::SqueezingInput) {
    grid = {false, 0.1, 1.0, 10};
  }
  spec.grid = grid_from(config, o, grid);
  spec.threads = o.threads;
  if (!db.empty()) spec.db_over_b = db;
  const auto rows = nucmem::run_sweep(spec);
  emit(o.out_path, [&](std::ostream& out) { nucmem::write_csv(out, rows); });
  if (!o.gnuplot_path.empty()) {
    emit(o.gnuplot_path, [&](std::ostream& out) {
      nucmem::write_gnuplot_script(out, kind, o.out_path.empty() ? "sweep.csv" : o.out_path);
    });
  }
  return kExitOk;
}

int run_operating_point(const CommonOptions& o, bool csv, double db_over_b) {
  const auto config = load_config(o);
  const auto scenario = nucmem::scenario_from_config(config);
  const auto cell = nucmem::helium::gas_cell_from_config(config);
  const auto report = nucmem::run_operating_point_report(scenario, cell, db_over_b);
  if (!report.point.linear_zeeman) {
    std::cerr << "warning: operating field above the linear Zeeman limit\n";
  }
  emit(o.out_path, [&](std::ostream& out) {
    if (csv) {
      nucmem::write_csv(out, report);
    } else {
      nucmem::write_text(out, report);
    }
  });
  return kExitOk;
}

int run_invariants(const CommonOptions& o, std::uint64_t seed, std::optional<int> draws,
                   bool negative_control) {
  const auto config = load_config(o);
  nucmem::InvariantOptions options;
  options.seed = seed;
  options.draws = static_cast<int>(config.number_or("draws", options.draws));
  if (draws) options.draws = *draws;
  options.parseval_draws = std::min(options.parseval_draws, options.draws);
  options.remove_exchange_noise = negative_control;
  if (options.draws < 1) throw nucmem::ConfigError("draws must be at least 1");
  const auto report = nucmem::run_invariant_suite(options);
  emit(o.out_path, [&](std::ostream& out) { nucmem::write_text(out, report); });
  return report.all_pass() ? kExitOk : kExitInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezing transfer from a cavity field to metastable and nuclear spins"};
  app.require_subcommand(1);

  CommonOptions common;
  std::vector<double> db_over_b;
  std::uint64_t seed = 1;
  std::optional<int> draws;
  bool negative_control = false;
  bool csv = false;
  double report_db = 1e-4;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "key = value configuration file");
    sub->add_option("--out", common.out_path, "output path (default stdout)");
    sub->add_option("--points", common.points, "number of grid points");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  auto* gamma = app.add_subcommand("sweep-gamma", "variances versus Gamma / gamma_m");
  add_common(gamma);
  gamma->add_option("--gnuplot", common.gnuplot_path, "also write a gnuplot script");

  auto* field = app.add_subcommand("sweep-field-error", "best ground variance with field errors");
  add_common(field);
  field->add_option("--db-over-b", db_over_b, "relative field errors")->delimiter(',');
  field->add_option("--gnuplot", common.gnuplot_path, "also write a gnuplot script");

  auto* squeezing = app.add_subcommand("sweep-squeezing", "variances versus input X variance");
  add_common(squeezing);

  auto* op = app.add_subcommand("operating-point", "matched field and memory time report");
  add_common(op);
  op->add_flag("--csv", csv, "machine-readable CSV row instead of text");
  op->add_option("--db-over-b", report_db, "field error for the homogeneity check");

  auto* inv = app.add_subcommand("invariants", "commutator, Heisenberg, oracle and Parseval checks");
  add_common(inv);
  inv->add_option("--seed", seed, "random seed");
  inv->add_option("--draws", draws, "number of random configurations");
  inv->add_flag("--drop-exchange-noise", negative_control,
                "negative control: remove exchange Langevin forces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (*gamma) return run_sweep(common, nucmem::SweepKind::GammaRatio, {});
    if (*field) return run_sweep(common, nucmem::SweepKind::FieldError, db_over_b);
    if (*squeezing) return run_sweep(common, nucmem::SweepKind::SqueezingInput, {});
    if (*op) return run_operating_point(common, csv, report_db);
    if (*inv) return run_invariants(common, seed, draws, negative_control);
  } catch (const nucmem::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const nucmem::InvalidParameter& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariantFailure;
  }
  return kExitOk;
}
