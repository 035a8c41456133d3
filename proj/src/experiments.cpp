#include "nucmem/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "nucmem/csv.hpp"
#include "nucmem/errors.hpp"

namespace nucmem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Evaluates task(i) for i in [0, count) on up to `threads` workers; results
// land at index i, so the output order never depends on scheduling.
template <typename T>
std::vector<T> parallel_map(std::size_t count, int threads,
                            const std::function<T(std::size_t)>& task) {
  std::vector<T> out(count);
  const auto workers =
      static_cast<std::size_t>(std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(count, 1))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = task(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) out[i] = task(i);
    });
  }
  pool.clear();
  return out;
}

SweepRow failed_row(SweepRow row, const std::string& why) {
  row.status = why;
  for (double* v : {&row.gamma_F, &row.analytic_var_I_y, &row.analytic_var_S_y, &row.var_I_x,
                    &row.var_I_y, &row.var_S_x, &row.var_S_y, &row.var_X, &row.var_Y,
                    &row.best_var_I, &row.best_angle_I}) {
    *v = kNaN;
  }
  return row;
}

SweepRow evaluate(const Scenario& scenario, double value, double gamma_ratio,
                  double db_over_b) {
  SweepRow row;
  row.value = value;
  row.gamma_ratio = gamma_ratio;
  row.db_over_b = db_over_b;
  try {
    const ScenarioPoint point = matched_point(scenario, gamma_ratio, db_over_b);
    row.field_mG = point.field.field_gauss * 1e3;
    row.gamma_F = point.derived.memory_bandwidth;
    const auto analytic =
        analytic_variances(point.derived.pump_rate, scenario.gamma_m, point.derived.cooperativity,
                           scenario.r_squeeze, point.params.gamma_f);
    row.analytic_var_I_y = analytic.var_I_y;
    row.analytic_var_S_y = analytic.var_S_y;
    row.analytic_regime_ok = analytic.regime_ok;
    row.adiabatic_ok = adiabatic_validity(point.params).all_pass();

    const MomentMatrix m = solve_steady_moments(build_full_system(point.params));
    const VarianceReport v = quadrature_variances(m);
    row.var_I_x = v.ground->x;
    row.var_I_y = v.ground->y;
    row.var_S_x = v.meta->x;
    row.var_S_y = v.meta->y;
    row.var_X = v.field->x;
    row.var_Y = v.field->y;
    row.best_var_I = v.best_ground->variance;
    row.best_angle_I = v.best_ground->angle;
  } catch (const std::exception& e) {
    return failed_row(row, e.what());
  }
  return row;
}

// Relative Frobenius distance in unit-commutator coordinates, so spin
// moments of order N do not swamp the field block.
double unit_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                     const Eigen::VectorXd& scale) {
  const Eigen::VectorXd t = scale.cwiseSqrt().cwiseInverse();
  return (t.asDiagonal() * (a - b) * t.asDiagonal()).norm() /
         (t.asDiagonal() * b * t.asDiagonal()).norm();
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

Scenario scenario_from_config(const KeyValueConfig& c, const Scenario& d) {
  Scenario s = d;
  s.gamma = c.number_or("gamma", s.gamma);
  s.kappa = c.number_or("kappa", s.kappa);
  s.delta_one_photon = c.number_or("delta_one_photon", s.delta_one_photon);
  s.gamma_m = c.number_or("gamma_m", s.gamma_m);
  s.gamma_0 = c.number_or("gamma_0", s.gamma_0);
  s.cooperativity = c.number_or("cooperativity", s.cooperativity);
  s.r_squeeze = c.number_or("r_squeeze", s.r_squeeze);
  s.n_meta = c.number_or("n_meta", s.n_meta);
  s.n_ground = c.number_or("n_ground", s.n_ground);
  s.gamma_ratio = c.number_or("gamma_ratio", s.gamma_ratio);
  if (!(s.gamma > 0.0) || !(s.kappa > 0.0) || !(s.gamma_m > 0.0) || s.gamma_0 < 0.0 ||
      s.cooperativity < 0.0 || !(s.n_meta > 0.0) || !(s.n_ground > s.n_meta) ||
      s.delta_one_photon == 0.0 || s.gamma_ratio < 0.0 || !std::isfinite(s.r_squeeze)) {
    throw ConfigError("scenario entries out of range");
  }
  return s;
}

ScenarioPoint matched_point(const Scenario& s, double gamma_ratio, double delta_b_over_b) {
  if (!(gamma_ratio >= 0.0)) throw InvalidParameter("gamma_ratio must be non-negative");
  ScenarioPoint out;
  const double pump = gamma_ratio * s.gamma_m;
  PhysicalParams& p = out.params;
  p.gamma = s.gamma;
  p.kappa = s.kappa;
  p.gamma_m = s.gamma_m;
  p.gamma_0 = s.gamma_0;
  p.n_meta = s.n_meta;
  p.n_ground = s.n_ground;
  p.gamma_f = s.gamma_m * s.n_meta / s.n_ground;
  p.r_squeeze = s.r_squeeze;
  p.delta_one_photon = s.delta_one_photon;
  p.g_coupling = std::sqrt(s.cooperativity * s.kappa * s.gamma / s.n_meta);
  p.delta_cavity = s.cooperativity * s.kappa * s.gamma / s.delta_one_photon;
  // The engine follows the spin-1/2 equations (unit pump factor); the
  // helium field follows the C9 line (factor 3).
  p.omega_rabi = rabi_for_pump_rate(pump, s.delta_one_photon, s.gamma, s.cooperativity, 1);
  p.delta_meta = -p.omega_rabi * p.omega_rabi / s.delta_one_photon;
  p.delta_ground = 0.0;
  out.field = helium::helium_operating_point(pump, s.delta_one_photon, s.gamma, s.cooperativity);
  if (delta_b_over_b != 0.0) {
    const auto shift = helium::field_error_detunings(delta_b_over_b * out.field.field_gauss);
    p.delta_meta += shift.delta_tilde;
    p.delta_ground += shift.delta_ground;
  }
  validate(p);
  out.derived = derive(p, 1);
  return out;
}

std::vector<double> make_grid(const GridSpec& g) {
  if (!(g.min < g.max) || g.points < 2 || (g.logarithmic && !(g.min > 0.0)) ||
      !std::isfinite(g.min) || !std::isfinite(g.max)) {
    throw InvalidParameter("grid needs min < max, points >= 2 and a positive range for log grids");
  }
  std::vector<double> v(static_cast<std::size_t>(g.points));
  const double last = g.points - 1.0;
  for (int i = 0; i < g.points; ++i) {
    const double t = i / last;
    v[static_cast<std::size_t>(i)] =
        g.logarithmic ? std::exp(std::log(g.min) + t * (std::log(g.max) - std::log(g.min)))
                      : g.min + t * (g.max - g.min);
  }
  v.front() = g.min;
  v.back() = g.max;
  return v;
}

std::vector<SweepRow> run_gamma_sweep(const SweepSpec& spec) {
  const auto grid = make_grid(spec.grid);
  return parallel_map<SweepRow>(grid.size(), spec.threads, [&](std::size_t i) {
    return evaluate(spec.fixed, grid[i], grid[i], 0.0);
  });
}

std::vector<SweepRow> run_field_error_sweep(const SweepSpec& spec) {
  const auto grid = make_grid(spec.grid);
  const std::size_t per_curve = grid.size();
  return parallel_map<SweepRow>(per_curve * spec.db_over_b.size(), spec.threads,
                                [&](std::size_t i) {
                                  const double db = spec.db_over_b[i / per_curve];
                                  const double x = grid[i % per_curve];
                                  return evaluate(spec.fixed, x, x, db);
                                });
}

std::vector<SweepRow> run_squeezing_sweep(const SweepSpec& spec) {
  const auto grid = make_grid(spec.grid);
  return parallel_map<SweepRow>(grid.size(), spec.threads, [&](std::size_t i) {
    Scenario s = spec.fixed;
    if (!(grid[i] > 0.0)) {
      SweepRow row;
      row.value = grid[i];
      return failed_row(row, "input variance must be positive");
    }
    s.r_squeeze = -0.5 * std::log(grid[i]);
    return evaluate(s, grid[i], s.gamma_ratio, 0.0);
  });
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  switch (spec.kind) {
    case SweepKind::GammaRatio: return run_gamma_sweep(spec);
    case SweepKind::FieldError: return run_field_error_sweep(spec);
    case SweepKind::SqueezingInput: return run_squeezing_sweep(spec);
  }
  return {};
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "value,gamma_ratio,db_over_b,field_mG,gamma_F,analytic_var_I_y,analytic_var_S_y,"
         "var_I_x,var_I_y,var_S_x,var_S_y,var_X,var_Y,best_var_I,best_angle_I,"
         "adiabatic_ok,analytic_regime_ok,status\n";
  for (const auto& r : rows) {
    for (double v : {r.value, r.gamma_ratio, r.db_over_b, r.field_mG, r.gamma_F, r.analytic_var_I_y,
                     r.analytic_var_S_y, r.var_I_x, r.var_I_y, r.var_S_x, r.var_S_y, r.var_X,
                     r.var_Y, r.best_var_I, r.best_angle_I}) {
      out << format_scientific(v) << ',';
    }
    out << (r.adiabatic_ok ? 1 : 0) << ',' << (r.analytic_regime_ok ? 1 : 0) << ','
        << csv_safe(r.status) << '\n';
  }
}

void write_gnuplot_script(std::ostream& out, SweepKind kind, const std::string& csv_path) {
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set ylabel 'normalized variance'\n";
  switch (kind) {
    case SweepKind::GammaRatio:
      out << "set logscale x\nset xlabel 'Gamma / gamma_m'\n"
          << "plot '" << csv_path << "' using 2:6 with lines, '' using 2:7 with lines, "
          << "'' using 2:9 with points, '' using 2:11 with points\n";
      break;
    case SweepKind::FieldError:
      out << "set logscale x\nset xlabel 'Gamma / gamma_m'\n"
          << "plot '" << csv_path << "' using 2:14:3 with points palette title 'best var I'\n";
      break;
    case SweepKind::SqueezingInput:
      out << "set xlabel 'input X variance'\n"
          << "plot '" << csv_path << "' using 1:9 with linespoints, '' using 1:11 with linespoints\n";
      break;
  }
}

bool heisenberg_ok(const SweepRow& r, double tol) {
  return r.var_I_x * r.var_I_y >= 1.0 - tol && r.var_S_x * r.var_S_y >= 1.0 - tol &&
         r.var_X * r.var_Y >= 1.0 - tol;
}

OperatingPointReport run_operating_point_report(const Scenario& scenario,
                                                const helium::GasCell& cell,
                                                double delta_b_over_b) {
  OperatingPointReport r;
  r.gamma_ratio = scenario.gamma_ratio;
  r.gas = helium::gas_populations(cell, scenario.gamma_m);
  Scenario s = scenario;
  s.n_ground = r.gas.n_ground;
  s.n_meta = r.gas.n_meta;
  s.gamma_0 = r.gas.gamma_0;
  const ScenarioPoint point = matched_point(s, s.gamma_ratio);
  r.derived = point.derived;
  r.point = point.field;
  r.validity = adiabatic_validity(point.params);
  r.homogeneity = helium::homogeneity_check(point.params, point.derived, point.field, delta_b_over_b);
  return r;
}

namespace {

struct ReportField {
  const char* key;
  double value;
};

std::vector<ReportField> report_fields(const OperatingPointReport& r) {
  return {{"gamma_ratio", r.gamma_ratio},
          {"n_ground", r.gas.n_ground},
          {"n_meta", r.gas.n_meta},
          {"gamma_f", r.gas.gamma_f},
          {"gamma_0", r.gas.gamma_0},
          {"cooperativity", r.derived.cooperativity},
          {"pump_rate", r.derived.pump_rate},
          {"gamma_F", r.derived.memory_bandwidth},
          {"memory_time_s", 1.0 / r.derived.memory_bandwidth},
          {"field_mG", r.point.field_gauss * 1e3},
          {"delta_las", r.point.delta_las},
          {"omega_I", r.point.omega_I},
          {"omega_I_over_2pi_Hz", r.point.omega_I / (2.0 * std::numbers::pi)},
          {"omega_S", r.point.omega_S},
          {"light_shift", r.point.light_shift},
          {"residual_metastable", r.point.residual_metastable},
          {"residual_ground", r.point.residual_ground},
          {"linear_zeeman_ok", r.point.linear_zeeman ? 1.0 : 0.0},
          {"homogeneity_threshold", r.homogeneity.binding_threshold},
          {"homogeneity_exact_threshold", r.homogeneity.exact_threshold},
          {"homogeneity_regime_threshold", r.homogeneity.regime_threshold},
          {"homogeneity_regime_coefficient", r.homogeneity.regime_coefficient},
          {"db_over_b", r.homogeneity.delta_b_over_b},
          {"homogeneity_pass", r.homogeneity.pass ? 1.0 : 0.0},
          {"adiabatic_ok", r.validity.all_pass() ? 1.0 : 0.0}};
}

}  // namespace

void write_text(std::ostream& out, const OperatingPointReport& r) {
  for (const auto& f : report_fields(r)) {
    std::string key = f.key;
    key.resize(std::max<std::size_t>(key.size(), 40), ' ');
    out << key << format_scientific(f.value) << '\n';
  }
  for (const auto& c : r.validity.checks) {
    std::string key = "check." + c.name;
    key.resize(std::max<std::size_t>(key.size(), 40), ' ');
    out << key << format_scientific(c.value) << (c.pass ? " ok" : " FAIL") << '\n';
  }
}

void write_csv(std::ostream& out, const OperatingPointReport& r) {
  const auto fields = report_fields(r);
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i].key;
  out << '\n';
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out << (i ? "," : "") << format_scientific(fields[i].value);
  }
  out << '\n';
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

PhysicalParams random_stable_params(std::mt19937_64& rng, double max_stiffness) {
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  };
  for (int attempt = 0; attempt < 10000; ++attempt) {
    PhysicalParams p;
    p.gamma = uniform(1.0, 3.0);
    p.kappa = uniform(1.0, 4.0);
    p.gamma_m = uniform(0.3, 1.5);
    p.gamma_0 = uniform(0.0, 0.2);
    p.n_meta = log_uniform(10.0, 1e3);
    p.n_ground = p.n_meta * log_uniform(1.0, 20.0);
    p.gamma_f = p.gamma_m * p.n_meta / p.n_ground;
    p.omega_rabi = uniform(0.3, 2.0);
    p.delta_one_photon = uniform(-4.0, 4.0);
    p.delta_meta = uniform(-0.5, 0.5);
    p.delta_ground = uniform(-0.5, 0.5);
    p.delta_cavity = uniform(-1.0, 1.0);
    const double c = uniform(0.2, 5.0);
    p.g_coupling = std::sqrt(c * p.kappa * p.gamma / p.n_meta);
    p.r_squeeze = uniform(0.0, 1.2);
    const StabilityReport s = check_stability(build_full_system(p));
    if (s.stable() && s.max_rate / s.slowest_rate <= max_stiffness) return p;
  }
  throw Error("no stable random configuration found");
}

void drop_exchange_noise(LangevinSystem& system) {
  const auto zero = [&](Op a, Op b) {
    const auto i = system.index_of(a);
    const auto j = system.index_of(b);
    if (!i || !j) return;
    system.diffusion(*i, *j) = 0.0;
    system.vacuum_diffusion(*i, *j) = 0.0;
  };
  zero(Op::S21, Op::S12);
  zero(Op::I09, Op::I90);
  zero(Op::S21, Op::I90);
  zero(Op::I09, Op::S12);
}

InvariantReport run_invariant_suite(const InvariantOptions& o) {
  std::mt19937_64 rng(o.seed);
  InvariantReport report;
  report.worst_heisenberg = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < o.draws; ++k) {
    const PhysicalParams p = random_stable_params(rng, o.max_stiffness);
    LangevinSystem sys = build_full_system(p);
    if (o.remove_exchange_noise) drop_exchange_noise(sys);
    const MomentMatrix m = solve_steady_moments(sys);
    ++report.draws;

    const double big = std::max(p.n_meta, p.n_ground);
    for (Eigen::Index i = 0; i < m.moments.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.moments.cols(); ++j) {
        const Op a = m.basis[static_cast<std::size_t>(i)];
        const Op b = m.basis[static_cast<std::size_t>(j)];
        const cplx anti = m.moments(i, j) - m.moments(j, i);
        if (b == conjugate(a)) {
          const bool annihilation = a == Op::S21 || a == Op::S23 || a == Op::I09 || a == Op::A;
          const double expected = annihilation ? m.scale(i) : -m.scale(i);
          report.worst_commutator =
              std::max(report.worst_commutator, std::abs(anti - expected) / m.scale(i));
        } else if (i != j) {
          report.worst_cross = std::max(report.worst_cross, std::abs(anti) / big);
        }
      }
    }
    const VarianceReport v = quadrature_variances(m);
    for (const auto& pair : {v.ground, v.meta, v.field}) {
      report.worst_heisenberg = std::max(report.worst_heisenberg, 1.0 - pair->x * pair->y);
    }

    const MomentMatrix integrated = integrate_moments(sys);
    report.worst_oracle =
        std::max(report.worst_oracle, unit_distance(integrated.moments, m.moments, m.scale));
    if (k < o.parseval_draws) {
      const Eigen::MatrixXcd spec = integrate_spectrum(sys);
      report.worst_parseval =
          std::max(report.worst_parseval, unit_distance(spec, m.moments, m.scale));
    }
  }
  report.commutator_ok = report.worst_commutator <= o.commutator_tolerance &&
                         report.worst_cross <= o.commutator_tolerance;
  report.heisenberg_ok = report.worst_heisenberg <= o.heisenberg_tolerance;
  report.oracle_ok = report.worst_oracle <= o.oracle_tolerance;
  report.parseval_ok = report.worst_parseval <= o.parseval_tolerance;
  return report;
}

void write_text(std::ostream& out, const InvariantReport& r) {
  auto line = [&](const char* name, bool ok, double worst) {
    out << (ok ? "PASS " : "FAIL ") << name << " worst=" << format_scientific(worst) << '\n';
  };
  out << "draws " << r.draws << '\n';
  line("commutator", r.commutator_ok, std::max(r.worst_commutator, r.worst_cross));
  line("heisenberg", r.heisenberg_ok, r.worst_heisenberg);
  line("oracle_equivalence", r.oracle_ok, r.worst_oracle);
  line("parseval", r.parseval_ok, r.worst_parseval);
  out << (r.all_pass() ? "ALL PASS" : "FAILURES PRESENT") << '\n';
}

}  // namespace nucmem
