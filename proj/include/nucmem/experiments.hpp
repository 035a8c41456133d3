#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "nucmem/adiabatic.hpp"
#include "nucmem/engine.hpp"
#include "nucmem/helium.hpp"
#include "nucmem/params.hpp"

namespace nucmem {

/// Fixed physical setting shared by every point of a sweep. Defaults are the
/// 1 torr helium cell operating set: e^{-2r} = 0.5, C = 500, kappa = 100 gamma,
/// Delta = -2000 gamma, gamma = 2e7 s^-1, gamma_m = 5e6 s^-1, gamma_0 = 1e3 s^-1.
struct Scenario {
  double gamma = 2e7;
  double kappa = 2e9;
  double delta_one_photon = -4e10;
  double gamma_m = 5e6;
  double gamma_0 = 1e3;
  double cooperativity = 500.0;
  double r_squeeze = 0.34657359027997264;  // ln(2) / 2
  double n_meta = 1.6e12;
  double n_ground = 1.6e18;
  double gamma_ratio = 0.1;  // Gamma / gamma_m for single-point reports
};

Scenario scenario_from_config(const KeyValueConfig& config, const Scenario& defaults = {});

/// Engine parameters at matched resonances for Gamma = gamma_ratio * gamma_m,
/// plus the helium operating field. A nonzero delta_b_over_b moves the atoms
/// off the matched field by delta_b_over_b * B.
struct ScenarioPoint {
  PhysicalParams params;
  DerivedParams derived;
  helium::OperatingPoint field;
};

ScenarioPoint matched_point(const Scenario& scenario, double gamma_ratio,
                            double delta_b_over_b = 0.0);

enum class SweepKind { GammaRatio, FieldError, SqueezingInput };

struct GridSpec {
  bool logarithmic = true;
  double min = 1e-3;
  double max = 1e2;
  int points = 61;
};

/// Throws InvalidParameter unless min < max, points >= 2 and min > 0 for log.
std::vector<double> make_grid(const GridSpec& grid);

struct SweepSpec {
  SweepKind kind = SweepKind::GammaRatio;
  GridSpec grid;
  Scenario fixed;
  std::vector<double> db_over_b = {0.0, 1e-4, 4e-4};
  int threads = 1;
};

struct SweepRow {
  double value = 0.0;  // gamma_ratio, or input X variance e^{-2r} for SqueezingInput
  double gamma_ratio = 0.0;
  double db_over_b = 0.0;
  double field_mG = 0.0;
  double gamma_F = 0.0;
  double analytic_var_I_y = 0.0;
  double analytic_var_S_y = 0.0;
  double var_I_x = 0.0;
  double var_I_y = 0.0;
  double var_S_x = 0.0;
  double var_S_y = 0.0;
  double var_X = 0.0;
  double var_Y = 0.0;
  double best_var_I = 0.0;
  double best_angle_I = 0.0;
  bool adiabatic_ok = false;
  bool analytic_regime_ok = false;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

/// Variances over a grid of Gamma / gamma_m.
std::vector<SweepRow> run_gamma_sweep(const SweepSpec& spec);
/// One gamma sweep per delta_B / B value, concatenated in list order.
std::vector<SweepRow> run_field_error_sweep(const SweepSpec& spec);
/// Sweep of the input X variance e^{-2r} at fixed gamma_ratio.
std::vector<SweepRow> run_squeezing_sweep(const SweepSpec& spec);
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_gnuplot_script(std::ostream& out, SweepKind kind, const std::string& csv_path);

/// Normalized Heisenberg products of a row, each expected >= 1.
bool heisenberg_ok(const SweepRow& row, double tolerance = 1e-9);

struct OperatingPointReport {
  double gamma_ratio = 0.0;
  helium::GasPopulations gas;
  DerivedParams derived;
  helium::OperatingPoint point;
  ValidityReport validity;
  helium::HomogeneityReport homogeneity;
};

/// Gas populations from the cell, then the matched operating point.
OperatingPointReport run_operating_point_report(const Scenario& scenario,
                                                const helium::GasCell& cell,
                                                double delta_b_over_b = 1e-4);
void write_text(std::ostream& out, const OperatingPointReport& report);
void write_csv(std::ostream& out, const OperatingPointReport& report);

struct InvariantOptions {
  std::uint64_t seed = 1;
  int draws = 50;
  int parseval_draws = 10;
  /// Negative control: drop the exchange Langevin forces.
  bool remove_exchange_noise = false;
  double commutator_tolerance = 1e-8;
  double heisenberg_tolerance = 1e-9;
  double oracle_tolerance = 1e-6;
  double parseval_tolerance = 1e-4;
  /// Largest accepted max|lambda| / slowest rate of a draw.
  double max_stiffness = 300.0;
};

struct InvariantReport {
  int draws = 0;
  double worst_commutator = 0.0;   // relative error of (n, n, N, 1)
  double worst_cross = 0.0;        // |M_ab - M_ba| / max(n, N) for non-partners
  double worst_heisenberg = 0.0;   // max(1 - x * y) over species
  double worst_oracle = 0.0;       // relative Frobenius distance, unit commutators
  double worst_parseval = 0.0;
  bool commutator_ok = true;
  bool heisenberg_ok = true;
  bool oracle_ok = true;
  bool parseval_ok = true;

  bool all_pass() const { return commutator_ok && heisenberg_ok && oracle_ok && parseval_ok; }
};

/// Uniform deviate in [0, 1) built from the 53 high bits of one draw.
double uniform01(std::mt19937_64& rng);

/// Desk-scale random configuration with a strictly stable drift.
PhysicalParams random_stable_params(std::mt19937_64& rng, double max_stiffness = 300.0);

/// Removes the exchange diffusion entries (negative control).
void drop_exchange_noise(LangevinSystem& system);

InvariantReport run_invariant_suite(const InvariantOptions& options);
void write_text(std::ostream& out, const InvariantReport& report);

}  // namespace nucmem
