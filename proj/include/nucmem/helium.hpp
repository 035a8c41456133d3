#pragma once

#include <iosfwd>

#include "nucmem/adiabatic.hpp"
#include "nucmem/params.hpp"

namespace nucmem::helium {

// Low-field magnetic moments over h, in Hz per gauss.
inline constexpr double kMuNuclearOverH = 3.24e3;
inline constexpr double kMuMetastableOverH = 1.87e6;
// Metastable wall relaxation at the reference pressure, s^-1.
inline constexpr double kGamma0Reference = 1e3;
inline constexpr double kReferencePressureTorr = 1.0;
// Wavelength of the C9 line, m (informational).
inline constexpr double kLambdaC9 = 1.08e-6;
// Above this field the linear Zeeman model is no longer trusted, gauss.
inline constexpr double kLinearZeemanLimitGauss = 50.0;
// Pump-rate scaling on the C9 line relative to the spin-1/2 model.
inline constexpr int kHeliumLevelFactor = 3;

inline constexpr double kBoltzmann = 1.380649e-23;    // J / K
inline constexpr double kPascalPerTorr = 101325.0 / 760.0;

struct GasCell {
  double pressure_torr = 1.0;
  double volume_cm3 = 50.0;
  double temperature_k = 300.0;
  double metastable_density_cm3 = 3.2e10;
};

struct GasPopulations {
  double n_ground = 0.0;  // N, ideal gas
  double n_meta = 0.0;    // n
  double gamma_f = 0.0;   // gamma_m n / N
  double gamma_0 = 0.0;   // inversely proportional to pressure
};

GasPopulations gas_populations(const GasCell& cell, double gamma_m);

/// Reads pressure, volume, temperature, metastable_density from a config.
GasCell gas_cell_from_config(const KeyValueConfig& config, const GasCell& defaults = {});

enum class Species { Nuclear, Metastable };

/// Angular Larmor frequency 2 pi (mu / h) B, rad/s, for B in gauss.
double larmor(double field_gauss, Species species);

/// True while the linear (low-field) Zeeman model can be trusted.
inline bool linear_zeeman_ok(double field_gauss) {
  return field_gauss <= kLinearZeemanLimitGauss && field_gauss >= -kLinearZeemanLimitGauss;
}

struct OperatingPoint {
  double field_gauss = 0.0;
  double delta_las = 0.0;    // omega_1 - omega_2, rad/s
  double light_shift = 0.0;  // Omega^2 / Delta, rad/s
  double omega_I = 0.0;
  double omega_S = 0.0;
  double residual_metastable = 0.0;  // |omega_S + Omega^2/Delta - delta_las| / scale
  double residual_ground = 0.0;      // |omega_I - delta_las| / scale
  bool linear_zeeman = true;         // field within the low-field limit
};

/// Field and laser frequency difference at which both coherences are
/// resonant: omega_S(B) + Omega^2 / Delta = omega_I(B) = delta_las.
/// Throws ZeroDetuning for Delta = 0 and NoPositiveField when the light
/// shift has the sign that would need B < 0.
OperatingPoint match_operating_point(double omega_rabi, double delta_one_photon);

/// Operating point of the C9 line for a target pump rate (factor-3 inversion).
OperatingPoint helium_operating_point(double pump, double delta_one_photon, double gamma,
                                      double cooperativity);

struct DetuningShift {
  double delta_tilde = 0.0;   // metastable two-photon detuning shift, rad/s
  double delta_ground = 0.0;  // ground-state detuning shift, rad/s
};

/// Detuning changes seen by atoms sitting in a field offset delta_B (gauss)
/// from the matched value; the light shift does not change.
DetuningShift field_error_detunings(double delta_b_gauss);

struct HomogeneityReport {
  /// Gamma_F / omega_I(B): keeps the ground-state dephasing below the
  /// memory bandwidth (mu_I dB < hbar Gamma_F).
  double exact_threshold = 0.0;
  /// 1 / (600 |Delta| / (gamma C)), the Gamma << gamma_m form.
  double regime_threshold = 0.0;
  /// Coefficient that replaces 600 for the actual rates:
  /// ((gamma_m + Gamma) / gamma_f) (mu_I / mu_S) / 3.
  double regime_coefficient = 0.0;
  bool regime_applies = false;  // Gamma <= gamma_m / 10
  double binding_threshold = 0.0;
  double delta_b_over_b = 0.0;
  bool pass = false;
};

inline constexpr double kRegimeCoefficient = 600.0;

HomogeneityReport homogeneity_check(const PhysicalParams& params, const DerivedParams& derived,
                                    const OperatingPoint& point, double delta_b_over_b);

}  // namespace nucmem::helium
