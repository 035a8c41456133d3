#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nucmem/langevin.hpp"
#include "nucmem/params.hpp"

namespace nucmem {

/// C = g^2 n / (kappa gamma).
double cooperativity(double g, double n, double kappa, double gamma);

/// Optical pumping rate level_factor * gamma * Omega^2 (1 + C) / Delta^2.
/// level_factor is 1 for the spin-1/2 model and 3 for the helium C9 line.
double pump_rate(double omega_rabi, double delta_one_photon, double gamma, double cooperativity,
                 int level_factor = 1);

/// Rabi frequency that produces `pump` through pump_rate.
double rabi_for_pump_rate(double pump, double delta_one_photon, double gamma,
                          double cooperativity, int level_factor = 1);

struct MemoryBandwidth {
  double rate = 0.0;  // Gamma_F = gamma_f Gamma / (gamma_m + Gamma)
  double time = 0.0;  // write / read time 1 / Gamma_F
};

MemoryBandwidth memory_bandwidth(double gamma_f, double gamma_m, double pump);

struct DerivedParams {
  double cooperativity = 0.0;
  double pump_rate = 0.0;
  double memory_bandwidth = 0.0;
  double light_shift = 0.0;                // Omega^2 / Delta
  double two_photon_detuning_tilde = 0.0;  // delta + Omega^2 / Delta
  int level_factor = 1;
};

DerivedParams derive(const PhysicalParams& params, int level_factor = 1);

struct AnalyticVariances {
  double var_I_y = 1.0;
  double var_S_y = 1.0;
  /// False when gamma_f is known and not << Gamma, gamma_m.
  bool regime_ok = true;
};

/// Closed-form matched-resonance variances, normalized to the coherent level.
AnalyticVariances analytic_variances(double pump, double gamma_m, double cooperativity, double r,
                                     std::optional<double> gamma_f = std::nullopt);

struct ValidityCheck {
  std::string name;
  double value = 0.0;   // achieved ratio (large side / small side)
  double required = 0.0;
  bool pass = false;
};

struct ValidityReport {
  std::vector<ValidityCheck> checks;
  bool all_pass() const;
  std::string failures() const;
};

/// Default reading of "much greater than".
inline constexpr double kValidityFactor = 10.0;

/// Adiabatic-elimination conditions for the reduced model.
ValidityReport adiabatic_validity(const PhysicalParams& params, double factor = kValidityFactor);

enum class ValidityPolicy { Enforce, Report };

struct ReducedModel {
  LangevinSystem system;  // basis S21, S12, I09, I90
  ValidityReport validity;
  DerivedParams derived;
};

/// Two-coherence model left after eliminating the optical coherence and the
/// cavity field. The squeezed input reaches S21 through
/// i (Omega g n / Delta) sqrt(2 / kappa) A_in and the optical noise through
/// -(Omega / Delta) f23. Throws ValidityViolation under Enforce when any
/// adiabatic condition fails.
ReducedModel reduce_adiabatic(const PhysicalParams& params,
                              ValidityPolicy policy = ValidityPolicy::Enforce,
                              double factor = kValidityFactor);

}  // namespace nucmem
