#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace nucmem {

/// One configuration of the cavity + metastable + ground-state system.
///
/// Rates are in s^-1, detunings and Rabi frequency in rad/s, atom numbers are
/// carried as doubles (the ground-state count reaches 1e18).
struct PhysicalParams {
  double gamma = 0.0;             // optical coherence decay
  double kappa = 0.0;             // cavity field decay
  double gamma_m = 0.0;           // metastable exchange rate
  double gamma_f = 0.0;           // ground-state exchange rate
  double gamma_0 = 0.0;           // metastable wall relaxation
  double omega_rabi = 0.0;        // coherent drive, real
  double delta_one_photon = 0.0;  // optical detuning
  double delta_meta = 0.0;        // two-photon detuning before light shift
  double delta_ground = 0.0;      // ground-state detuning
  double delta_cavity = 0.0;      // cavity detuning
  double g_coupling = 0.0;
  double n_meta = 0.0;
  double n_ground = 0.0;
  double r_squeeze = 0.0;         // r > 0 squeezes the X quadrature of A_in
};

/// Relative tolerance of the gamma_m / gamma_f = N / n check.
inline constexpr double kExchangeBalanceTolerance = 1e-12;

/// Throws InvalidParameter if any invariant of PhysicalParams is broken.
void validate(const PhysicalParams& params);

/// Returns a copy with gamma_f = gamma_m * n / N.
PhysicalParams with_balanced_exchange(PhysicalParams params);

/// Second moments of the broadband squeezed-vacuum input.
struct InputFieldStats {
  double n_therm = 0.0;  // sinh^2 r
  double m_anom = 0.0;   // -sinh r cosh r

  static InputFieldStats squeezed_vacuum(double r);
  static InputFieldStats vacuum() { return {}; }
};

/// Flat `key = value` configuration with `#` comments.
class KeyValueConfig {
public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<double> number(const std::string& key) const;
  std::optional<std::string> text(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::map<std::string, std::string>& entries() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

/// Reads PhysicalParams fields by name, starting from `defaults`. A missing
/// gamma_f is derived from exchange balance; a present one must satisfy it.
PhysicalParams params_from_config(const KeyValueConfig& config,
                                  const PhysicalParams& defaults = {});

}  // namespace nucmem
