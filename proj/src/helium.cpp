#include "nucmem/helium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nucmem/errors.hpp"

namespace nucmem::helium {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCm3 = 1e-6;  // m^3

}  // namespace

GasPopulations gas_populations(const GasCell& cell, double gamma_m) {
  if (!(cell.pressure_torr > 0.0) || !(cell.volume_cm3 > 0.0) || !(cell.temperature_k > 0.0) ||
      !(cell.metastable_density_cm3 > 0.0) || !(gamma_m > 0.0)) {
    throw InvalidParameter("gas cell quantities and gamma_m must be positive");
  }
  GasPopulations g;
  g.n_ground = cell.pressure_torr * kPascalPerTorr * cell.volume_cm3 * kCm3 /
               (kBoltzmann * cell.temperature_k);
  g.n_meta = cell.metastable_density_cm3 * cell.volume_cm3;
  if (!(g.n_meta < g.n_ground)) {
    throw InvalidParameter("metastable population must be a small fraction of the gas");
  }
  g.gamma_f = gamma_m * g.n_meta / g.n_ground;
  g.gamma_0 = kGamma0Reference * kReferencePressureTorr / cell.pressure_torr;
  return g;
}

GasCell gas_cell_from_config(const KeyValueConfig& c, const GasCell& defaults) {
  GasCell cell = defaults;
  cell.pressure_torr = c.number_or("pressure", cell.pressure_torr);
  cell.volume_cm3 = c.number_or("volume", cell.volume_cm3);
  cell.temperature_k = c.number_or("temperature", cell.temperature_k);
  cell.metastable_density_cm3 = c.number_or("metastable_density", cell.metastable_density_cm3);
  if (!(cell.pressure_torr > 0.0) || !(cell.volume_cm3 > 0.0) || !(cell.temperature_k > 0.0) ||
      !(cell.metastable_density_cm3 > 0.0)) {
    throw ConfigError("gas cell entries must be positive");
  }
  return cell;
}

double larmor(double field_gauss, Species species) {
  const double mu = species == Species::Nuclear ? kMuNuclearOverH : kMuMetastableOverH;
  return kTwoPi * mu * field_gauss;
}

OperatingPoint match_operating_point(double omega_rabi, double delta_one_photon) {
  if (delta_one_photon == 0.0) throw ZeroDetuning("light shift undefined at Delta = 0");
  OperatingPoint op;
  op.light_shift = omega_rabi * omega_rabi / delta_one_photon;
  // Subtracting the two resonance conditions: 2 pi (mu_S - mu_I) B / h = -Omega^2 / Delta.
  op.field_gauss = -op.light_shift / (kTwoPi * (kMuMetastableOverH - kMuNuclearOverH));
  if (op.field_gauss < 0.0) {
    throw NoPositiveField(
        "light shift Omega^2/Delta is positive; matching both resonances needs Delta < 0");
  }
  op.linear_zeeman = linear_zeeman_ok(op.field_gauss);
  op.omega_I = larmor(op.field_gauss, Species::Nuclear);
  op.omega_S = larmor(op.field_gauss, Species::Metastable);
  op.delta_las = op.omega_I;
  const double scale = std::max({std::abs(op.delta_las), std::abs(op.light_shift),
                                 std::numeric_limits<double>::min()});
  op.residual_metastable = std::abs(op.omega_S + op.light_shift - op.delta_las) / scale;
  op.residual_ground = std::abs(op.omega_I - op.delta_las) / scale;
  return op;
}

OperatingPoint helium_operating_point(double pump, double delta_one_photon, double gamma,
                                      double cooperativity) {
  const double omega =
      rabi_for_pump_rate(pump, delta_one_photon, gamma, cooperativity, kHeliumLevelFactor);
  return match_operating_point(omega, delta_one_photon);
}

DetuningShift field_error_detunings(double delta_b_gauss) {
  return {larmor(delta_b_gauss, Species::Metastable), larmor(delta_b_gauss, Species::Nuclear)};
}

HomogeneityReport homogeneity_check(const PhysicalParams& p, const DerivedParams& d,
                                    const OperatingPoint& point, double delta_b_over_b) {
  HomogeneityReport r;
  r.delta_b_over_b = delta_b_over_b;
  const double omega_i = point.omega_I;
  r.exact_threshold = omega_i > 0.0 ? d.memory_bandwidth / omega_i
                                    : std::numeric_limits<double>::infinity();
  const double width_ratio = std::abs(p.delta_one_photon) / (p.gamma * d.cooperativity);
  r.regime_threshold = 1.0 / (kRegimeCoefficient * width_ratio);
  r.regime_coefficient = ((p.gamma_m + d.pump_rate) / p.gamma_f) *
                         (kMuNuclearOverH / kMuMetastableOverH) / kHeliumLevelFactor;
  r.regime_applies = d.pump_rate * 10.0 <= p.gamma_m;
  r.binding_threshold = std::min(r.exact_threshold, r.regime_threshold);
  r.pass = std::abs(delta_b_over_b) < r.binding_threshold;
  return r;
}

}  // namespace nucmem::helium
