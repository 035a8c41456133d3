#include "nucmem/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nucmem/csv.hpp"
#include "nucmem/errors.hpp"

namespace nucmem {

namespace {

void require_level_factor(int level_factor) {
  if (level_factor != 1 && level_factor != 3) {
    throw InvalidParameter("level_factor must be 1 or 3");
  }
}

}  // namespace

double cooperativity(double g, double n, double kappa, double gamma) {
  if (!(kappa > 0.0) || !(gamma > 0.0)) {
    throw InvalidParameter("cooperativity needs kappa > 0 and gamma > 0");
  }
  return g * g * n / (kappa * gamma);
}

double pump_rate(double omega_rabi, double delta, double gamma, double c, int level_factor) {
  require_level_factor(level_factor);
  if (delta == 0.0) throw ZeroDetuning("pump rate undefined at zero one-photon detuning");
  return level_factor * gamma * omega_rabi * omega_rabi * (1.0 + c) / (delta * delta);
}

double rabi_for_pump_rate(double pump, double delta, double gamma, double c, int level_factor) {
  require_level_factor(level_factor);
  if (delta == 0.0) throw ZeroDetuning("pump rate undefined at zero one-photon detuning");
  if (pump < 0.0 || !(gamma > 0.0) || c < 0.0) {
    throw InvalidParameter("pump inversion needs pump >= 0, gamma > 0, C >= 0");
  }
  return std::sqrt(pump * delta * delta / (level_factor * gamma * (1.0 + c)));
}

MemoryBandwidth memory_bandwidth(double gamma_f, double gamma_m, double pump) {
  if (gamma_f < 0.0 || gamma_m < 0.0 || pump < 0.0 || !(gamma_m + pump > 0.0)) {
    throw InvalidParameter("memory bandwidth needs non-negative rates with gamma_m + Gamma > 0");
  }
  const double rate = gamma_f * pump / (gamma_m + pump);
  return {rate, 1.0 / rate};
}

DerivedParams derive(const PhysicalParams& p, int level_factor) {
  validate(p);
  DerivedParams d;
  d.level_factor = level_factor;
  d.cooperativity = cooperativity(p.g_coupling, p.n_meta, p.kappa, p.gamma);
  d.pump_rate = pump_rate(p.omega_rabi, p.delta_one_photon, p.gamma, d.cooperativity, level_factor);
  d.memory_bandwidth = memory_bandwidth(p.gamma_f, p.gamma_m, d.pump_rate).rate;
  d.light_shift = p.omega_rabi * p.omega_rabi / p.delta_one_photon;
  d.two_photon_detuning_tilde = p.delta_meta + d.light_shift;
  return d;
}

AnalyticVariances analytic_variances(double pump, double gamma_m, double c, double r,
                                     std::optional<double> gamma_f) {
  if (pump < 0.0 || !(gamma_m > 0.0) || c < 0.0 || !std::isfinite(r)) {
    throw InvalidParameter("analytic variances need Gamma >= 0, gamma_m > 0, C >= 0, finite r");
  }
  const double transfer = (c / (c + 1.0)) * (1.0 - std::exp(-2.0 * r));
  AnalyticVariances v;
  v.var_I_y = 1.0 - gamma_m / (pump + gamma_m) * transfer;
  v.var_S_y = 1.0 - pump / (pump + gamma_m) * transfer;
  if (gamma_f) {
    v.regime_ok = *gamma_f * kValidityFactor <= std::min(pump, gamma_m);
  }
  return v;
}

bool ValidityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidityCheck& c) { return c.pass; });
}

std::string ValidityReport::failures() const {
  std::ostringstream out;
  for (const auto& c : checks) {
    if (c.pass) continue;
    out << c.name << " (ratio " << format_scientific(c.value) << " < required "
        << format_scientific(c.required) << "); ";
  }
  return out.str();
}

ValidityReport adiabatic_validity(const PhysicalParams& p, double factor) {
  const double c = cooperativity(p.g_coupling, p.n_meta, p.kappa, p.gamma);
  const double slow = std::max(p.gamma_m, p.gamma_f);
  // The optical coherence relaxes at |gamma + i Delta| in the Raman regime.
  const double optical_rate = std::hypot(p.gamma, p.delta_one_photon);
  const double abs_delta = std::abs(p.delta_one_photon);
  const double compensation = p.delta_one_photon != 0.0 ? c * p.kappa * p.gamma / p.delta_one_photon
                                                        : 0.0;

  ValidityReport report;
  auto add = [&](std::string name, double ratio, double required) {
    report.checks.push_back({std::move(name), ratio, required, ratio >= required});
  };
  add("optical_rate_over_exchange", optical_rate / slow, factor);
  add("kappa_over_exchange", p.kappa / slow, factor);
  add("raman_detuning_over_gamma", abs_delta / p.gamma, factor);
  // The drive must not admix the optical coherence into the spin mode.
  add("detuning_over_rabi",
      p.omega_rabi != 0.0 ? abs_delta / std::abs(p.omega_rabi) : std::numeric_limits<double>::infinity(),
      factor);
  add("detuning_over_cooperative_width",
      c > 0.0 ? abs_delta / (c * p.gamma) : std::numeric_limits<double>::infinity(), factor);
  // Delta_c = C kappa gamma / Delta; reported as 1 / relative mismatch.
  const double mismatch = std::abs(p.delta_cavity - compensation);
  const double scale = std::max(std::abs(compensation), p.kappa * 1e-12);
  add("cavity_compensation", mismatch > 0.0 ? scale / mismatch : std::numeric_limits<double>::infinity(),
      1e6);
  return report;
}

ReducedModel reduce_adiabatic(const PhysicalParams& p, ValidityPolicy policy, double factor) {
  validate(p);
  ReducedModel out;
  out.validity = adiabatic_validity(p, factor);
  if (policy == ValidityPolicy::Enforce && !out.validity.all_pass()) {
    throw ValidityViolation("adiabatic elimination not justified: " + out.validity.failures());
  }
  if (p.delta_one_photon == 0.0) throw ZeroDetuning("adiabatic reduction needs Delta != 0");
  out.derived = derive(p, 1);
  const DerivedParams& d = out.derived;

  constexpr cplx kI{0.0, 1.0};
  const double n = p.n_meta;
  const double pump = d.pump_rate;
  const double share = d.cooperativity / (1.0 + d.cooperativity);

  LangevinSystem& sys = out.system;
  sys.basis = {Op::S21, Op::S12, Op::I09, Op::I90};
  sys.scale.resize(4);
  sys.scale << n, n, p.n_ground, p.n_ground;
  sys.drift = Eigen::MatrixXcd::Zero(4, 4);
  sys.drift(0, 0) = -(p.gamma_m + p.gamma_0 + pump - kI * d.two_photon_detuning_tilde);
  sys.drift(0, 2) = p.gamma_f;
  sys.drift(2, 2) = -(p.gamma_f - kI * p.delta_ground);
  sys.drift(2, 0) = p.gamma_m;
  sys.drift(1, 1) = std::conj(sys.drift(0, 0));
  sys.drift(1, 3) = p.gamma_f;
  sys.drift(3, 3) = std::conj(sys.drift(2, 2));
  sys.drift(3, 1) = p.gamma_m;

  auto assemble = [&](const InputFieldStats& in) {
    Eigen::MatrixXcd dm = Eigen::MatrixXcd::Zero(4, 4);
    const double exchange = 2.0 * n * p.gamma_m;
    // f21 and the wall term, -(Omega/Delta) f23 -> 2 n Gamma / (1 + C),
    // the input port -> 2 n Gamma C / (1 + C) times the input moments.
    const double input = 2.0 * n * pump * share;
    dm(0, 1) = exchange + 2.0 * n * p.gamma_0 + 2.0 * n * pump / (1.0 + d.cooperativity) +
               input * (in.n_therm + 1.0);
    dm(1, 0) = input * in.n_therm;
    dm(0, 0) = -input * in.m_anom;
    dm(1, 1) = -input * in.m_anom;
    dm(2, 3) = exchange;
    dm(0, 3) = -exchange;
    dm(2, 1) = -exchange;
    return dm;
  };
  sys.diffusion = assemble(InputFieldStats::squeezed_vacuum(p.r_squeeze));
  sys.vacuum_diffusion = assemble(InputFieldStats::vacuum());
  return out;
}

}  // namespace nucmem
