#include "nucmem/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nucmem/errors.hpp"

namespace nucmem {

namespace {

constexpr cplx kI{0.0, 1.0};

Eigen::Index idx(Op op) { return static_cast<Eigen::Index>(op); }

// Fills the conjugate rows from the annihilation-like ones.
void mirror_rows(Eigen::MatrixXcd& m) {
  for (Op row : {Op::S21, Op::S23, Op::I09, Op::A}) {
    for (Op col : kFullBasis) {
      m(idx(conjugate(row)), idx(conjugate(col))) = std::conj(m(idx(row), idx(col)));
    }
  }
}

Eigen::VectorXd full_scale(const PhysicalParams& p) {
  Eigen::VectorXd s(8);
  s << p.n_meta, p.n_meta, p.n_meta, p.n_meta, p.n_ground, p.n_ground, 1.0, 1.0;
  return s;
}

}  // namespace

Op conjugate(Op op) {
  switch (op) {
    case Op::S21: return Op::S12;
    case Op::S12: return Op::S21;
    case Op::S23: return Op::S32;
    case Op::S32: return Op::S23;
    case Op::I09: return Op::I90;
    case Op::I90: return Op::I09;
    case Op::A: return Op::Adag;
    case Op::Adag: return Op::A;
  }
  return op;
}

std::string_view label(Op op) {
  switch (op) {
    case Op::S21: return "S21";
    case Op::S12: return "S12";
    case Op::S23: return "S23";
    case Op::S32: return "S32";
    case Op::I09: return "I09";
    case Op::I90: return "I90";
    case Op::A: return "A";
    case Op::Adag: return "Adag";
  }
  return "?";
}

std::optional<Eigen::Index> LangevinSystem::index_of(Op op) const {
  const auto it = std::find(basis.begin(), basis.end(), op);
  if (it == basis.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - basis.begin());
}

Eigen::Index LangevinSystem::require_index(Op op) const {
  if (const auto i = index_of(op)) return *i;
  throw InvalidParameter(std::string("operator not in basis: ") + std::string(label(op)));
}

Eigen::MatrixXcd build_full_drift(const PhysicalParams& p) {
  validate(p);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(8, 8);
  const double n = p.n_meta;

  a(idx(Op::S21), idx(Op::S21)) = -(p.gamma_m + p.gamma_0 - kI * p.delta_meta);
  a(idx(Op::S21), idx(Op::I09)) = p.gamma_f;
  a(idx(Op::S21), idx(Op::S23)) = -kI * p.omega_rabi;

  a(idx(Op::S23), idx(Op::S23)) = -(p.gamma + kI * p.delta_one_photon);
  a(idx(Op::S23), idx(Op::S21)) = -kI * p.omega_rabi;
  a(idx(Op::S23), idx(Op::A)) = -kI * p.g_coupling * n;

  a(idx(Op::I09), idx(Op::I09)) = -(p.gamma_f - kI * p.delta_ground);
  a(idx(Op::I09), idx(Op::S21)) = p.gamma_m;

  a(idx(Op::A), idx(Op::A)) = -(p.kappa + kI * p.delta_cavity);
  a(idx(Op::A), idx(Op::S23)) = -kI * p.g_coupling;

  mirror_rows(a);
  return a;
}

Eigen::MatrixXcd build_full_diffusion(const PhysicalParams& p, const InputFieldStats& in) {
  validate(p);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(8, 8);
  const double n = p.n_meta;
  const double exchange = 2.0 * n * p.gamma_m;

  // Wall relaxation returns the metastable coherence to the polarized state,
  // so it carries its own Einstein-relation noise.
  d(idx(Op::S21), idx(Op::S12)) = exchange + 2.0 * n * p.gamma_0;
  d(idx(Op::I09), idx(Op::I90)) = exchange;
  d(idx(Op::S21), idx(Op::I90)) = -exchange;
  d(idx(Op::I09), idx(Op::S12)) = -exchange;
  d(idx(Op::S23), idx(Op::S32)) = 2.0 * n * p.gamma;

  const double two_kappa = 2.0 * p.kappa;
  d(idx(Op::A), idx(Op::Adag)) = two_kappa * (in.n_therm + 1.0);
  d(idx(Op::Adag), idx(Op::A)) = two_kappa * in.n_therm;
  d(idx(Op::A), idx(Op::A)) = two_kappa * in.m_anom;
  d(idx(Op::Adag), idx(Op::Adag)) = two_kappa * in.m_anom;
  return d;
}

LangevinSystem build_full_system(const PhysicalParams& params) {
  LangevinSystem sys;
  sys.basis.assign(std::begin(kFullBasis), std::end(kFullBasis));
  sys.scale = full_scale(params);
  sys.drift = build_full_drift(params);
  sys.diffusion = build_full_diffusion(params, InputFieldStats::squeezed_vacuum(params.r_squeeze));
  sys.vacuum_diffusion = build_full_diffusion(params, InputFieldStats::vacuum());
  return sys;
}

LangevinSystem restrict_to(const LangevinSystem& system, std::span<const Op> ops) {
  std::vector<Eigen::Index> keep;
  LangevinSystem out;
  for (Op op : ops) {
    keep.push_back(system.require_index(op));
    out.basis.push_back(op);
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  out.scale.resize(k);
  out.drift.resize(k, k);
  out.diffusion.resize(k, k);
  out.vacuum_diffusion.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.scale(i) = system.scale(keep[i]);
    for (Eigen::Index j = 0; j < k; ++j) {
      out.drift(i, j) = system.drift(keep[i], keep[j]);
      out.diffusion(i, j) = system.diffusion(keep[i], keep[j]);
      out.vacuum_diffusion(i, j) = system.vacuum_diffusion(keep[i], keep[j]);
    }
  }
  return out;
}

LangevinSystem build_field_only(double kappa, double delta_cavity, const InputFieldStats& in) {
  if (!(kappa > 0.0) || !std::isfinite(kappa) || !std::isfinite(delta_cavity)) {
    throw InvalidParameter("field-only system needs finite kappa > 0");
  }
  LangevinSystem sys;
  sys.basis = {Op::A, Op::Adag};
  sys.scale = Eigen::VectorXd::Ones(2);
  sys.drift = Eigen::MatrixXcd::Zero(2, 2);
  sys.drift(0, 0) = -(kappa + kI * delta_cavity);
  sys.drift(1, 1) = std::conj(sys.drift(0, 0));
  auto field_block = [kappa](const InputFieldStats& s) {
    Eigen::MatrixXcd d(2, 2);
    d << 2.0 * kappa * s.m_anom, 2.0 * kappa * (s.n_therm + 1.0),
        2.0 * kappa * s.n_therm, 2.0 * kappa * s.m_anom;
    return d;
  };
  sys.diffusion = field_block(in);
  sys.vacuum_diffusion = field_block(InputFieldStats::vacuum());
  return sys;
}

LangevinSystem normalize(const LangevinSystem& system) {
  LangevinSystem out = system;
  const Eigen::VectorXd t = system.scale.cwiseSqrt().cwiseInverse();
  const Eigen::VectorXd t_inv = system.scale.cwiseSqrt();
  out.drift = t.asDiagonal() * system.drift * t_inv.asDiagonal();
  out.diffusion = t.asDiagonal() * system.diffusion * t.asDiagonal();
  out.vacuum_diffusion = t.asDiagonal() * system.vacuum_diffusion * t.asDiagonal();
  out.scale = Eigen::VectorXd::Ones(system.size());
  return out;
}

StabilityReport check_stability(const LangevinSystem& system) {
  const LangevinSystem unit = normalize(system);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(unit.drift, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverFailure("eigenvalue computation of the drift matrix did not converge");
  }
  StabilityReport report;
  report.eigenvalues = solver.eigenvalues();
  report.margin = -std::numeric_limits<double>::infinity();
  for (const auto& l : report.eigenvalues) {
    report.margin = std::max(report.margin, l.real());
    report.max_rate = std::max(report.max_rate, std::abs(l));
  }
  double smallest_diagonal = report.max_rate;
  for (Eigen::Index i = 0; i < unit.drift.rows(); ++i) {
    const double r = std::abs(unit.drift(i, i));
    if (r > 0.0) smallest_diagonal = std::min(smallest_diagonal, r);
  }
  report.conserved_tolerance = kConservedFraction * smallest_diagonal;
  const double conserved = report.conserved_tolerance;
  report.slowest_rate = std::numeric_limits<double>::infinity();
  for (const auto& l : report.eigenvalues) {
    if (std::abs(l.real()) > conserved) {
      report.slowest_rate = std::min(report.slowest_rate, std::abs(l.real()));
    }
  }
  return report;
}

}  // namespace nucmem
