#include "nucmem/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss.hpp>

#include "nucmem/csv.hpp"
#include "nucmem/errors.hpp"

namespace nucmem {

namespace {

using MatrixXcld = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

constexpr int kRefinementSteps = 3;
constexpr double kResidualTolerance = 1e-10;
constexpr long long kMaxIntegrationSteps = 200'000'000;

Eigen::MatrixXcd unscale(const Eigen::MatrixXcd& m, const Eigen::VectorXd& scale) {
  const Eigen::VectorXd root = scale.cwiseSqrt();
  return root.asDiagonal() * m * root.asDiagonal();
}

Eigen::MatrixXcd lyapunov_operator(const Eigen::MatrixXcd& a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(n * n, n * n);
  // column-major vec: (i, k) -> i + k * n
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index row = i + k * n;
      for (Eigen::Index j = 0; j < n; ++j) op(row, j + k * n) += a(i, j);
      for (Eigen::Index l = 0; l < n; ++l) op(row, i + l * n) += a(k, l);
    }
  }
  return op;
}

MatrixXcld residual_extended(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& m,
                             const Eigen::MatrixXcd& d) {
  const MatrixXcld al = a.cast<std::complex<long double>>();
  const MatrixXcld ml = m.cast<std::complex<long double>>();
  return al * ml + ml * al.transpose() + d.cast<std::complex<long double>>();
}

Eigen::MatrixXcd lyapunov_rhs(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& m,
                              const Eigen::MatrixXcd& d) {
  return a * m + m * a.transpose() + d;
}

MomentMatrix make_moments(const LangevinSystem& system, Eigen::MatrixXcd normalized_moments) {
  MomentMatrix out;
  out.basis = system.basis;
  out.scale = system.scale;
  out.moments = unscale(normalized_moments, system.scale);
  const double dnorm = system.diffusion.norm();
  const MatrixXcld r = residual_extended(system.drift, out.moments, system.diffusion);
  long double acc = 0.0L;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += std::norm(r.data()[i]);
  out.relative_residual =
      dnorm > 0.0 ? static_cast<double>(std::sqrt(acc)) / dnorm : static_cast<double>(std::sqrt(acc));
  return out;
}

std::pair<Eigen::Index, Eigen::Index> species_pair(const std::vector<Op>& basis, Species species) {
  Op a = Op::I09;
  if (species == Species::Meta) a = Op::S21;
  if (species == Species::Field) a = Op::A;
  const auto ia = std::find(basis.begin(), basis.end(), a);
  const auto ib = std::find(basis.begin(), basis.end(), conjugate(a));
  if (ia == basis.end() || ib == basis.end()) {
    throw InvalidParameter("species not present in basis");
  }
  return {ia - basis.begin(), ib - basis.begin()};
}

bool has_species(const std::vector<Op>& basis, Species species) {
  Op a = Op::I09;
  if (species == Species::Meta) a = Op::S21;
  if (species == Species::Field) a = Op::A;
  return std::find(basis.begin(), basis.end(), a) != basis.end() &&
         std::find(basis.begin(), basis.end(), conjugate(a)) != basis.end();
}

// Normalized cos(t) X + sin(t) Y variance of the pair (a, a^dag).
double pair_quadrature(const Eigen::MatrixXcd& m, Eigen::Index a, Eigen::Index b, double scale,
                       double angle) {
  const cplx phase = std::polar(1.0, -2.0 * angle);
  const cplx v = m(a, b) + m(b, a) + phase * m(a, a) + std::conj(phase) * m(b, b);
  return v.real() / scale;
}

QuadratureOptimum optimum_from(double vx, double vy, double vd) {
  // vd is the variance along angle pi/4; off-diagonal covariance follows.
  const double c = vd - 0.5 * (vx + vy);
  const double tol = 1e-12 * (std::abs(vx) + std::abs(vy));
  if (std::abs(vx - vy) <= tol && std::abs(c) <= tol) return {0.0, vx, true};
  Eigen::Matrix2d cov;
  cov << vx, c, c, vy;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
  const Eigen::Vector2d v = eig.eigenvectors().col(0);
  double angle = std::atan2(v(1), v(0));
  if (angle < 0.0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi) angle -= std::numbers::pi;
  return {angle, eig.eigenvalues()(0), false};
}

Eigen::MatrixXcd spectrum_of(const LangevinSystem& unit, const Eigen::MatrixXcd& diffusion,
                             double omega) {
  const Eigen::Index n = unit.size();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const cplx iw{0.0, omega};
  const Eigen::MatrixXcd left = (unit.drift + iw * id).partialPivLu().inverse();
  const Eigen::MatrixXcd right = (unit.drift.transpose() - iw * id).partialPivLu().inverse();
  return left * diffusion * right;
}

}  // namespace

cplx MomentMatrix::at(Op a, Op b) const {
  const auto ia = index_of(a);
  const auto ib = index_of(b);
  if (!ia || !ib) throw InvalidParameter("operator not in moment basis");
  return moments(*ia, *ib);
}

std::optional<Eigen::Index> MomentMatrix::index_of(Op op) const {
  const auto it = std::find(basis.begin(), basis.end(), op);
  if (it == basis.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - basis.begin());
}

cplx MomentMatrix::commutator(Op op) const { return at(op, conjugate(op)) - at(conjugate(op), op); }

MomentMatrix solve_steady_moments(const LangevinSystem& system) {
  const StabilityReport stability = check_stability(system);
  if (!stability.stable()) {
    throw UnstableSystem("drift is not strictly stable; steady state undefined", stability.margin);
  }
  const LangevinSystem unit = normalize(system);
  const Eigen::Index n = unit.size();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lyapunov_operator(unit.drift));
  const double rcond = lu.rcond();
  if (!(rcond > std::numeric_limits<double>::epsilon())) {
    throw SingularSolve("vectorized Lyapunov operator is numerically singular", rcond);
  }

  Eigen::MatrixXcd m(n, n);
  {
    const Eigen::VectorXcd rhs = -Eigen::Map<const Eigen::VectorXcd>(unit.diffusion.data(), n * n);
    const Eigen::VectorXcd x = lu.solve(rhs);
    m = Eigen::Map<const Eigen::MatrixXcd>(x.data(), n, n);
  }
  // Residuals in extended precision recover the digits lost to the spread
  // of rates (exchange rates of a few s^-1 next to optical detunings).
  for (int step = 0; step < kRefinementSteps; ++step) {
    const Eigen::MatrixXcd r =
        residual_extended(unit.drift, m, unit.diffusion).cast<cplx>();
    const Eigen::VectorXcd x = lu.solve(-Eigen::Map<const Eigen::VectorXcd>(r.data(), n * n));
    m += Eigen::Map<const Eigen::MatrixXcd>(x.data(), n, n);
  }

  MomentMatrix out = make_moments(system, m);
  if (!(out.relative_residual <= kResidualTolerance)) {
    throw SingularSolve("Lyapunov residual above tolerance after refinement", rcond);
  }
  return out;
}

MomentMatrix integrate_moments(const LangevinSystem& system, double t_final, double dt) {
  const StabilityReport stability = check_stability(system);
  if (stability.margin > stability.conserved_tolerance) {
    throw UnstableSystem("drift has growing modes; moments diverge", stability.margin);
  }
  if (!(dt > 0.0) || !(t_final > 0.0)) throw StepSizeRejected("dt and t_final must be positive");
  const double dt_max = 0.1 / stability.max_rate;
  if (dt > dt_max * (1.0 + 1e-12)) {
    throw StepSizeRejected("dt exceeds 0.1 / max|lambda| = " + format_scientific(dt_max));
  }
  if (std::isfinite(stability.slowest_rate)) {
    const double t_min = 20.0 / stability.slowest_rate;
    if (t_final < t_min * (1.0 - 1e-12)) {
      throw StepSizeRejected("t_final below 20 / slowest rate = " + format_scientific(t_min));
    }
  }
  const double steps_real = std::ceil(t_final / dt);
  if (steps_real > static_cast<double>(kMaxIntegrationSteps)) {
    throw StepSizeRejected("integration would need more than 2e8 steps");
  }
  const auto steps = static_cast<long long>(steps_real);
  const double h = t_final / static_cast<double>(steps);

  const LangevinSystem unit = normalize(system);
  const Eigen::MatrixXcd& a = unit.drift;
  const Eigen::MatrixXcd& d = unit.diffusion;
  const Eigen::Index n = unit.size();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n);
  for (long long s = 0; s < steps; ++s) {
    k1 = lyapunov_rhs(a, m, d);
    k2 = lyapunov_rhs(a, m + 0.5 * h * k1, d);
    k3 = lyapunov_rhs(a, m + 0.5 * h * k2, d);
    k4 = lyapunov_rhs(a, m + h * k3, d);
    m += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return make_moments(system, m);
}

MomentMatrix integrate_moments(const LangevinSystem& system) {
  const StabilityReport stability = check_stability(system);
  const double dt = 0.1 / stability.max_rate;
  const double t_final =
      std::isfinite(stability.slowest_rate) ? 20.0 / stability.slowest_rate : 200.0 * dt;
  return integrate_moments(system, t_final, dt);
}

double quadrature_variance(const MomentMatrix& m, Species species, double angle) {
  const auto [a, b] = species_pair(m.basis, species);
  return pair_quadrature(m.moments, a, b, m.scale(a), angle);
}

VarianceReport quadrature_variances(const MomentMatrix& m) {
  VarianceReport report;
  auto pair_for = [&](Species s) -> std::optional<QuadraturePair> {
    if (!has_species(m.basis, s)) return std::nullopt;
    return QuadraturePair{quadrature_variance(m, s, 0.0),
                          quadrature_variance(m, s, 0.5 * std::numbers::pi)};
  };
  report.ground = pair_for(Species::Ground);
  report.meta = pair_for(Species::Meta);
  report.field = pair_for(Species::Field);
  if (report.ground) report.best_ground = best_quadrature(m, Species::Ground);
  return report;
}

QuadratureOptimum best_quadrature(const MomentMatrix& m, Species species) {
  return optimum_from(quadrature_variance(m, species, 0.0),
                      quadrature_variance(m, species, 0.5 * std::numbers::pi),
                      quadrature_variance(m, species, 0.25 * std::numbers::pi));
}

Eigen::MatrixXcd noise_spectrum(const LangevinSystem& system, double omega) {
  const LangevinSystem unit = normalize(system);
  return unscale(spectrum_of(unit, unit.diffusion, omega), system.scale);
}

Eigen::MatrixXcd vacuum_noise_spectrum(const LangevinSystem& system, double omega) {
  const LangevinSystem unit = normalize(system);
  return unscale(spectrum_of(unit, unit.vacuum_diffusion, omega), system.scale);
}

double spectral_quadrature(const LangevinSystem& system, const Eigen::MatrixXcd& spectrum,
                           const QuadratureSelector& selector) {
  const auto [a, b] = species_pair(system.basis, selector.species);
  return pair_quadrature(spectrum, a, b, system.scale(a), selector.angle);
}

namespace {

struct DipProfile {
  const LangevinSystem& system;
  LangevinSystem unit;
  QuadratureSelector selector;

  double squeezed(double w) const {
    return spectral_quadrature(system, unscale(spectrum_of(unit, unit.diffusion, w), system.scale),
                               selector);
  }
  double reference(double w) const {
    return spectral_quadrature(
        system, unscale(spectrum_of(unit, unit.vacuum_diffusion, w), system.scale), selector);
  }
  double dip(double w) const { return reference(w) - squeezed(w); }
};

}  // namespace

double normalized_spectral_variance(const LangevinSystem& system, double omega,
                                    const QuadratureSelector& selector) {
  const DipProfile p{system, normalize(system), selector};
  return 1.0 - p.dip(omega) / p.reference(0.0);
}

double spectrum_halfwidth(const LangevinSystem& system, const QuadratureSelector& selector) {
  const StabilityReport stability = check_stability(system);
  if (!stability.stable()) {
    throw UnstableSystem("spectrum undefined for a marginal or unstable drift", stability.margin);
  }
  const DipProfile p{system, normalize(system), selector};
  const double ref0 = p.reference(0.0);
  const double dip0 = p.dip(0.0);
  if (!(dip0 > 1e-12 * std::abs(ref0))) {
    throw NoSqueezing("selected quadrature shows no squeezing dip at zero frequency");
  }
  const double half = 0.5 * dip0;
  double lo = 0.0;
  double hi = stability.slowest_rate / 16.0;
  int expansions = 0;
  while (p.dip(hi) > half) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 400) throw NoSqueezing("squeezing dip does not close at high frequency");
  }
  while (hi - lo > 1e-4 * hi) {
    const double mid = 0.5 * (lo + hi);
    (p.dip(mid) > half ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::MatrixXcd integrate_spectrum(const LangevinSystem& system,
                                    const SpectrumIntegration& options) {
  using Rule = boost::math::quadrature::gauss<double, 15>;
  const StabilityReport stability = check_stability(system);
  if (!stability.stable()) {
    throw UnstableSystem("spectrum undefined for a marginal or unstable drift", stability.margin);
  }
  const LangevinSystem unit = normalize(system);
  const Eigen::Index n = unit.size();
  auto folded = [&](double w) -> Eigen::MatrixXcd {
    return spectrum_of(unit, unit.diffusion, w) + spectrum_of(unit, unit.diffusion, -w);
  };
  // 15-point rule on [lo, hi] applied to g.
  auto panel = [&](double lo, double hi, const auto& g) {
    const auto& x = Rule::abscissa();
    const auto& wts = Rule::weights();
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        acc += wts[i] * g(mid);
      } else {
        acc += wts[i] * (g(mid - half * x[i]) + g(mid + half * x[i]));
      }
    }
    return Eigen::MatrixXcd(half * acc);
  };

  const int ppd = std::clamp(options.points_per_decade, 1, 2000);
  const double w_lo = 1e-3 * stability.slowest_rate;
  const double w_hi = options.span_factor * stability.max_rate;

  Eigen::MatrixXcd total = panel(0.0, w_lo, folded);
  const double decades = std::log10(w_hi / w_lo);
  const int panels = std::max(1, static_cast<int>(std::ceil(decades * ppd)));
  const double ratio = std::pow(w_hi / w_lo, 1.0 / panels);
  double left = w_lo;
  for (int k = 0; k < panels; ++k) {
    const double right = (k + 1 == panels) ? w_hi : left * ratio;
    total += panel(left, right, folded);
    left = right;
  }
  // w = 1 / u maps [w_hi, inf) onto (0, 1 / w_hi]; the integrand tends to a constant.
  auto tail = [&](double u) -> Eigen::MatrixXcd {
    if (u == 0.0) {
      return unit.diffusion + unit.diffusion;
    }
    return folded(1.0 / u) / (u * u);
  };
  total += panel(0.0, 1.0 / w_hi, tail);
  return unscale(total / (2.0 * std::numbers::pi), system.scale);
}

void write_csv(std::ostream& out, const MomentMatrix& m) {
  out << "row";
  for (Op op : m.basis) out << ',' << label(op) << "_re," << label(op) << "_im";
  out << '\n';
  for (Eigen::Index i = 0; i < m.moments.rows(); ++i) {
    out << label(m.basis[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.moments.cols(); ++j) {
      out << ',' << format_scientific(m.moments(i, j).real()) << ','
          << format_scientific(m.moments(i, j).imag());
    }
    out << '\n';
  }
}

void write_csv(std::ostream& out, const VarianceReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto x = [&](const std::optional<QuadraturePair>& p) { return p ? p->x : nan; };
  auto y = [&](const std::optional<QuadraturePair>& p) { return p ? p->y : nan; };
  out << "var_I_x,var_I_y,var_S_x,var_S_y,var_X,var_Y,best_angle_I,best_var_I\n";
  out << format_scientific(x(r.ground)) << ',' << format_scientific(y(r.ground)) << ','
      << format_scientific(x(r.meta)) << ',' << format_scientific(y(r.meta)) << ','
      << format_scientific(x(r.field)) << ',' << format_scientific(y(r.field)) << ','
      << format_scientific(r.best_ground ? r.best_ground->angle : nan) << ','
      << format_scientific(r.best_ground ? r.best_ground->variance : nan) << '\n';
}

}  // namespace nucmem
