#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nucmem/langevin.hpp"

namespace nucmem {

/// Steady-state operator-ordered second moments M_ab = <da db>.
struct MomentMatrix {
  std::vector<Op> basis;
  Eigen::VectorXd scale;
  Eigen::MatrixXcd moments;
  /// ||A M + M A^T + D||_F / ||D||_F of the returned solution.
  double relative_residual = 0.0;

  cplx at(Op a, Op b) const;
  std::optional<Eigen::Index> index_of(Op op) const;
  /// <op op^dag> - <op^dag op>, expected to equal the stored scale.
  cplx commutator(Op op) const;
};

enum class Species { Ground, Meta, Field };

/// Normalized transverse variances of one species: spins in units of the
/// coherent-state value (N/4 or n/4), the field in units of vacuum noise.
struct QuadraturePair {
  double x = 0.0;
  double y = 0.0;
};

struct QuadratureOptimum {
  double angle = 0.0;  // radians in [0, pi)
  double variance = 0.0;
  bool degenerate = false;
};

struct VarianceReport {
  std::optional<QuadraturePair> ground;
  std::optional<QuadraturePair> meta;
  std::optional<QuadraturePair> field;
  std::optional<QuadratureOptimum> best_ground;
};

/// Solves A M + M A^T + D = 0 through the vectorized (I kron A + A kron I)
/// system. Throws UnstableSystem when the drift has a non-negative margin
/// and SingularSolve when the linear system is numerically singular.
MomentMatrix solve_steady_moments(const LangevinSystem& system);

/// Same steady state obtained by integrating dM/dt = A M + M A^T + D from
/// M(0) = 0 with classical fixed-step RK4. Requires dt <= 0.1 / max|lambda|
/// and t_final >= 20 / slowest decay rate; conserved modes (zero real part)
/// are allowed and keep their initial value.
MomentMatrix integrate_moments(const LangevinSystem& system, double t_final, double dt);

/// Picks the largest admissible dt and the shortest admissible t_final.
MomentMatrix integrate_moments(const LangevinSystem& system);

/// Normalized variance of cos(angle) X + sin(angle) Y for one species.
double quadrature_variance(const MomentMatrix& m, Species species, double angle);

VarianceReport quadrature_variances(const MomentMatrix& m);

/// Minimum over angle of quadrature_variance, from the 2x2 symmetrized
/// quadrature covariance. Isotropic states return angle 0 and degenerate.
QuadratureOptimum best_quadrature(const MomentMatrix& m, Species species);

/// S(w) = (A + i w)^-1 D (A^T - i w)^-1; integrates to 2 pi M over w.
Eigen::MatrixXcd noise_spectrum(const LangevinSystem& system, double omega);

/// Same as noise_spectrum with the vacuum-input diffusion.
Eigen::MatrixXcd vacuum_noise_spectrum(const LangevinSystem& system, double omega);

struct QuadratureSelector {
  Species species = Species::Ground;
  double angle = 1.5707963267948966;  // Y quadrature
};

/// Spectral counterpart of quadrature_variance for a spectral matrix in the
/// basis of `system` (unnormalized by any frequency reference).
double spectral_quadrature(const LangevinSystem& system, const Eigen::MatrixXcd& spectrum,
                           const QuadratureSelector& selector);

/// Normalized spectral variance 1 - [S_vac(w) - S(w)] / S_vac(0) of the
/// selected quadrature; equals 1 everywhere without input squeezing.
double normalized_spectral_variance(const LangevinSystem& system, double omega,
                                    const QuadratureSelector& selector);

/// Half width at half depth of the squeezing dip 1 - normalized_spectral_variance,
/// found by bisection to 1e-4 relative. Throws NoSqueezing when there is no
/// dip at w = 0.
double spectrum_halfwidth(const LangevinSystem& system, const QuadratureSelector& selector);

struct SpectrumIntegration {
  int points_per_decade = 60;  // capped at 2000
  double span_factor = 1e3;    // log grid runs out to span_factor * max rate
};

/// (1 / 2 pi) * integral of noise_spectrum over the real line: log-spaced
/// Gauss-Legendre panels symmetric in w, plus the exact 1/w^2 tail beyond
/// the grid mapped onto a finite interval.
Eigen::MatrixXcd integrate_spectrum(const LangevinSystem& system,
                                    const SpectrumIntegration& options = {});

/// Row-major CSV, complex entries as re/im column pairs.
void write_csv(std::ostream& out, const MomentMatrix& m);
void write_csv(std::ostream& out, const VarianceReport& report);

}  // namespace nucmem
