#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nucmem/params.hpp"

namespace nucmem {

using cplx = std::complex<double>;

/// Fluctuation operators of the linearized model. Each annihilation-like
/// operator is immediately followed by its Hermitian conjugate.
enum class Op : std::uint8_t { S21, S12, S23, S32, I09, I90, A, Adag };

inline constexpr Op kFullBasis[] = {Op::S21, Op::S12, Op::S23, Op::S32,
                                    Op::I09, Op::I90, Op::A,   Op::Adag};

Op conjugate(Op op);
std::string_view label(Op op);

/// d(v)/dt = drift * v + f with <f_a(t) f_b(t')> = diffusion_ab delta(t - t').
struct LangevinSystem {
  std::vector<Op> basis;
  /// Expected steady commutator [op, op^dagger] for the annihilation-like
  /// member of each pair (n, N or 1), repeated on the conjugate entry.
  Eigen::VectorXd scale;
  Eigen::MatrixXcd drift;
  Eigen::MatrixXcd diffusion;
  /// Same system driven by vacuum instead of squeezed vacuum.
  Eigen::MatrixXcd vacuum_diffusion;

  Eigen::Index size() const { return static_cast<Eigen::Index>(basis.size()); }
  std::optional<Eigen::Index> index_of(Op op) const;
  Eigen::Index require_index(Op op) const;
};

Eigen::MatrixXcd build_full_drift(const PhysicalParams& params);
Eigen::MatrixXcd build_full_diffusion(const PhysicalParams& params, const InputFieldStats& input);

/// Full 8-operator system; the input statistics follow params.r_squeeze.
LangevinSystem build_full_system(const PhysicalParams& params);

/// Keeps only the rows and columns of `ops` (each given with its conjugate).
LangevinSystem restrict_to(const LangevinSystem& system, std::span<const Op> ops);

/// Single lossy cavity mode driven through its input port.
LangevinSystem build_field_only(double kappa, double delta_cavity, const InputFieldStats& input);

/// Rescales every operator by 1/sqrt(scale) so all commutators become 1.
/// Eigenvalues are unchanged; moments transform as M' = T M T.
LangevinSystem normalize(const LangevinSystem& system);

/// Modes with |Re lambda| below this fraction of the slowest diagonal rate
/// count as conserved. The drift is block structured, so eigenvalue errors
/// follow the local rate scale rather than max|lambda|.
inline constexpr double kConservedFraction = 64.0 * 2.220446049250313e-16;

struct StabilityReport {
  double margin = 0.0;        // max Re(lambda); negative means stable
  double max_rate = 0.0;      // max |lambda|
  double slowest_rate = 0.0;  // min |Re lambda| over non-conserved modes
  double conserved_tolerance = 0.0;
  Eigen::VectorXcd eigenvalues;

  bool stable() const { return margin < -conserved_tolerance; }
};

/// Eigen-decomposes the drift; throws EigenSolverFailure if that fails.
StabilityReport check_stability(const LangevinSystem& system);

}  // namespace nucmem
