#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nucmem/errors.hpp"
#include "nucmem/experiments.hpp"
#include "nucmem/langevin.hpp"
#include "oracles.hpp"

using namespace nucmem;

namespace {

Eigen::Index at(Op op) { return static_cast<Eigen::Index>(op); }

PhysicalParams reference_params(double ratio = 0.1) {
  return matched_point(oracle::reference_scenario(), ratio).params;
}

}  // namespace

TEST_CASE("basis pairs conjugate partners") {
  for (Op op : kFullBasis) {
    CHECK(conjugate(conjugate(op)) == op);
    CHECK(conjugate(op) != op);
  }
  CHECK(label(Op::I09) == "I09");
}

TEST_CASE("drift entries of the reference configuration") {
  const auto p = reference_params();
  const auto a = build_full_drift(p);
  CHECK(a(at(Op::S23), at(Op::S23)) == cplx(-2e7, 4e10));
  CHECK(a(at(Op::S32), at(Op::S32)) == cplx(-2e7, -4e10));
  CHECK(a(at(Op::A), at(Op::S23)) == cplx(0.0, -p.g_coupling));
  CHECK(a(at(Op::S23), at(Op::A)) == cplx(0.0, -p.g_coupling * p.n_meta));
  // Only exchange couples the metastable and ground coherences.
  CHECK(a(at(Op::S21), at(Op::I09)) == cplx(p.gamma_f, 0.0));
  CHECK(a(at(Op::I09), at(Op::S21)) == cplx(p.gamma_m, 0.0));
  CHECK(a(at(Op::I09), at(Op::S23)) == cplx(0.0, 0.0));
  CHECK(a(at(Op::I09), at(Op::A)) == cplx(0.0, 0.0));
}

TEST_CASE("pure exchange block") {
  PhysicalParams p;
  p.gamma = 1.0;
  p.kappa = 1.0;
  p.gamma_m = 5e6;
  p.n_meta = 1.6e12;
  p.n_ground = 1.6e18;
  p.gamma_f = 5.0;
  const auto a = build_full_drift(p);
  CHECK(a(at(Op::S21), at(Op::S21)) == cplx(-5e6, 0.0));
  CHECK(a(at(Op::S21), at(Op::I09)) == cplx(5.0, 0.0));
  CHECK(a(at(Op::I09), at(Op::S21)) == cplx(5e6, 0.0));
  CHECK(a(at(Op::I09), at(Op::I09)) == cplx(-5.0, 0.0));
  // Total coherence S21 + I09 is conserved by exchange.
  const Eigen::RowVectorXcd sum = a.row(at(Op::S21)) + a.row(at(Op::I09));
  CHECK(sum.norm() == 0.0);

  const auto d = build_full_diffusion(p, InputFieldStats::vacuum());
  CHECK(d(at(Op::S21), at(Op::S12)).real() == doctest::Approx(1.6e19));
  CHECK(d(at(Op::I09), at(Op::I90)).real() == doctest::Approx(1.6e19));
  CHECK(d(at(Op::S21), at(Op::I90)).real() == doctest::Approx(-1.6e19));
}

TEST_CASE("conjugation symmetry of drift and diffusion") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto p = random_stable_params(rng);
    const auto sys = build_full_system(p);
    for (Op i : kFullBasis) {
      for (Op j : kFullBasis) {
        const cplx a = sys.drift(at(i), at(j));
        const cplx b = sys.drift(at(conjugate(i)), at(conjugate(j)));
        CHECK(std::abs(a - std::conj(b)) <= 1e-15 * (1.0 + std::abs(a)));
        const cplx d = sys.diffusion(at(i), at(j));
        const cplx dt = sys.diffusion(at(conjugate(j)), at(conjugate(i)));
        CHECK(std::abs(d - std::conj(dt)) <= 1e-15 * (1.0 + std::abs(d)));
      }
    }
    // The spectrum of a conjugation-symmetric drift is closed under conjugation.
    const auto ev = check_stability(sys).eigenvalues;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      double best = INFINITY;
      for (Eigen::Index j = 0; j < ev.size(); ++j) best = std::min(best, std::abs(ev(i) - std::conj(ev(j))));
      CHECK(best <= 1e-9 * ev.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("diffusion zero pattern and input moments") {
  auto p = reference_params();
  const auto vac = build_full_diffusion(p, InputFieldStats::vacuum());
  CHECK(vac(at(Op::A), at(Op::Adag)).real() == doctest::Approx(2.0 * p.kappa));
  CHECK(vac(at(Op::Adag), at(Op::A)) == cplx(0.0, 0.0));
  CHECK(vac(at(Op::A), at(Op::A)) == cplx(0.0, 0.0));
  CHECK(vac(at(Op::S23), at(Op::S32)).real() == doctest::Approx(2.0 * p.n_meta * p.gamma));
  CHECK(vac(at(Op::S32), at(Op::S23)) == cplx(0.0, 0.0));

  const auto sq = build_full_diffusion(p, InputFieldStats::squeezed_vacuum(std::log(2.0) / 2.0));
  CHECK(sq(at(Op::A), at(Op::A)).real() == doctest::Approx(2.0 * p.kappa * -0.375));
  CHECK(sq(at(Op::Adag), at(Op::Adag)).real() == doctest::Approx(2.0 * p.kappa * -0.375));
  CHECK(sq(at(Op::Adag), at(Op::A)).real() == doctest::Approx(2.0 * p.kappa * 0.125));
  // The wall rate adds to the metastable force only.
  p.gamma_0 = 1e3;
  const auto wall = build_full_diffusion(p, InputFieldStats::vacuum());
  CHECK(wall(at(Op::S21), at(Op::S12)).real() ==
        doctest::Approx(2.0 * p.n_meta * (p.gamma_m + 1e3)));
  CHECK(wall(at(Op::I09), at(Op::I90)) == vac(at(Op::I09), at(Op::I90)));
}

TEST_CASE("stability margins") {
  SUBCASE("field only decays at kappa") {
    const auto r = check_stability(build_field_only(3.0, 0.5, InputFieldStats::vacuum()));
    CHECK(r.margin == doctest::Approx(-3.0));
    CHECK(r.stable());
  }
  SUBCASE("exchange only has a conserved mode") {
    PhysicalParams p;
    p.gamma = 1.0;
    p.kappa = 1.0;
    p.gamma_m = 2.0;
    p.n_meta = 1.0;
    p.n_ground = 4.0;
    p.gamma_f = 0.5;
    const auto sys = build_full_system(p);
    const std::vector<Op> ops = {Op::S21, Op::S12, Op::I09, Op::I90};
    const auto r = check_stability(restrict_to(sys, ops));
    CHECK(std::abs(r.margin) <= 1e-14);
    CHECK_FALSE(r.stable());
    CHECK(r.slowest_rate == doctest::Approx(2.5));
  }
  SUBCASE("reference configuration is strictly stable") {
    const auto r = check_stability(build_full_system(reference_params(1e-3)));
    CHECK(r.stable());
    CHECK(r.slowest_rate > 0.0);
  }
}

TEST_CASE("restrict_to keeps the selected block") {
  const auto sys = build_full_system(reference_params());
  const std::vector<Op> ops = {Op::A, Op::Adag};
  const auto field = restrict_to(sys, ops);
  CHECK(field.size() == 2);
  CHECK(field.drift(0, 0) == sys.drift(at(Op::A), at(Op::A)));
  CHECK(field.scale(0) == 1.0);
  const std::vector<Op> bad = {Op::A, Op::I09};
  CHECK_THROWS_AS(restrict_to(field, bad), InvalidParameter);
}

TEST_CASE("normalize makes every commutator one and keeps eigenvalues") {
  const auto sys = build_full_system(reference_params());
  const auto unit = normalize(sys);
  CHECK(unit.scale.isOnes());
  const auto a = check_stability(sys);
  CHECK(std::abs(unit.drift(at(Op::S23), at(Op::A)) * unit.drift(at(Op::A), at(Op::S23)) -
                 sys.drift(at(Op::S23), at(Op::A)) * sys.drift(at(Op::A), at(Op::S23))) <=
        1e-6 * std::abs(sys.drift(at(Op::S23), at(Op::A)) * sys.drift(at(Op::A), at(Op::S23))));
  CHECK(a.margin < 0.0);
}

TEST_CASE("invalid parameters are rejected before building") {
  auto p = reference_params();
  p.gamma_f *= 1.01;
  CHECK_THROWS_AS(build_full_drift(p), InvalidParameter);
  CHECK_THROWS_AS(build_field_only(0.0, 0.0, InputFieldStats::vacuum()), InvalidParameter);
}
