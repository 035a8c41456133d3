#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nucmem/engine.hpp"
#include "nucmem/errors.hpp"
#include "nucmem/experiments.hpp"
#include "nucmem/helium.hpp"
#include "oracles.hpp"

using namespace nucmem;
using namespace nucmem::helium;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

TEST_CASE("gas populations") {
  const auto g = gas_populations(GasCell{}, 5e6);
  CHECK(g.n_ground == doctest::Approx(1.61e18).epsilon(1e-3));
  CHECK(g.n_meta == doctest::Approx(1.6e12));
  CHECK(g.n_meta / g.n_ground == doctest::Approx(1e-6).epsilon(0.01));
  CHECK(g.gamma_f * g.n_ground == doctest::Approx(5e6 * g.n_meta).epsilon(1e-14));
  CHECK(g.gamma_0 == doctest::Approx(1e3));

  GasCell two_torr;
  two_torr.pressure_torr = 2.0;
  const auto g2 = gas_populations(two_torr, 5e6);
  CHECK(g2.gamma_0 == doctest::Approx(500.0));
  CHECK(g2.n_ground == doctest::Approx(2.0 * g.n_ground));

  GasCell bad;
  bad.volume_cm3 = 0.0;
  CHECK_THROWS_AS(gas_populations(bad, 5e6), InvalidParameter);
}

TEST_CASE("gas cell from config") {
  KeyValueConfig c;
  c.set("pressure", "2");
  CHECK(gas_cell_from_config(c).pressure_torr == 2.0);
  CHECK(gas_cell_from_config(c).volume_cm3 == 50.0);
  c.set("temperature", "-1");
  CHECK_THROWS_AS(gas_cell_from_config(c), ConfigError);
}

TEST_CASE("Larmor frequencies") {
  CHECK(larmor(1.0, helium::Species::Nuclear) == doctest::Approx(kTwoPi * 3240.0));
  CHECK(larmor(0.0, helium::Species::Metastable) == 0.0);
  CHECK(larmor(0.057, helium::Species::Nuclear) / kTwoPi == doctest::Approx(184.7).epsilon(1e-3));
  CHECK(linear_zeeman_ok(0.057));
  CHECK_FALSE(linear_zeeman_ok(60.0));
}

TEST_CASE("matched operating point") {
  SUBCASE("no drive") {
    const auto op = match_operating_point(0.0, -4e10);
    CHECK(op.field_gauss == 0.0);
    CHECK(op.delta_las == 0.0);
  }
  SUBCASE("reference pump rate on the C9 line") {
    const auto op = helium_operating_point(5e5, -4e10, 2e7, 500.0);
    CHECK(std::abs(op.field_gauss * 1e3 - 57.0) <= 2.0);
    CHECK(std::abs(op.delta_las / kTwoPi - 184.0) <= 5.0);
    CHECK(op.residual_metastable <= 1e-9);
    CHECK(op.residual_ground <= 1e-9);
    CHECK(op.linear_zeeman);
  }
  SUBCASE("field is linear in the drive power") {
    const double omega = 1.3e8;
    const auto a = match_operating_point(omega, -4e10);
    const auto b = match_operating_point(omega * std::sqrt(2.0), -4e10);
    CHECK(b.field_gauss == doctest::Approx(2.0 * a.field_gauss).epsilon(1e-14));
  }
  SUBCASE("residuals vanish over a range of drives") {
    for (double omega : {1e5, 1e7, 1e8, 1e9, 1e10}) {
      const auto op = match_operating_point(omega, -4e10);
      CHECK(op.residual_metastable <= 1e-9);
      CHECK(op.residual_ground <= 1e-9);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(match_operating_point(1e8, 4e10), NoPositiveField);
    CHECK_THROWS_AS(match_operating_point(1e8, 0.0), ZeroDetuning);
  }
}

TEST_CASE("field error detunings") {
  const auto zero = field_error_detunings(0.0);
  CHECK(zero.delta_tilde == 0.0);
  CHECK(zero.delta_ground == 0.0);
  const auto s = field_error_detunings(1e-4 * 0.057);
  CHECK(s.delta_ground / kTwoPi == doctest::Approx(0.0185).epsilon(1e-3));
  CHECK(s.delta_tilde / s.delta_ground == doctest::Approx(577.0).epsilon(1e-3));
}

TEST_CASE("homogeneity thresholds") {
  const auto point = matched_point(oracle::reference_scenario(), 0.1);
  const auto r = homogeneity_check(point.params, point.derived, point.field, 1e-4);
  CHECK(r.regime_threshold == doctest::Approx(1.0 / 2400.0).epsilon(1e-9));
  CHECK(r.exact_threshold == doctest::Approx(point.derived.memory_bandwidth / point.field.omega_I));
  CHECK(r.exact_threshold == doctest::Approx(3.94e-4).epsilon(0.01));
  CHECK(r.binding_threshold == std::min(r.exact_threshold, r.regime_threshold));
  CHECK(r.pass);
  CHECK(r.regime_applies);
  // Replacing 600 by the coefficient of the actual rates.
  CHECK(r.regime_coefficient == doctest::Approx(635.0).epsilon(0.01));

  CHECK_FALSE(homogeneity_check(point.params, point.derived, point.field, 1e-3).pass);

  // Gamma_F -> 0: every nonzero field error fails.
  auto starved = point.derived;
  starved.memory_bandwidth = 0.0;
  const auto z = homogeneity_check(point.params, starved, point.field, 1e-9);
  CHECK(z.exact_threshold == 0.0);
  CHECK_FALSE(z.pass);
}

TEST_CASE("a zero field error leaves the engine result unchanged") {
  const auto scenario = oracle::reference_scenario();
  const auto a = matched_point(scenario, 0.1);
  auto b = a;
  const auto shift = field_error_detunings(0.0 * a.field.field_gauss);
  b.params.delta_meta += shift.delta_tilde;
  b.params.delta_ground += shift.delta_ground;
  CHECK(b.params.delta_meta == a.params.delta_meta);
  CHECK(b.params.delta_ground == a.params.delta_ground);
  const auto va = quadrature_variances(solve_steady_moments(build_full_system(a.params)));
  const auto vb = quadrature_variances(solve_steady_moments(build_full_system(b.params)));
  CHECK(va.ground->y == vb.ground->y);
  CHECK(matched_point(scenario, 0.1, 0.0).params.delta_meta == a.params.delta_meta);
}
