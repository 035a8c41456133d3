#include <cmath>
#include <sstream>

#include "doctest.h"
#include "nucmem/errors.hpp"
#include "nucmem/experiments.hpp"
#include "oracles.hpp"

using namespace nucmem;

namespace {

SweepSpec gamma_spec(int points, double gamma_0 = 0.0) {
  SweepSpec s;
  s.grid.points = points;
  s.fixed = oracle::reference_scenario(gamma_0);
  return s;
}

std::string csv_of(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  write_csv(out, rows);
  return out.str();
}

}  // namespace

TEST_CASE("grids") {
  const auto g = make_grid(GridSpec{});
  REQUIRE(g.size() == 61);
  CHECK(g.front() == 1e-3);
  CHECK(g.back() == 1e2);
  CHECK(g[24] == doctest::Approx(0.1).epsilon(1e-12));
  const auto lin = make_grid(GridSpec{false, 0.0, 1.0, 5});
  CHECK(lin[2] == 0.5);
  CHECK_THROWS_AS(make_grid(GridSpec{true, 0.0, 1.0, 5}), InvalidParameter);
  CHECK_THROWS_AS(make_grid(GridSpec{false, 1.0, 1.0, 5}), InvalidParameter);
  CHECK_THROWS_AS(make_grid(GridSpec{false, 0.0, 1.0, 1}), InvalidParameter);
}

TEST_CASE("gamma sweep end points") {
  const auto rows = run_gamma_sweep(gamma_spec(6));
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.ok());
    CHECK(heisenberg_ok(r));
  }
  CHECK(rows.front().var_I_y == doctest::Approx(0.5015).epsilon(0.02));
  CHECK(rows.front().analytic_var_I_y == doctest::Approx(0.501499).epsilon(1e-5));
  CHECK(rows.back().var_I_y >= 0.99);
  CHECK(rows.back().analytic_var_S_y == doctest::Approx(0.5064).epsilon(1e-3));
  // Up to Gamma = 10 gamma_m the metastable variance follows the closed form
  // within 2%; the optical admixture Omega^2 / Delta^2 grows with Gamma and
  // reaches 5% at Gamma = 100 gamma_m, where the full model departs by 6%.
  CHECK(rows[4].var_S_y == doctest::Approx(rows[4].analytic_var_S_y).epsilon(0.02));
  CHECK(oracle::relative(rows.back().var_S_y, rows.back().analytic_var_S_y) > 0.02);
  CHECK(oracle::relative(rows.back().var_S_y, rows.back().analytic_var_S_y) < 0.08);
}

TEST_CASE("wall relaxation degrades the ground state only at small Gamma") {
  const auto clean = run_gamma_sweep(gamma_spec(6, 0.0));
  const auto wall = run_gamma_sweep(gamma_spec(6, 1e3));
  CHECK(wall.front().var_I_y > clean.front().var_I_y + 0.05);
  for (std::size_t i = 2; i < clean.size(); ++i) {
    CHECK(std::abs(wall[i].var_I_y - clean[i].var_I_y) < 0.002);
  }
}

TEST_CASE("numeric and analytic curves agree where the elimination is justified") {
  auto spec = gamma_spec(21);
  spec.fixed.delta_one_photon = -4e11;
  int checked = 0;
  for (const auto& r : run_gamma_sweep(spec)) {
    if (!r.adiabatic_ok) continue;
    ++checked;
    CHECK(r.var_I_y == doctest::Approx(r.analytic_var_I_y).epsilon(0.05));
  }
  CHECK(checked >= 10);
}

TEST_CASE("sweeps are deterministic regardless of thread count") {
  auto spec = gamma_spec(9, 1e3);
  spec.threads = 1;
  const std::string serial = csv_of(run_gamma_sweep(spec));
  spec.threads = 4;
  CHECK(csv_of(run_gamma_sweep(spec)) == serial);
  CHECK(csv_of(run_gamma_sweep(spec)) == serial);

  spec.threads = 3;
  const std::string field_parallel = csv_of(run_field_error_sweep(spec));
  spec.threads = 1;
  CHECK(csv_of(run_field_error_sweep(spec)) == field_parallel);
}

TEST_CASE("field error sweep") {
  auto spec = gamma_spec(11);
  spec.kind = SweepKind::FieldError;
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 33);
  const auto reference = run_gamma_sweep(spec);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(rows[i].db_over_b == 0.0);
    CHECK(rows[i].best_var_I == reference[i].best_var_I);
    for (std::size_t k = 1; k < 3; ++k) {
      const auto& shifted = rows[k * 11 + i];
      CHECK(shifted.ok());
      CHECK(shifted.best_var_I >= rows[i].best_var_I);
      CHECK(heisenberg_ok(shifted));
    }
  }
  CHECK(rows[11].best_var_I == doctest::Approx(0.52091).epsilon(1e-4));
  CHECK(rows[22].best_var_I == doctest::Approx(0.70070).epsilon(1e-4));
}

TEST_CASE("field errors well above the homogeneity threshold destroy the transfer") {
  const auto scenario = oracle::reference_scenario();
  for (double ratio : {1e-3, 1e-2}) {
    const auto point = matched_point(scenario, ratio);
    const double threshold =
        helium::homogeneity_check(point.params, point.derived, point.field, 0.0).binding_threshold;
    SweepSpec spec;
    spec.kind = SweepKind::FieldError;
    spec.fixed = scenario;
    spec.grid = GridSpec{true, ratio, ratio * 1.0001, 2};
    spec.db_over_b = {threshold, 2.0 * threshold, 10.0 * threshold};
    const auto rows = run_sweep(spec);
    // Right at the threshold part of the squeezing survives.
    CHECK(rows[0].best_var_I < 0.9);
    CHECK(rows[2].best_var_I > 0.9);
    CHECK(rows[4].best_var_I > 0.9);
    CHECK(rows[4].best_var_I > rows[2].best_var_I);
  }
}

TEST_CASE("squeezing input sweep") {
  SweepSpec spec;
  spec.kind = SweepKind::SqueezingInput;
  spec.fixed = oracle::reference_scenario();
  spec.grid = GridSpec{false, 0.25, 1.0, 4};
  const auto rows = run_sweep(spec);
  REQUIRE(rows.size() == 4);
  CHECK(rows.back().var_I_y == doctest::Approx(1.0).epsilon(1e-8));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].var_I_y > rows[i - 1].var_I_y);
  CHECK(rows[0].var_I_y == doctest::Approx(rows[0].analytic_var_I_y).epsilon(0.02));
}

TEST_CASE("failing points are reported per row") {
  auto spec = gamma_spec(3);
  spec.fixed.delta_one_photon = 4e10;
  const auto rows = run_gamma_sweep(spec);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK_FALSE(r.ok());
    CHECK(std::isnan(r.var_I_y));
  }
  const std::string text = csv_of(rows);
  CHECK(text.find("nan") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("csv dialect") {
  const auto rows = run_gamma_sweep(gamma_spec(2));
  const std::string text = csv_of(rows);
  CHECK(text.rfind("value,gamma_ratio,db_over_b,field_mG,gamma_F,", 0) == 0);
  CHECK(text.find("\n1.00000000e-03,1.00000000e-03,0.00000000e+00,") != std::string::npos);
  std::ostringstream gp;
  write_gnuplot_script(gp, SweepKind::GammaRatio, "out.csv");
  CHECK(gp.str().find("out.csv") != std::string::npos);
}

TEST_CASE("operating point report") {
  SUBCASE("defaults") {
    const auto r = run_operating_point_report(Scenario{}, helium::GasCell{});
    CHECK(std::abs(r.point.field_gauss * 1e3 - 57.0) <= 2.0);
    CHECK(std::abs(r.point.omega_I / (2.0 * std::numbers::pi) - 184.0) <= 5.0);
    CHECK(1.0 / r.derived.memory_bandwidth == doctest::Approx(2.2).epsilon(0.1 / 2.2));
    CHECK(r.homogeneity.pass);
    CHECK_FALSE(r.validity.all_pass());
    std::ostringstream text;
    write_text(text, r);
    CHECK(text.str().find("field_mG") != std::string::npos);
    std::ostringstream csv;
    write_csv(csv, r);
    const std::string row = csv.str();
    CHECK(std::count(row.begin(), row.end(), '\n') == 2);
  }
  SUBCASE("no drive gives a zero-field report") {
    Scenario s;
    s.gamma_ratio = 0.0;
    const auto r = run_operating_point_report(s, helium::GasCell{});
    CHECK(r.point.field_gauss == 0.0);
    CHECK(r.point.delta_las == 0.0);
    CHECK(r.derived.memory_bandwidth == 0.0);
  }
  SUBCASE("a 2 torr cell") {
    const auto one = run_operating_point_report(Scenario{}, helium::GasCell{});
    helium::GasCell cell;
    cell.pressure_torr = 2.0;
    const auto two = run_operating_point_report(Scenario{}, cell);
    CHECK(two.gas.gamma_0 == doctest::Approx(one.gas.gamma_0 / 2.0));
    CHECK(two.gas.n_ground == doctest::Approx(one.gas.n_ground * 2.0));
    CHECK(two.gas.gamma_f == doctest::Approx(one.gas.gamma_f / 2.0));
    CHECK(two.derived.memory_bandwidth == doctest::Approx(one.derived.memory_bandwidth / 2.0));
  }
}

TEST_CASE("invariant suite") {
  InvariantOptions o;
  o.draws = 6;
  o.parseval_draws = 2;
  const auto r = run_invariant_suite(o);
  CHECK(r.all_pass());
  CHECK(r.draws == 6);
  std::ostringstream a, b;
  write_text(a, r);
  write_text(b, run_invariant_suite(o));
  CHECK(a.str() == b.str());

  o.remove_exchange_noise = true;
  const auto broken = run_invariant_suite(o);
  CHECK_FALSE(broken.commutator_ok);
  CHECK_FALSE(broken.all_pass());
}

TEST_CASE("random draws are reproducible") {
  std::mt19937_64 a(42), b(42);
  for (int k = 0; k < 5; ++k) {
    const auto pa = random_stable_params(a);
    const auto pb = random_stable_params(b);
    CHECK(pa.gamma == pb.gamma);
    CHECK(pa.n_ground == pb.n_ground);
    CHECK(pa.r_squeeze == pb.r_squeeze);
  }
  std::mt19937_64 u(1);
  for (int k = 0; k < 1000; ++k) {
    const double x = uniform01(u);
    CHECK((x >= 0.0 && x < 1.0));
  }
}

TEST_CASE("scenario configuration") {
  KeyValueConfig c;
  c.set("cooperativity", "100");
  CHECK(scenario_from_config(c).cooperativity == 100.0);
  c.set("delta_one_photon", "0");
  CHECK_THROWS_AS(scenario_from_config(c), ConfigError);
}
