#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nucmem/adiabatic.hpp"
#include "nucmem/engine.hpp"
#include "nucmem/errors.hpp"
#include "nucmem/experiments.hpp"
#include "nucmem/helium.hpp"

namespace py = pybind11;
using namespace nucmem;

namespace {

py::dict variances_dict(const VarianceReport& v) {
  py::dict d;
  auto put = [&](const char* x, const char* y, const std::optional<QuadraturePair>& p) {
    if (!p) return;
    d[x] = p->x;
    d[y] = p->y;
  };
  put("var_I_x", "var_I_y", v.ground);
  put("var_S_x", "var_S_y", v.meta);
  put("var_X", "var_Y", v.field);
  if (v.best_ground) {
    d["best_var_I"] = v.best_ground->variance;
    d["best_angle_I"] = v.best_ground->angle;
  }
  return d;
}

MomentMatrix moments_of(const PhysicalParams& p) { return solve_steady_moments(build_full_system(p)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Steady-state moments, variances and sweeps";

  py::register_exception<Error>(m, "Error");
  py::register_exception<InvalidParameter>(m, "InvalidParameter");
  py::register_exception<UnstableSystem>(m, "UnstableSystem");

  py::class_<PhysicalParams>(m, "PhysicalParams")
      .def(py::init<>())
      .def_readwrite("gamma", &PhysicalParams::gamma)
      .def_readwrite("kappa", &PhysicalParams::kappa)
      .def_readwrite("gamma_m", &PhysicalParams::gamma_m)
      .def_readwrite("gamma_f", &PhysicalParams::gamma_f)
      .def_readwrite("gamma_0", &PhysicalParams::gamma_0)
      .def_readwrite("omega_rabi", &PhysicalParams::omega_rabi)
      .def_readwrite("delta_one_photon", &PhysicalParams::delta_one_photon)
      .def_readwrite("delta_meta", &PhysicalParams::delta_meta)
      .def_readwrite("delta_ground", &PhysicalParams::delta_ground)
      .def_readwrite("delta_cavity", &PhysicalParams::delta_cavity)
      .def_readwrite("g_coupling", &PhysicalParams::g_coupling)
      .def_readwrite("n_meta", &PhysicalParams::n_meta)
      .def_readwrite("n_ground", &PhysicalParams::n_ground)
      .def_readwrite("r_squeeze", &PhysicalParams::r_squeeze);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("gamma", &Scenario::gamma)
      .def_readwrite("kappa", &Scenario::kappa)
      .def_readwrite("delta_one_photon", &Scenario::delta_one_photon)
      .def_readwrite("gamma_m", &Scenario::gamma_m)
      .def_readwrite("gamma_0", &Scenario::gamma_0)
      .def_readwrite("cooperativity", &Scenario::cooperativity)
      .def_readwrite("r_squeeze", &Scenario::r_squeeze)
      .def_readwrite("n_meta", &Scenario::n_meta)
      .def_readwrite("n_ground", &Scenario::n_ground)
      .def_readwrite("gamma_ratio", &Scenario::gamma_ratio);

  m.def("matched_point",
        [](const Scenario& s, double ratio, double db_over_b) {
          return matched_point(s, ratio, db_over_b).params;
        },
        py::arg("scenario"), py::arg("gamma_ratio"), py::arg("db_over_b") = 0.0,
        "Engine parameters at matched resonances for Gamma = gamma_ratio * gamma_m.");

  m.def("build_full_system",
        [](const PhysicalParams& p) {
          const auto sys = build_full_system(p);
          return py::make_tuple(sys.drift, sys.diffusion);
        },
        "Drift and diffusion matrices in the basis S21, S12, S23, S32, I09, I90, A, Adag.");

  m.def("steady_moments", [](const PhysicalParams& p) { return moments_of(p).moments; },
        "Steady-state second moments <a b>.");

  m.def("quadrature_variances",
        [](const PhysicalParams& p) { return variances_dict(quadrature_variances(moments_of(p))); });

  m.def("best_quadrature", [](const PhysicalParams& p) {
    const auto b = best_quadrature(moments_of(p), Species::Ground);
    return py::make_tuple(b.angle, b.variance);
  });

  m.def("analytic_variances",
        [](double pump, double gamma_m, double c, double r) {
          const auto a = analytic_variances(pump, gamma_m, c, r);
          return py::make_tuple(a.var_I_y, a.var_S_y);
        },
        py::arg("pump"), py::arg("gamma_m"), py::arg("cooperativity"), py::arg("r"));

  m.def("operating_point",
        [](double pump, double delta, double gamma, double c) {
          const auto op = helium::helium_operating_point(pump, delta, gamma, c);
          py::dict d;
          d["field_gauss"] = op.field_gauss;
          d["delta_las"] = op.delta_las;
          d["light_shift"] = op.light_shift;
          d["omega_I"] = op.omega_I;
          d["omega_S"] = op.omega_S;
          return d;
        },
        py::arg("pump"), py::arg("delta_one_photon"), py::arg("gamma"), py::arg("cooperativity"));

  m.def("gamma_sweep",
        [](const Scenario& s, double lo, double hi, int points, int threads) {
          SweepSpec spec;
          spec.fixed = s;
          spec.grid = GridSpec{true, lo, hi, points};
          spec.threads = threads;
          py::list rows;
          for (const auto& r : run_gamma_sweep(spec)) {
            py::dict d;
            d["gamma_ratio"] = r.gamma_ratio;
            d["analytic_var_I_y"] = r.analytic_var_I_y;
            d["analytic_var_S_y"] = r.analytic_var_S_y;
            d["var_I_y"] = r.var_I_y;
            d["var_S_y"] = r.var_S_y;
            d["var_X"] = r.var_X;
            d["best_var_I"] = r.best_var_I;
            d["status"] = r.status;
            rows.append(d);
          }
          return rows;
        },
        py::arg("scenario"), py::arg("min") = 1e-3, py::arg("max") = 1e2, py::arg("points") = 61,
        py::arg("threads") = 1);

  m.def("invariant_suite",
        [](std::uint64_t seed, int draws, bool remove_exchange_noise) {
          InvariantOptions o;
          o.seed = seed;
          o.draws = draws;
          o.parseval_draws = std::min(o.parseval_draws, draws);
          o.remove_exchange_noise = remove_exchange_noise;
          const auto r = run_invariant_suite(o);
          py::dict d;
          d["all_pass"] = r.all_pass();
          d["commutator_ok"] = r.commutator_ok;
          d["worst_commutator"] = r.worst_commutator;
          d["worst_oracle"] = r.worst_oracle;
          d["worst_parseval"] = r.worst_parseval;
          return d;
        },
        py::arg("seed") = 1, py::arg("draws") = 5, py::arg("remove_exchange_noise") = false);
}
