#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include "fracsp/config.hpp"
#include "fracsp/energy.hpp"
#include "fracsp/error.hpp"
#include "fracsp/minimizer.hpp"
#include "fracsp/qsolver.hpp"
#include "fracsp/run.hpp"

namespace py = pybind11;
using namespace fracsp;

namespace {

// Fields cross the boundary as (n, n, n) float64 arrays indexed [z, y, x].
py::array_t<double> to_numpy(const Field& u) {
  const py::ssize_t n = u.grid().n();
  py::array_t<double> out({n, n, n});
  std::copy(u.data().begin(), u.data().end(), out.mutable_data());
  return out;
}

Field from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double L) {
  if (a.ndim() != 3 || a.shape(0) != a.shape(1) || a.shape(1) != a.shape(2))
    throw Error("field must be a cubic (n, n, n) array");
  Grid g(int(a.shape(0)), L);
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fractional Schrodinger-Poisson normalized ground states";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Params>(m, "Params")
      .def(py::init([](double s, double p, double a, double mass) {
             return Params{s, p, a, mass};
           }),
           py::arg("s") = 0.9, py::arg("p") = 2.5, py::arg("a") = 1.0, py::arg("m") = 1.0)
      .def_readwrite("s", &Params::s)
      .def_readwrite("p", &Params::p)
      .def_readwrite("a", &Params::a)
      .def_readwrite("m", &Params::m)
      .def("validate", &Params::validate, py::arg("allow_any_s") = false);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("tol_residual", &SolverConfig::tol_residual)
      .def_readwrite("tol_energy", &SolverConfig::tol_energy)
      .def_readwrite("stagnation_window", &SolverConfig::stagnation_window)
      .def_readwrite("step0", &SolverConfig::step0)
      .def_readwrite("armijo", &SolverConfig::armijo)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("enforce_nonneg", &SolverConfig::enforce_nonneg)
      .def_readwrite("precondition", &SolverConfig::precondition)
      .def_property(
          "seed_kind", [](const SolverConfig& c) { return to_string(c.seed_kind); },
          [](SolverConfig& c, const std::string& k) { c.seed_kind = seed_kind_from_string(k); })
      .def_readwrite("seed_well", &SolverConfig::seed_well)
      .def_readwrite("seed_width", &SolverConfig::seed_width)
      .def_readwrite("seed", &SolverConfig::seed);

  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("kinetic", &EnergyBreakdown::kinetic)
      .def_readonly("potential_term", &EnergyBreakdown::potential_term)
      .def_readonly("hartree", &EnergyBreakdown::hartree)
      .def_readonly("power", &EnergyBreakdown::power)
      .def_readonly("total", &EnergyBreakdown::total);

  py::class_<GroundStateQ>(m, "GroundState")
      .def_property_readonly("Q", [](const GroundStateQ& q) { return to_numpy(q.Q); })
      .def_property_readonly("n", [](const GroundStateQ& q) { return q.Q.grid().n(); })
      .def_property_readonly("L", [](const GroundStateQ& q) { return q.Q.grid().L(); })
      .def_readonly("s", &GroundStateQ::s)
      .def_readonly("p", &GroundStateQ::p)
      .def_readonly("a_star", &GroundStateQ::a_star)
      .def_readonly("residual", &GroundStateQ::residual)
      .def_readonly("iterations", &GroundStateQ::iterations)
      .def_readonly("pohozaev_ratios", &GroundStateQ::pohozaev_ratios)
      .def_readonly("decay_exponent", &GroundStateQ::decay_exponent)
      .def_property_readonly("relative_residual", &GroundStateQ::relative_residual);

  py::class_<MinimizeResult>(m, "MinimizeResult")
      .def_property_readonly("u", [](const MinimizeResult& r) { return to_numpy(r.u); })
      .def_readonly("energy", &MinimizeResult::energy)
      .def_readonly("mu", &MinimizeResult::mu)
      .def_readonly("residual", &MinimizeResult::residual)
      .def_readonly("iterations", &MinimizeResult::iterations)
      .def_readonly("converged", &MinimizeResult::converged)
      .def_readonly("stop_reason", &MinimizeResult::stop_reason)
      .def_readonly("x_max", &MinimizeResult::x_max)
      .def_readonly("energy_trace", &MinimizeResult::energy_trace);

  py::class_<Potential>(m, "Potential")
      .def_property_readonly("kind", [](const Potential& p) { return to_string(p.kind()); })
      .def_property_readonly("V_inf", &Potential::V_inf)
      .def_property_readonly("wells",
                             [](const Potential& p) {
                               py::list out;
                               for (const Well& w : p.wells())
                                 out.append(py::make_tuple(w.x, w.r, w.c));
                               return out;
                             })
      .def("__call__", [](const Potential& p, double x, double y, double z) {
        return p(Vec3{x, y, z});
      });
  m.def("zero_potential", &make_zero_potential);
  m.def("constant_potential", &make_constant_potential, py::arg("value"));
  m.def("single_well", &make_single_well, py::arg("center"), py::arg("degree"),
        py::arg("V_inf"));
  m.def("multi_well", &make_multi_well, py::arg("wells"), py::arg("V_inf"),
        py::arg("box_half_width"));

  m.def("solve_q", [](int n, double L, double s, double p, double tol, int max_iter) {
        return solve_Q(Grid(n, L), s, p, tol, max_iter);
      },
      py::arg("n"), py::arg("L"), py::arg("s") = 0.9, py::arg("p") = 2.5,
      py::arg("tol") = 1e-10, py::arg("max_iter") = 500,
      py::call_guard<py::gil_scoped_release>());

  m.def("energy",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u, double L,
           const Potential& pot, const Params& prm, const std::string& variant) {
          Field f = from_numpy(u, L);
          Variant v = variant_from_string(variant);
          return EnergyModel(f.grid(), pot, prm, v != Variant::tilde).energy(f, v);
        },
        py::arg("u"), py::arg("L"), py::arg("potential"), py::arg("params"),
        py::arg("variant") = "full");

  m.def("minimize",
        [](const Potential& pot, const Params& prm, int n, double L, const SolverConfig& cfg,
           const std::string& variant, const GroundStateQ* q) {
          Variant v = variant_from_string(variant);
          EnergyModel model(Grid(n, L), pot, prm, v != Variant::tilde);
          return minimize(model, cfg, v, q);
        },
        py::arg("potential"), py::arg("params"), py::arg("n"), py::arg("L"),
        py::arg("config") = SolverConfig{}, py::arg("variant") = "full",
        py::arg("q") = nullptr, py::call_guard<py::gil_scoped_release>());

  m.def("seminorm_sq",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u, double L,
           double s) { return seminorm_sq(from_numpy(u, L), s); },
        py::arg("u"), py::arg("L"), py::arg("s"));
  m.def("gn_ratio",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& u, double L,
           double s, double p) { return gn_ratio(from_numpy(u, L), s, p); },
        py::arg("u"), py::arg("L"), py::arg("s"), py::arg("p"));
  m.def("gn_constant", &gn_constant, py::arg("s"), py::arg("p"), py::arg("a_star"));
  m.def("energy_exponent", &law::energy_exponent, py::arg("s"), py::arg("p"));
  m.def("energy_constant", &law::energy_constant, py::arg("s"), py::arg("p"));
  m.def("blowup_scale", &law::blowup_scale, py::arg("a"), py::arg("a_star"), py::arg("s"),
        py::arg("p"));

  auto to_overrides = [](const std::map<std::string, std::string>& o) {
    return std::vector<Override>(o.begin(), o.end());
  };
  m.def("config_json",
        [to_overrides](const std::string& text, const std::map<std::string, std::string>& o) {
          return config_json(parse_config_string(text, to_overrides(o)));
        },
        py::arg("text") = "", py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("run",
        [to_overrides](const std::string& subcommand, const std::string& text,
                       const std::map<std::string, std::string>& o) {
          RunConfig cfg = parse_config_string(text, to_overrides(o));
          std::ostringstream log;
          int code;
          {
            py::gil_scoped_release release;
            code = run(subcommand, cfg, log);
          }
          return py::make_tuple(code, log.str());
        },
        py::arg("subcommand"), py::arg("text") = "",
        py::arg("overrides") = std::map<std::string, std::string>{});
}
