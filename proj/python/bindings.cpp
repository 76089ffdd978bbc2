// Python bindings for the dirac1d core.

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dirac1d/causality.hpp"
#include "dirac1d/experiments.hpp"
#include "dirac1d/observables.hpp"
#include "dirac1d/oracles.hpp"

namespace py = pybind11;
using namespace dirac1d;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<cplx> from_array(const py::array_t<cplx, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
  return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_dirac1d, m) {
  m.doc() = "Exactly causal 1+1D Dirac solver and causality checks";

  py::register_exception<BoundaryMassError>(m, "BoundaryMassError", PyExc_RuntimeError);

  py::class_<Grid1D>(m, "Grid1D")
      .def(py::init<double, double, std::size_t>(), py::arg("z_min"), py::arg("z_max"),
           py::arg("n_cells"))
      .def_property_readonly("z_min", &Grid1D::z_min)
      .def_property_readonly("z_max", &Grid1D::z_max)
      .def_property_readonly("n_cells", &Grid1D::n_cells)
      .def_property_readonly("dz", &Grid1D::dz)
      .def("center", &Grid1D::center)
      .def("boundary", &Grid1D::boundary)
      .def("snap_boundary", &Grid1D::snap_boundary)
      .def("centers", [](const Grid1D& g) {
        std::vector<double> z(g.n_cells());
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = g.center(static_cast<std::ptrdiff_t>(i));
        return to_array(z);
      })
      .def("__repr__", [](const Grid1D& g) {
        std::ostringstream os;
        os << "Grid1D(" << g.z_min() << ", " << g.z_max() << ", " << g.n_cells() << ")";
        return os.str();
      });

  py::class_<SpinorField>(m, "SpinorField")
      .def(py::init<const Grid1D&, double>(), py::arg("grid"), py::arg("time") = 0.0)
      .def(py::init([](const Grid1D& g, const py::array_t<cplx>& f, const py::array_t<cplx>& h,
                       double t) { return SpinorField(g, from_array(f), from_array(h), t); }),
           py::arg("grid"), py::arg("f"), py::arg("h"), py::arg("time") = 0.0)
      .def_readonly("grid", &SpinorField::grid)
      .def_readwrite("time", &SpinorField::time)
      .def_property_readonly("f", [](const SpinorField& s) { return to_array(s.f); })
      .def_property_readonly("h", [](const SpinorField& s) { return to_array(s.h); })
      .def("norm", &SpinorField::norm)
      .def("inner", &SpinorField::inner)
      .def("__len__", &SpinorField::size);

  py::enum_<PacketKind>(m, "PacketKind")
      .value("gaussian", PacketKind::gaussian)
      .value("compact_bump", PacketKind::compact_bump)
      .value("plane_superposition", PacketKind::plane_superposition);

  py::class_<PacketSpec>(m, "PacketSpec")
      .def(py::init([](PacketKind kind, double z0, double width, double k0, double mass) {
             return PacketSpec{kind, z0, width, k0, mass, 0.0, 0.0};
           }),
           py::arg("kind") = PacketKind::gaussian, py::arg("z0") = 0.0, py::arg("width") = 1.0,
           py::arg("k0") = 0.0, py::arg("mass") = 1.0)
      .def_readwrite("kind", &PacketSpec::kind)
      .def_readwrite("z0", &PacketSpec::z0)
      .def_readwrite("width", &PacketSpec::width)
      .def_readwrite("k0", &PacketSpec::k0)
      .def_readwrite("mass", &PacketSpec::mass);

  m.def("gaussian_packet", &gaussian_packet, py::arg("spec"), py::arg("grid"));
  m.def("compact_packet", &compact_packet, py::arg("spec"), py::arg("z_l"), py::arg("z_r"),
        py::arg("grid"));
  m.def("positive_energy_ratio", &positive_energy_ratio, py::arg("k"), py::arg("mass"));

  py::enum_<CutSide>(m, "CutSide").value("left", CutSide::left).value("right", CutSide::right);
  m.def("cut", &cut, py::arg("state"), py::arg("q"), py::arg("side"));

  py::class_<Potential>(m, "Potential")
      .def(py::init<const Grid1D&>())
      .def(py::init([](const Grid1D& g, const std::vector<double>& v) { return Potential(g, v); }))
      .def("at", [](const Potential& p, double t) { return to_array(p.at(t)); })
      .def_property_readonly("is_static", &Potential::is_static);
  m.def("rectangular_barrier", &rectangular_barrier, py::arg("grid"), py::arg("v0"),
        py::arg("z_on"), py::arg("z_off"), py::arg("smoothing") = 0.0);
  m.def("perturb_potential", &perturb_potential, py::arg("base"), py::arg("z_a"), py::arg("z_b"),
        py::arg("t_a"), py::arg("t_b"), py::arg("dv"));

  py::enum_<Splitting>(m, "Splitting").value("lie", Splitting::lie).value("strang", Splitting::strang);

  py::class_<SchemeConfig>(m, "SchemeConfig")
      .def_static("for_grid", &SchemeConfig::for_grid, py::arg("grid"), py::arg("mass"),
                  py::arg("splitting") = Splitting::strang)
      .def_readwrite("dt", &SchemeConfig::dt)
      .def_readwrite("mass", &SchemeConfig::mass)
      .def_readwrite("splitting", &SchemeConfig::splitting)
      .def_readwrite("boundary_mass_limit", &SchemeConfig::boundary_mass_limit);

  py::class_<History>(m, "History")
      .def_readonly("snapshots", &History::snapshots)
      .def_readonly("stride", &History::stride)
      .def("time", &History::time)
      .def("__len__", [](const History& h) { return h.snapshots.size(); });

  m.def("step", py::overload_cast<const SpinorField&, const Potential&, const SchemeConfig&>(&step),
        py::arg("state"), py::arg("potential"), py::arg("cfg"));
  m.def("evolve", &evolve, py::arg("state"), py::arg("potential"), py::arg("n_steps"),
        py::arg("cfg"), py::arg("stride") = 1, py::call_guard<py::gil_scoped_release>());

  py::class_<CurrentField>(m, "CurrentField")
      .def_property_readonly("j0", [](const CurrentField& c) { return to_array(c.j0); })
      .def_property_readonly("jz", [](const CurrentField& c) { return to_array(c.jz); })
      .def_readonly("time", &CurrentField::time);
  m.def("current", &current, py::arg("state"));
  m.def("probability_above", [](const SpinorField& s, double q) { return probability(s, Region::above(q)); });
  m.def("probability_below", [](const SpinorField& s, double q) { return probability(s, Region::below(q)); });
  m.def("probability_between",
        [](const SpinorField& s, double lo, double hi) { return probability(s, Region::between(lo, hi)); });
  m.def("continuity_residual", &continuity_residual, py::arg("history"));

  py::class_<SupportInterval>(m, "SupportInterval")
      .def_readonly("empty", &SupportInterval::empty)
      .def_readonly("first_cell", &SupportInterval::first_cell)
      .def_readonly("last_cell", &SupportInterval::last_cell)
      .def_readonly("z_lo", &SupportInterval::z_lo)
      .def_readonly("z_hi", &SupportInterval::z_hi);
  m.def("support", &support, py::arg("state"), py::arg("threshold") = 0.0);

  py::class_<CausalityReport>(m, "CausalityReport")
      .def_readonly("check", &CausalityReport::check)
      .def_readonly("passed", &CausalityReport::pass)
      .def_readonly("margin", &CausalityReport::margin)
      .def_readonly("tolerance", &CausalityReport::tolerance)
      .def_readonly("worst_t", &CausalityReport::worst_t)
      .def_readonly("worst_q", &CausalityReport::worst_q)
      .def_property_readonly("scalars",
                             [](const CausalityReport& r) {
                               py::dict d;
                               for (const auto& [k, v] : r.scalars) d[py::str(k)] = v;
                               return d;
                             })
      .def("__repr__", &format_report_line);

  m.def("lightcone_check", &lightcone_check, py::arg("history"), py::arg("initial"));
  m.def("causal_inequality_check", &causal_inequality_check, py::arg("history"), py::arg("q"));
  m.def("causal_inequality_scan", &causal_inequality_scan, py::arg("history"));
  m.def("tunneling_bound_check", &tunneling_bound_check, py::arg("history"), py::arg("length"),
        py::arg("t_max"), py::arg("barrier_left") = 0.0);
  m.def("decomposition_check", &decomposition_check, py::arg("state"), py::arg("q"),
        py::arg("potential"), py::arg("n_steps"), py::arg("cfg"),
        py::call_guard<py::gil_scoped_release>());
  m.def("operator_identity_check", &operator_identity_check, py::arg("potential"), py::arg("cfg"),
        py::arg("n_steps"), py::arg("q"), py::arg("max_cells") = 4096,
        py::call_guard<py::gil_scoped_release>());
  m.def("signalling_check", &signalling_check, py::arg("state"), py::arg("base"),
        py::arg("perturbed"), py::arg("bob_lo"), py::arg("bob_hi"), py::arg("n_steps"),
        py::arg("cfg"), py::call_guard<py::gil_scoped_release>());

  m.def("massless_exact", &massless_exact, py::arg("a"), py::arg("b"), py::arg("t"), py::arg("grid"));

  py::class_<FringeResult>(m, "FringeResult")
      .def_readonly("phase_velocity", &FringeResult::phase_velocity)
      .def_readonly("max_abs_prob_velocity", &FringeResult::max_abs_prob_velocity);
  m.def("fringe_demo",
        [](double k, double p, const Grid1D& g, std::size_t n) { return fringe_demo(FringeSpec(k, p), g, n); },
        py::arg("k"), py::arg("p"), py::arg("grid"), py::arg("n_steps"));
  m.def("characteristic_determinant",
        [](double a, double b, double c, double d) { return characteristic_determinant({a, b, c, d}); });
  m.def("characteristic_closed_form",
        [](double a, double b, double c, double d) { return characteristic_closed_form({a, b, c, d}); });

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("parse", &parse_config)
      .def_static("load", &load_config)
      .def("serialize", &serialize_config)
      .def("__eq__", [](const ExperimentConfig& a, const ExperimentConfig& b) { return a == b; });

  py::class_<ExperimentReport>(m, "ExperimentReport")
      .def_readonly("checks", &ExperimentReport::checks)
      .def_readonly("error", &ExperimentReport::error)
      .def_readonly("notes", &ExperimentReport::notes)
      .def_property_readonly("scalars",
                             [](const ExperimentReport& r) {
                               py::dict d;
                               for (const auto& [k, v] : r.scalars) d[py::str(k)] = v;
                               return d;
                             })
      .def("all_pass", &ExperimentReport::all_pass)
      .def("format", &format_report);

  m.def("q_point", &q_point, py::arg("arrival_time"), py::arg("length"));
  m.def("run_experiment", [](const ExperimentConfig& c) { return run_experiment(c); },
        py::call_guard<py::gil_scoped_release>());
  m.def("run_dumont", [](const ExperimentConfig& c) { return run_dumont(c); },
        py::call_guard<py::gil_scoped_release>());
  m.def("run_fringe", &run_fringe, py::call_guard<py::gil_scoped_release>());
  m.def("run_characteristics", &run_characteristics, py::call_guard<py::gil_scoped_release>());
  m.def("run_sweep",
        [](const ExperimentConfig& c, const std::string& param, const std::vector<double>& values) {
          return run_sweep(c, parse_sweep_parameter(param), values);
        },
        py::arg("config"), py::arg("param"), py::arg("values"),
        py::call_guard<py::gil_scoped_release>());
}
