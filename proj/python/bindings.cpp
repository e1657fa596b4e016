#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "microrev/experiment.hpp"
#include "microrev/noise.hpp"
#include "microrev/thermo.hpp"

namespace py = pybind11;
using namespace microrev;

namespace {

Subspace subspace_from(const std::optional<std::vector<int>>& labels) {
  return labels ? Subspace{*labels} : Subspace::centered();
}

// Work distributions cross the boundary as plain (work, probability) lists.
py::dict work_dict(const WorkDistribution& d) {
  std::vector<double> w, p;
  std::vector<std::uint64_t> c;
  for (const WorkPoint& pt : d.points) {
    w.push_back(pt.work);
    p.push_back(pt.probability);
    c.push_back(pt.count);
  }
  py::dict out;
  out["direction"] = to_string(d.direction);
  out["work"] = w;
  out["probability"] = p;
  out["count"] = c;
  out["leaked"] = d.leaked;
  out["events"] = d.events;
  return out;
}

}  // namespace

PYBIND11_MODULE(_microrev, m) {
  m.doc() = "Cooper-pair-box protocol simulator";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::domain_error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<DeviceParams>(m, "DeviceParams")
      .def(py::init([](double ec, double ej, double alpha, int n) {
             DeviceParams d{ec, ej, alpha, n};
             d.validate();
             return d;
           }),
           py::arg("charging_energy") = DeviceParams{}.charging_energy,
           py::arg("total_josephson_energy") = DeviceParams{}.total_josephson_energy,
           py::arg("asymmetry") = DeviceParams{}.asymmetry,
           py::arg("truncation") = DeviceParams{}.truncation)
      .def_readwrite("charging_energy", &DeviceParams::charging_energy)
      .def_readwrite("total_josephson_energy", &DeviceParams::total_josephson_energy)
      .def_readwrite("asymmetry", &DeviceParams::asymmetry)
      .def_readwrite("truncation", &DeviceParams::truncation)
      .def_property_readonly("max_label", &DeviceParams::max_label)
      .def("__repr__", [](const DeviceParams& d) {
        return "DeviceParams(E_C=" + std::to_string(d.charging_energy) +
               ", E_JSum=" + std::to_string(d.total_josephson_energy) +
               ", asymmetry=" + std::to_string(d.asymmetry) +
               ", truncation=" + std::to_string(d.truncation) + ")";
      });

  py::class_<BiasPoint>(m, "BiasPoint")
      .def(py::init<double, double>(), py::arg("flux") = 0.0, py::arg("gate_charge") = 0.0)
      .def_readwrite("flux", &BiasPoint::flux)
      .def_readwrite("gate_charge", &BiasPoint::gate_charge);

  py::enum_<Direction>(m, "Direction")
      .value("forward", Direction::forward)
      .value("backward", Direction::backward);

  py::class_<DriveProtocol>(m, "DriveProtocol")
      .def_readwrite("duration", &DriveProtocol::duration)
      .def_readonly("direction", &DriveProtocol::direction)
      .def_property(
          "invert_flux", [](const DriveProtocol& p) { return p.reversal.invert_flux; },
          [](DriveProtocol& p, bool v) { p.reversal.invert_flux = v; })
      .def_property(
          "mirror_time", [](const DriveProtocol& p) { return p.reversal.mirror_time; },
          [](DriveProtocol& p, bool v) { p.reversal.mirror_time = v; });

  py::class_<PropagatorConfig>(m, "PropagatorConfig")
      .def(py::init([](double dt) { return PropagatorConfig{dt}; }), py::arg("time_step") = 1e-4)
      .def_readwrite("time_step", &PropagatorConfig::time_step);

  py::class_<TransitionMatrix>(m, "TransitionMatrix")
      .def_readonly("probabilities", &TransitionMatrix::probabilities)
      .def_readonly("direction", &TransitionMatrix::direction)
      .def("at", &TransitionMatrix::at, py::arg("final_label"), py::arg("initial_label"))
      .def(
          "leakage",
          [](const TransitionMatrix& t, int n, std::optional<std::vector<int>> labels) {
            return t.leakage(n, subspace_from(labels));
          },
          py::arg("initial_label"), py::arg("subspace") = py::none());

  py::class_<DetectorParams>(m, "DetectorParams")
      .def(py::init([](double sq, double tm, double cs, double cc) {
             return DetectorParams{sq, tm, cs, cc};
           }),
           py::arg("charge_sensitivity") = 1.7e-6, py::arg("measurement_time") = 20.0,
           py::arg("island_capacitance") = 6.5, py::arg("coupling_capacitance") = 0.20);

  m.def("default_protocol", &default_protocol);
  m.def("reverse_protocol", &reverse_protocol, py::arg("protocol"));
  m.def("sample_drive", &sample_drive, py::arg("protocol"), py::arg("t"));
  m.def("beta_ratio", &beta_ratio, py::arg("params"), py::arg("flux"));
  m.def(
      "build_hamiltonian",
      [](const DeviceParams& d, BiasPoint b) { return build_hamiltonian(d, b).matrix(); },
      py::arg("params"), py::arg("bias"));
  m.def(
      "evolve",
      [](const DeviceParams& d, const DriveProtocol& p, const PropagatorConfig& c) {
        py::gil_scoped_release release;
        return evolve(d, p, c).matrix();
      },
      py::arg("params"), py::arg("protocol"), py::arg("config") = PropagatorConfig{});
  m.def("run_protocol", &run_protocol, py::arg("params"), py::arg("protocol"),
        py::arg("config") = PropagatorConfig{}, py::call_guard<py::gil_scoped_release>());
  m.def(
      "microrev_deviation",
      [](const TransitionMatrix& f, const TransitionMatrix& b,
         std::optional<std::vector<int>> labels) {
        const MicrorevDeviation d = microrev_deviation(f, b, subspace_from(labels));
        return py::dict(py::arg("max_abs") = d.max_abs, py::arg("mean_abs") = d.mean_abs,
                        py::arg("cells") = d.cells);
      },
      py::arg("forward"), py::arg("backward"), py::arg("subspace") = py::none());
  m.def(
      "energy_ladder",
      [](const DeviceParams& d, const DriveProtocol& p, std::optional<std::vector<int>> labels) {
        const EnergyLadder l = energy_ladder(d, p, subspace_from(labels));
        return py::dict(py::arg("labels") = l.labels, py::arg("energies") = l.energies,
                        py::arg("overlaps") = l.overlaps);
      },
      py::arg("params"), py::arg("protocol"), py::arg("subspace") = py::none());
  m.def(
      "gibbs_weights",
      [](const DeviceParams& d, const DriveProtocol& p, double temperature) {
        return gibbs_weights(energy_ladder(d, p), temperature).weights;
      },
      py::arg("params"), py::arg("protocol"), py::arg("temperature"));
  m.def(
      "work_distribution",
      [](const DeviceParams& d, const DriveProtocol& p, const TransitionMatrix& t,
         double temperature, std::optional<std::uint64_t> events, std::uint64_t seed) {
        const EnergyLadder l = energy_ladder(d, p);
        const GibbsWeights w = gibbs_weights(l, temperature);
        return work_dict(events ? sample_work(w, t, l, *events, seed)
                                : work_distribution_exact(w, t, l));
      },
      py::arg("params"), py::arg("protocol"), py::arg("transitions"), py::arg("temperature"),
      py::arg("events") = py::none(), py::arg("seed") = 0,
      "Exact distribution, or a Monte Carlo one when `events` is given.");
  m.def(
      "bk_equality",
      [](const DeviceParams& d, const DriveProtocol& p, const TransitionMatrix& t,
         double temperature, std::optional<std::uint64_t> events, std::uint64_t seed) {
        const EnergyLadder l = energy_ladder(d, p);
        const GibbsWeights w = gibbs_weights(l, temperature);
        const WorkDistribution dist =
            events ? sample_work(w, t, l, *events, seed) : work_distribution_exact(w, t, l);
        const BkEquality bk = bk_equality(dist, temperature);
        return py::dict(py::arg("mean") = bk.mean, py::arg("stderr") = bk.standard_error,
                        py::arg("events") = bk.events);
      },
      py::arg("params"), py::arg("protocol"), py::arg("transitions"), py::arg("temperature"),
      py::arg("events") = py::none(), py::arg("seed") = 0);
  m.def(
      "dephasing_ratio",
      [](const DeviceParams& d, BiasPoint b, double bath, int level) {
        const DephasingRatioPoint r = dephasing_ratio(d, b, bath, level);
        return py::dict(py::arg("ratio") = r.ratio, py::arg("t2_over_t1") = r.t2_over_t1,
                        py::arg("beta") = r.beta);
      },
      py::arg("params"), py::arg("bias"), py::arg("bath_temperature"), py::arg("level") = 0);
  m.def(
      "detection_probability",
      [](const DetectorParams& det) { return detector_distinguishability(det).success_probability; },
      py::arg("detector") = DetectorParams{});
}
