#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "appletaste/adversaries.hpp"
#include "appletaste/combinatorics.hpp"
#include "appletaste/errors.hpp"
#include "appletaste/experts.hpp"
#include "appletaste/harness.hpp"

namespace py = pybind11;
using namespace appletaste;

namespace {

py::dict row_to_dict(const RunRow& r) {
  py::dict d;
  d["learner"] = r.learner;
  d["adversary"] = r.adversary;
  d["n"] = r.n;
  d["T"] = r.T;
  d["k"] = r.k;
  d["seed"] = r.seed;
  d["skipped"] = r.skipped;
  d["skip_reason"] = r.skip_reason;
  d["mistakes"] = r.mistakes.total;
  d["false_positives"] = r.mistakes.false_positives;
  d["false_negatives"] = r.mistakes.false_negatives;
  d["bound"] = r.bound;
  d["upper"] = r.upper;
  d["floor"] = r.floor;
  d["certificate_ok"] = r.certificate_ok;
  d["within_bound"] = r.within_bound;
  return d;
}

}  // namespace

PYBIND11_MODULE(_appletaste, m) {
  m.doc() = "Apple-tasting online learning: learners, adversaries and combinatorial dimensions";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_IndexError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

  py::class_<FiniteClass>(m, "FiniteClass")
      .def(py::init([](const std::vector<std::string>& rows) { return FiniteClass::from_strings(rows); }),
           py::arg("rows"))
      .def_property_readonly("size", &FiniteClass::size)
      .def_property_readonly("domain_size", &FiniteClass::domain_size)
      .def("row", &FiniteClass::row_string, py::arg("h"))
      .def("at", &FiniteClass::at, py::arg("h"), py::arg("x"))
      .def("__len__", &FiniteClass::size)
      .def("__repr__", [](const FiniteClass& H) {
        return "<FiniteClass |H|=" + std::to_string(H.size()) + " m=" + std::to_string(H.domain_size()) + ">";
      });

  m.def("read_class", &read_class_file, py::arg("path"));
  m.def("write_class", [](const FiniteClass& H) {
    std::ostringstream out;
    write_class(out, H);
    return out.str();
  });
  m.def("universal_class", &universal_class, py::arg("n"));
  m.def("hamming_ball_class", &hamming_ball_class, py::arg("m"), py::arg("d"));
  m.def("singletons_class", &singletons_class, py::arg("m"), py::arg("with_zero") = false);
  m.def("glue", [](const std::vector<FiniteClass>& parts) { return glue(parts); }, py::arg("classes"));

  m.def("littlestone_dim", [](const FiniteClass& H) { return littlestone_dim(H); }, py::arg("H"));
  m.def(
      "width_depth",
      [](const FiniteClass& H, std::size_t w, std::size_t cap) {
        const DepthResult r = width_depth(H, w, cap);
        return py::make_tuple(r.value, r.cap_exceeded);
      },
      py::arg("H"), py::arg("w"), py::arg("cap"));
  m.def(
      "d1_k",
      [](const FiniteClass& H, std::size_t k, std::size_t cap) {
        const DepthResult r = d1_k(H, k, cap);
        return py::make_tuple(r.value, r.cap_exceeded);
      },
      py::arg("H"), py::arg("k"), py::arg("cap"));
  m.def("effective_width", [](const FiniteClass& H, std::size_t cap) { return effective_width(H, cap); },
        py::arg("H"), py::arg("cap"));
  m.def(
      "classify",
      [](const FiniteClass& H, std::size_t cap) { return to_string(classify(effective_width(H, cap))); },
      py::arg("H"), py::arg("cap"));
  m.def("minimax", [](const FiniteClass& H, std::size_t T, std::size_t k) { return minimax_oracle(H, T, k); },
        py::arg("H"), py::arg("T"), py::arg("k") = 0);

  m.def(
      "expat_bounds",
      [](std::size_t n, std::size_t T, std::optional<std::size_t> k) {
        const ExpertLearnerState s = k ? expat_state(n, T, *k) : realizable_expat_state(n, T);
        const ExpertBounds b = expat_bounds(s);
        py::dict d;
        d["eta"] = s.eta;
        d["log2_L"] = s.L.log2();
        d["false_negatives"] = b.false_negatives;
        d["false_positives"] = b.false_positives;
        return d;
      },
      py::arg("n"), py::arg("T"), py::arg("k") = py::none(),
      "Mistake bounds of the realizable learner (k=None) or the k-realizable learner.");

  m.def(
      "sample_random_class",
      [](std::size_t d, std::size_t T, double c, std::uint64_t seed) {
        RandomClassSpec spec;
        spec.d = d;
        spec.T = T;
        spec.c = c;
        spec.seed = seed;
        SampledClass s = sample_random_class(spec);
        return py::make_tuple(std::move(s.H), s.p);
      },
      py::arg("d"), py::arg("T"), py::arg("c") = 1.0, py::arg("seed") = 1);

  m.def(
      "run_sweep",
      [](const std::string& config_text) {
        std::istringstream in(config_text);
        const SweepConfig cfg = parse_sweep_config(in);
        std::vector<RunRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(cfg);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_to_dict(r));
        return out;
      },
      py::arg("config"), "Runs a sweep described by INI text and returns one dict per grid cell.");
  m.def("run_csv_header", &run_csv_header);

  m.def(
      "fit_power_law",
      [](const std::vector<std::pair<double, double>>& points) {
        const ScalingFit f = fit_power_law(points);
        py::dict d;
        d["alpha"] = f.alpha;
        d["a"] = f.a;
        d["residual"] = f.residual;
        d["samples"] = f.samples;
        return d;
      },
      py::arg("points"));
}
