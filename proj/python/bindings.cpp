#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "amtile/io.hpp"
#include "amtile/parallel.hpp"

namespace py = pybind11;
using namespace amtile;

namespace {

using Coords = std::vector<std::int64_t>;

std::vector<Coords> subset_coords(const FiniteSubset& s) {
  std::vector<Coords> out;
  out.reserve(s.size());
  for (const auto& e : s) out.push_back(s.group().coords(e));
  return out;
}

FiniteSubset subset_of(const Group& g, const std::vector<Coords>& xs) {
  std::vector<Element> es;
  es.reserve(xs.size());
  for (const auto& x : xs) es.push_back(g.from_coords(x));
  return FiniteSubset(g, std::move(es));
}

Quasitiling tiling_of(const Json& j, int level) {
  if (artifact_kind(j) == "hierarchy") {
    auto h = levels_from_json(j);
    if (level < 1 || level > static_cast<int>(h.levels.size())) throw Error("level out of range");
    return h.levels[static_cast<std::size_t>(level - 1)].tiling;
  }
  return quasitiling_from_json(j);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quasitilings, exact tilings and tiling hierarchies on finite windows of amenable groups.";
  py::register_exception<Error>(m, "AmtileError", PyExc_ValueError);

  py::class_<Group>(m, "Group")
      .def(py::init([](const std::string& name) { return Group::parse(name); }), py::arg("name"))
      .def_property_readonly("name", &Group::name)
      .def_property_readonly("arity", &Group::arity)
      .def("identity", [](const Group& g) { return g.coords(g.identity()); })
      .def("mul", [](const Group& g, const Coords& a, const Coords& b) {
        return g.coords(g.mul(g.from_coords(a), g.from_coords(b)));
      })
      .def("inv", [](const Group& g, const Coords& a) { return g.coords(g.inv(g.from_coords(a))); })
      .def("pow", [](const Group& g, const Coords& a, std::int64_t k) { return g.coords(g.pow(g.from_coords(a), k)); })
      .def("order", [](const Group& g, const Coords& a) { return g.order(g.from_coords(a)); },
           "Order of the element, or None when infinite.")
      .def("index_of", [](const Group& g, const Coords& a) { return g.index_of(g.from_coords(a)); })
      .def("element_at", [](const Group& g, std::uint64_t i) { return g.coords(g.element_at(i)); })
      .def("__eq__", [](const Group& a, const Group& b) { return a == b; })
      .def("__repr__", [](const Group& g) { return "Group('" + g.name() + "')"; });

  m.def("folner_set", [](const Group& g, int n) { return subset_coords(folner_set(g, n)); }, py::arg("group"),
        py::arg("n"), "Elements of F_n in canonical order.");
  m.def("ball", [](const Group& g, int r) { return subset_coords(ball(g, r)); }, py::arg("group"), py::arg("r"));
  m.def(
      "invariance_ratio",
      [](const Group& g, const std::vector<Coords>& T, const std::vector<Coords>& K) {
        const auto r = invariance_ratio(subset_of(g, T), subset_of(g, K));
        return py::make_tuple(r.num(), r.den());
      },
      py::arg("group"), py::arg("T"), py::arg("K"), "|KT △ T| / |T| as (numerator, denominator).");
  m.def(
      "k_core",
      [](const Group& g, const std::vector<Coords>& T, const std::vector<Coords>& K) {
        return subset_coords(k_core(subset_of(g, T), subset_of(g, K)));
      },
      py::arg("group"), py::arg("T"), py::arg("K"));

  m.def("set_threads", &set_thread_count, py::arg("n"));
  m.def("threads", &thread_count);

  m.def(
      "run",
      [](const std::string& yaml) {
        const auto c = parse_run_config(yaml);
        RunOutcome r;
        {
          py::gil_scoped_release release;
          r = run(c);
        }
        return py::make_tuple(r.ok, dump(r.report), r.artifacts);
      },
      py::arg("config_yaml"), "Runs a pipeline config; returns (ok, report_json, {name: content}).");
  m.def(
      "verify", [](const std::string& artifact) { return dump(verify_artifact(Json::parse(artifact))); },
      py::arg("artifact_json"));
  m.def(
      "render",
      [](const std::string& artifact, const std::string& format, int level) {
        return render_z2(tiling_of(Json::parse(artifact), level), format);
      },
      py::arg("artifact_json"), py::arg("format") = "ascii", py::arg("level") = 1);
}
