#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ordpoly/analysis.hpp"
#include "ordpoly/errors.hpp"
#include "ordpoly/io.hpp"
#include "ordpoly/model.hpp"
#include "ordpoly/topk.hpp"

namespace py = pybind11;
using namespace ordpoly;

namespace {

// Exact results cross the boundary as "p/q" strings; the Python side turns
// them into fractions.Fraction. Estimates stay floats.
py::object value_object(const Value& v) {
  if (v.exact) return py::str(v.exact->str());
  return py::float_(v.approx);
}

QueryOptions options(const std::string& engine, std::uint64_t max_extensions, unsigned threads, std::uint64_t seed,
                     double epsilon, double delta) {
  QueryOptions o;
  const auto e = parse_engine(engine);
  if (!e) throw InputError("unknown engine '" + engine + "'");
  o.engine = *e;
  o.enumeration.max_extensions = max_extensions;
  o.enumeration.threads = threads;
  o.sampler.seed = seed;
  o.sampler.epsilon = epsilon;
  o.sampler.delta = delta;
  o.sampler.threads = threads;
  if (o.engine == Engine::sample) o.sampler.validate();
  return o;
}

std::vector<VarId> resolve(const ConstraintSet& cs, const std::optional<std::vector<std::string>>& names) {
  std::vector<VarId> out;
  if (!names) {
    for (std::size_t i = 0; i < cs.size(); ++i) out.push_back(var(i));
    std::sort(out.begin(), out.end(), [&](VarId a, VarId b) { return cs.name(a) < cs.name(b); });
    return out;
  }
  for (const auto& n : *names) out.push_back(cs.variable(n));
  return out;
}

#define ORDPOLY_QUERY_ARGS                                                                                   \
  py::arg("engine") = "auto", py::arg("max_extensions") = kDefaultMaxExtensions, py::arg("threads") = 1u, \
  py::arg("seed") = 0u, py::arg("epsilon") = 0.05, py::arg("delta") = 0.05

}  // namespace

PYBIND11_MODULE(_ordpoly, m) {
  m.doc() = "Interpolation of unknown values in [0, 1] under order and exact-value constraints";

  auto base = py::register_exception<Error>(m, "OrdpolyError");
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
  py::register_exception<BudgetError>(m, "BudgetError", base.ptr());
  py::register_exception<UnsupportedShapeError>(m, "UnsupportedShapeError", base.ptr());
  py::register_exception<InconsistentError>(m, "InconsistentError", base.ptr());

  py::class_<ConstraintSet>(m, "ConstraintSet")
      .def(py::init<>())
      .def_static("from_json", [](const std::string& text) { return parse_constraints(text); })
      .def("to_json", [](const ConstraintSet& cs) { return constraints_to_json(cs).dump(); })
      .def("add_variable", [](ConstraintSet& cs, const std::string& name) { return idx(cs.add_variable(name)); })
      .def("add_order",
           [](ConstraintSet& cs, const std::string& lo, const std::string& hi) {
             cs.add_order(cs.ensure_variable(lo), cs.ensure_variable(hi));
           })
      .def("set_exact",
           [](ConstraintSet& cs, const std::string& name, const std::string& value) {
             cs.set_exact(cs.ensure_variable(name), Rational::parse(value));
           })
      .def("exact",
           [](const ConstraintSet& cs, const std::string& name) -> std::optional<std::string> {
             const auto& v = cs.exact(cs.variable(name));
             if (!v) return std::nullopt;
             return v->str();
           })
      .def("names",
           [](const ConstraintSet& cs) {
             std::vector<std::string> out;
             for (std::size_t i = 0; i < cs.size(); ++i) out.push_back(cs.name(var(i)));
             return out;
           })
      .def("__len__", &ConstraintSet::size);

  m.def("check", [](const ConstraintSet& cs) {
    const auto r = check_consistency(cs);
    std::vector<std::string> witness;
    for (VarId v : r.witness) witness.push_back(cs.name(v));
    return py::make_tuple(r.ok, witness, r.message);
  });

  m.def("close", [](const ConstraintSet& cs) { return close_under_implication(cs); });

  m.def("dimension", [](const ConstraintSet& cs) { return Analysis(cs).dimension(); });

  m.def("decompose", [](const ConstraintSet& cs) {
    const Analysis a(cs);
    py::list parts;
    const auto& d = a.decomposition();
    for (std::size_t p = 0; p < d.parts.size(); ++p) {
      std::vector<std::string> members;
      for (std::size_t v = 0; v < cs.size(); ++v) {
        if (a.part_of(var(v)) == p) members.push_back(cs.name(var(v)));
      }
      std::sort(members.begin(), members.end());
      parts.append(py::make_tuple(members, std::string(to_string(d.shapes[p]))));
    }
    return parts;
  });

  m.def(
      "interpolate",
      [](const ConstraintSet& cs, const std::string& engine, std::uint64_t max_extensions, unsigned threads,
         std::uint64_t seed, double epsilon, double delta) {
        const Analysis a(cs);
        const auto values = a.interpolate_all(options(engine, max_extensions, threads, seed, epsilon, delta));
        py::dict out;
        for (std::size_t i = 0; i < cs.size(); ++i) out[py::str(cs.name(var(i)))] = value_object(values[i]);
        return out;
      },
      py::arg("cs"), ORDPOLY_QUERY_ARGS);

  m.def("interpolate_stable", [](const ConstraintSet& cs) {
    const auto values = Analysis(cs).interpolate_stable();
    py::dict out;
    for (std::size_t i = 0; i < cs.size(); ++i) out[py::str(cs.name(var(i)))] = values[i].str();
    return out;
  });

  m.def(
      "volume",
      [](const ConstraintSet& cs, const std::string& engine, std::uint64_t max_extensions, unsigned threads,
         std::uint64_t seed, double epsilon, double delta) {
        return Analysis(cs).volume(options(engine, max_extensions, threads, seed, epsilon, delta)).str();
      },
      py::arg("cs"), ORDPOLY_QUERY_ARGS);

  m.def(
      "marginal",
      [](const ConstraintSet& cs, const std::string& name, const std::string& engine, std::uint64_t max_extensions,
         unsigned threads, std::uint64_t seed, double epsilon, double delta) {
        const Analysis a(cs);
        const auto f = a.marginal(cs.variable(name), options(engine, max_extensions, threads, seed, epsilon, delta));
        std::vector<std::string> breakpoints;
        for (const auto& b : f.breakpoints()) breakpoints.push_back(b.str());
        std::vector<std::vector<std::string>> pieces;
        for (const auto& p : f.pieces()) {
          std::vector<std::string> coeffs;
          for (const auto& c : p.coefficients()) coeffs.push_back(c.str());
          pieces.push_back(coeffs);
        }
        return py::make_tuple(breakpoints, pieces);
      },
      py::arg("cs"), py::arg("variable"), ORDPOLY_QUERY_ARGS);

  m.def(
      "topk",
      [](const ConstraintSet& cs, std::size_t k, const std::string& semantics,
         const std::optional<std::vector<std::string>>& selection, const std::string& engine,
         std::uint64_t max_extensions, unsigned threads, std::uint64_t seed, double epsilon, double delta) {
        const auto sem = parse_semantics(semantics);
        if (!sem) throw InputError("unknown semantics '" + semantics + "'");
        const Analysis a(cs);
        const auto sel = resolve(cs, selection);
        const auto res = topk(a, *sem, sel, k, options(engine, max_extensions, threads, seed, epsilon, delta));
        py::list entries;
        for (const auto& e : res.entries) entries.append(py::make_tuple(cs.name(e.variable), value_object(e.annotation)));
        py::object probability = py::none();
        if (res.probability) probability = py::str(res.probability->str());
        return py::make_tuple(entries, probability);
      },
      py::arg("cs"), py::arg("k"), py::arg("semantics") = "local", py::arg("selection") = py::none(),
      ORDPOLY_QUERY_ARGS);
}
