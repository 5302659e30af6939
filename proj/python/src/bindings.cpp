#include "qlam/adequacy.hpp"
#include "qlam/denote.hpp"
#include "qlam/machine.hpp"
#include "qlam/programs.hpp"
#include "qlam/syntax.hpp"
#include "qlam/typing.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qlam;

#define QLAM_STR(x) #x
#define QLAM_XSTR(x) QLAM_STR(x)

namespace {

DerivationPtr check_program(const Program& p) { return typecheck(Context(), p.term, p.declared_type); }

TruncationConfig make_config(int list_max, int bang_max, int fix_iters) {
  TruncationConfig t;
  t.list_max = list_max;
  t.bang_max = bang_max;
  t.fix_iters = fix_iters;
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Quantum lambda calculus: type checker, QRAM machine and CPM denotations";
  m.attr("__version__") = QLAM_XSTR(VERSION_INFO);

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<TypeError>(m, "TypeCheckError", PyExc_ValueError);
  py::register_exception<NotUnitType>(m, "NotUnitType", PyExc_ValueError);
  py::register_exception<NotClosed>(m, "NotClosed", PyExc_ValueError);

  m.def("examples", [] {
    std::map<std::string, std::string> out;
    for (const auto& p : example_programs()) out[p.name] = p.source;
    return out;
  }, "Bundled example programs, by name");

  m.def("pretty", [](const std::string& src) { return pretty(parse_program(src).term); },
        "Parse, desugar and print a program", py::arg("source"));

  m.def("typecheck", [](const std::string& src) { return to_string(check_program(parse_program(src))->type); },
        "Type of a closed program", py::arg("source"));

  m.def("derivation", [](const std::string& src) { return print_derivation(*check_program(parse_program(src))); },
        "Derivation tree of a closed program", py::arg("source"));

  m.def(
      "run",
      [](const std::string& src, std::size_t max_steps) {
        Program p = parse_program(src);
        DerivationPtr d = check_program(p);
        OutcomeDistribution dist = eval_distribution(make_closure(p.term), {max_steps, 1e-12});
        py::list outcomes;
        for (const auto& o : dist.outcomes)
          outcomes.append(py::make_tuple(show_value(*o.closure.term, *d->type), o.prob));
        py::dict r;
        r["outcomes"] = outcomes;
        r["blocked"] = dist.blocked;
        r["residual"] = dist.residual;
        return r;
      },
      "Outcome distribution of a closed program", py::arg("source"), py::arg("max_steps") = 10000);

  m.def(
      "sample",
      [](const std::string& src, std::uint64_t seed, std::size_t max_steps) -> py::object {
        Program p = parse_program(src);
        DerivationPtr d = check_program(p);
        SampleResult r = sample(make_closure(p.term), seed, max_steps);
        if (r.status != SampleStatus::Value) return py::none();
        return py::str(show_value(*r.closure.term, *d->type));
      },
      "One sampled run; None when the run blocks or times out", py::arg("source"), py::arg("seed") = 0,
      py::arg("max_steps") = 10000);

  m.def(
      "denote",
      [](const std::string& src, int list_max, int bang_max, int fix_iters) {
        Program p = parse_program(src);
        Denotation d = denote_term(*check_program(p), make_config(list_max, bang_max, fix_iters));
        std::map<std::string, Eigen::MatrixXcd> out;
        for (const auto& [b, x] : d.morphism.apply(0, Eigen::MatrixXcd::Identity(1, 1)))
          out[(*d.morphism.tgt())[static_cast<std::size_t>(b)].label->key] = x;
        return out;
      },
      "Output family of a closed program at the unit input, by web label", py::arg("source"),
      py::arg("list_max") = 4, py::arg("bang_max") = 2, py::arg("fix_iters") = 64);

  m.def(
      "serialize_denotation",
      [](const std::string& src, int list_max, int bang_max, int fix_iters) {
        Program p = parse_program(src);
        return cpm::serialize(denote_term(*check_program(p), make_config(list_max, bang_max, fix_iters)).morphism);
      },
      "Serialized morphism of a closed program", py::arg("source"), py::arg("list_max") = 4,
      py::arg("bang_max") = 2, py::arg("fix_iters") = 64);

  m.def(
      "adequacy",
      [](const std::string& src, std::size_t max_steps) {
        TermPtr t = parse_program(src).term;
        TruncationConfig cfg = is_finitary(*t) ? static_truncation(t) : TruncationConfig{};
        AdequacyOptions o;
        o.max_steps = max_steps;
        AdequacyReport r = check_adequacy(t, cfg, o);
        py::dict d;
        d["hash"] = r.source_hash;
        d["denot"] = r.denot;
        d["halt_lower"] = r.halt_lower;
        d["residual"] = r.residual;
        d["verdict"] = to_string(r.verdict);
        return d;
      },
      "Adequacy report for a closed unit-type program", py::arg("source"), py::arg("max_steps") = 10000);

  m.def("random_finitary_program", [](std::uint64_t seed, int budget) { return pretty(random_finitary_program(seed, budget)); },
        "Source of a generated finitary unit-type program", py::arg("seed"), py::arg("budget") = 10);
}
