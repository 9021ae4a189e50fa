#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tfsprime/avm_io.hpp"
#include "tfsprime/earley.hpp"
#include "tfsprime/priming.hpp"

namespace py = pybind11;
using namespace tfsprime;

namespace {

PrimedGrammar prime_text(const std::string& text, const std::string& mode, std::optional<std::size_t> budget_cap) {
  PrimingOptions o;
  o.budget_cap = budget_cap;
  return prime_grammar(load_grammar(text), parse_mode(mode), o);
}

py::dict stats_dict(const EngineStats& s) {
  py::dict d;
  d["edges"] = s.edges;
  d["predictions"] = s.predictions;
  d["prediction_hits"] = s.prediction_hits;
  d["completions"] = s.completions_succeeded;
  d["results"] = s.results;
  d["wall_ms"] = s.wall_ms;
  return d;
}

py::list result_list(const std::vector<Result>& results) {
  py::list out;
  for (const auto& r : results) out.append(py::make_tuple(r.text, write_avm(r.cont)));
  return out;
}

}  // namespace

PYBIND11_MODULE(_tfsprime, m) {
  m.doc() = "Grammar priming and chart processing for typed feature structure grammars";

  py::register_exception<GrammarError>(m, "GrammarError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<Diagnostic>(m, "Diagnostic")
      .def_property_readonly("kind", [](const Diagnostic& d) { return kind_name(d.kind); })
      .def_readonly("rule", &Diagnostic::rule)
      .def_readonly("related", &Diagnostic::related)
      .def_readonly("explanation", &Diagnostic::explanation)
      .def_readonly("remedy", &Diagnostic::remedy);

  py::class_<PrimedGrammar>(m, "PrimedGrammar")
      .def_property_readonly("mode", [](const PrimedGrammar& p) { return mode_name(p.mode); })
      .def_property_readonly("rules",
                             [](const PrimedGrammar& p) {
                               std::vector<std::string> names;
                               for (const auto& r : p.grammar.rules) names.push_back(r.name);
                               return names;
                             })
      .def("order",
           [](const PrimedGrammar& p, const std::string& rule) -> std::optional<std::vector<std::size_t>> {
             auto r = p.grammar.rule_index(rule);
             if (!r) throw GrammarError("unknown rule " + rule);
             if (!p.orderings[*r]) return std::nullopt;
             std::vector<std::size_t> one_based;
             for (auto k : p.orderings[*r]->order) one_based.push_back(k + 1);
             return one_based;
           },
           py::arg("rule"), "1-based evaluation order of a rule, or None")
      .def_readonly("diagnostics", &PrimedGrammar::diagnostics)
      .def_readonly("unreachable", &PrimedGrammar::unreachable)
      .def("serialize", &serialize_primed);

  m.def("prime", &prime_text, py::arg("grammar_text"), py::arg("mode") = "generate",
        py::arg("budget_cap") = std::nullopt, "Prime grammar text for one processing direction");
  m.def("load_primed", [](const std::string& text) { return load_primed(text); }, py::arg("text"));
  m.def(
      "generate",
      [](const PrimedGrammar& p, const std::string& goal, std::size_t edge_cap) {
        EngineOptions o;
        o.edge_cap = edge_cap;
        EngineStats s;
        auto results = generate(p, read_avm(p.grammar.sig, goal), o, &s);
        return py::make_tuple(result_list(results), stats_dict(s));
      },
      py::arg("primed"), py::arg("goal"), py::arg("edge_cap") = 100000,
      "Returns ([(text, logical form)], stats)");
  m.def(
      "parse",
      [](const PrimedGrammar& p, const std::string& sentence, std::size_t edge_cap) {
        EngineOptions o;
        o.edge_cap = edge_cap;
        EngineStats s;
        auto results = parse(p, tokenize(sentence), o, &s);
        return py::make_tuple(result_list(results), stats_dict(s));
      },
      py::arg("primed"), py::arg("sentence"), py::arg("edge_cap") = 100000,
      "Returns ([(text, logical form)], stats)");
  m.def("tokenize", [](const std::string& s) { return tokenize(s); }, py::arg("text"));
}
