// Command-line front end: compile, generate, parse, inspect.
//
// Exit codes: 0 ok, 1 hard error, 2 diagnostics present, 3 chart limit hit.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "tfsprime/avm_io.hpp"
#include "tfsprime/earley.hpp"
#include "tfsprime/priming.hpp"

using namespace tfsprime;

namespace {

struct Flags {
  std::string grammar;
  std::string mode = "generate";
  std::string output;
  std::size_t budget_cap = 0;
  std::size_t restrictor_depth = 4;
  std::size_t summary_depth = 8;
  std::size_t edge_cap = 100000;
  bool trace = false;
  bool first = false;
  bool stats_json = false;
  bool declared_order = false;
  std::string goal;
  std::string goal_file;
  std::vector<std::string> tokens;
};

PrimingOptions priming_options(const Flags& f) {
  PrimingOptions o;
  if (f.budget_cap > 0) o.budget_cap = f.budget_cap;
  o.restrictor_depth = f.restrictor_depth;
  o.summary_depth = f.summary_depth;
  return o;
}

// A primed file, or a plain grammar primed on the fly for `mode`.
PrimedGrammar load_for(const Flags& f, Mode mode) {
  std::string text = read_text_file(f.grammar);
  if (text.find("@mode") == std::string::npos) return prime_grammar(load_grammar(text), mode, priming_options(f));
  PrimedGrammar p = load_primed(text);
  if (p.mode != mode)
    throw GrammarError(f.grammar + " is primed for " + mode_name(p.mode) + ", not " + mode_name(mode));
  return p;
}

EngineOptions engine_options(const Flags& f) {
  EngineOptions o;
  o.edge_cap = f.edge_cap;
  o.first_only = f.first;
  o.declared_order = f.declared_order;
  if (f.trace) o.trace = &std::cerr;
  return o;
}

void report_stats(const Flags& f, const EngineStats& s) {
  if (f.stats_json) {
    nlohmann::json j = {{"edges", s.edges},
                        {"active_edges", s.active_edges},
                        {"passive_edges", s.passive_edges},
                        {"predictions", s.predictions},
                        {"prediction_hits", s.prediction_hits},
                        {"scans", s.scans},
                        {"completions_attempted", s.completions_attempted},
                        {"completions_succeeded", s.completions_succeeded},
                        {"duplicates", s.duplicates},
                        {"derivations", s.derivations},
                        {"results", s.results},
                        {"wall_ms", s.wall_ms}};
    std::cerr << j.dump() << "\n";
    return;
  }
  std::cerr << "edges " << s.edges << ", predictions " << s.predictions << " (" << s.prediction_hits
            << " reused), completions " << s.completions_succeeded << "/" << s.completions_attempted << ", results "
            << s.results << " of " << s.derivations << " derivations, " << s.wall_ms << " ms\n";
}

std::string diag_text(const Diagnostic& d) {
  std::string out = kind_name(d.kind) + " " + d.rule;
  if (!d.related.empty()) out += " (" + d.related + ")";
  return out + ": " + d.explanation + "\n  remedy: " + d.remedy;
}

int cmd_compile(const Flags& f) {
  Mode mode = parse_mode(f.mode);
  PrimedGrammar p = prime_grammar(load_grammar_file(f.grammar), mode, priming_options(f));
  std::string text = serialize_primed(p);
  if (f.output.empty() || f.output == "-") {
    std::cout << text;
  } else {
    std::ofstream out(f.output, std::ios::binary);
    if (!out) throw GrammarError("cannot write " + f.output);
    out << text;
  }
  for (const auto& d : p.diagnostics) std::cerr << "DIAG " << diag_text(d) << "\n";
  return p.diagnostics.empty() ? 0 : 2;
}

int cmd_generate(const Flags& f) {
  PrimedGrammar p = load_for(f, Mode::Generation);
  std::string goal_text = !f.goal.empty() ? f.goal : f.goal_file.empty() ? "" : read_text_file(f.goal_file);
  if (goal_text.empty()) throw GrammarError("generate needs --goal or --goal-file");
  FeatureStructure goal = read_avm(p.grammar.sig, goal_text);
  EngineStats stats;
  auto results = generate(p, goal, engine_options(f), &stats);
  for (const auto& r : results) std::cout << r.text << "\t" << write_avm(r.cont) << "\n";
  report_stats(f, stats);
  return 0;
}

int cmd_parse(const Flags& f) {
  PrimedGrammar p = load_for(f, Mode::Parsing);
  std::string joined;
  for (const auto& t : f.tokens) joined += t + " ";
  EngineStats stats;
  auto results = parse(p, tokenize(joined), engine_options(f), &stats);
  for (const auto& r : results) std::cout << write_avm(r.cont) << "\n";
  report_stats(f, stats);
  return 0;
}

int cmd_inspect(const Flags& f) {
  PrimedGrammar p = load_primed_file(f.grammar);
  const auto& sig = *p.grammar.sig;
  std::cout << "mode " << mode_name(p.mode) << ", budget cap " << p.budget_cap << ", restrictor depth "
            << p.restrictor_depth << "\n";
  for (std::size_t r = 0; r < p.grammar.rules.size(); ++r) {
    const Rule& rule = p.grammar.rules[r];
    std::cout << "rule " << rule.name << " (" << rule.arity() << " daughters";
    if (rule.head) std::cout << ", head " << *rule.head + 1;
    std::cout << ")\n";
    if (const auto& o = p.orderings[r]) {
      std::cout << "  order:";
      for (auto k : o->order) std::cout << " " << k + 1;
      std::cout << "\n  processing head: " << o->processing_head() + 1 << "\n  nondeterminacy:";
      for (auto s : o->steps) std::cout << " " << s;
      std::cout << "\n  budget: " << o->budget << "\n";
    } else {
      std::cout << "  order: none (declared order at run time)\n";
    }
    std::cout << "  restrictor:";
    for (const auto& path : p.restrictors[r]) std::cout << " " << format_path(sig, path);
    std::cout << "\n";
  }
  for (const auto& u : p.unreachable) std::cout << "unreachable rule " << u << "\n";
  for (const auto& d : p.diagnostics) std::cout << diag_text(d) << "\n";
  std::cout << p.diagnostics.size() << " diagnostics\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grammar priming and chart processing for typed feature structure grammars"};
  app.require_subcommand(1);
  Flags f;

  auto* compile = app.add_subcommand("compile", "Prime a grammar for one processing direction");
  compile->add_option("grammar", f.grammar, "Grammar file")->required();
  compile->add_option("--mode", f.mode, "generate or parse")->check(CLI::IsMember({"generate", "parse"}));
  compile->add_option("-o,--output", f.output, "Output file (default: standard output)");

  auto* gen = app.add_subcommand("generate", "Generate strings for a logical form");
  gen->add_option("grammar", f.grammar, "Primed (or plain) grammar file")->required();
  gen->add_option("--goal", f.goal, "Goal AVM text");
  gen->add_option("--goal-file", f.goal_file, "File holding the goal AVM");

  auto* par = app.add_subcommand("parse", "Parse a token sequence");
  par->add_option("grammar", f.grammar, "Primed (or plain) grammar file")->required();
  par->add_option("tokens", f.tokens, "Words of the sentence");

  auto* ins = app.add_subcommand("inspect", "Report orders, restrictors and diagnostics of a primed file");
  ins->add_option("grammar", f.grammar, "Primed grammar file")->required();

  for (auto* sub : {compile, gen, par}) {
    sub->add_option("--budget-cap", f.budget_cap, "Largest admissible nondeterminacy (default: lexicon size)");
    sub->add_option("--restrictor-depth", f.restrictor_depth, "Maximal restrictor path length");
    sub->add_option("--summary-depth", f.summary_depth, "Rounds of category summary iteration");
  }
  for (auto* sub : {gen, par}) {
    sub->add_option("--edge-cap", f.edge_cap, "Maximal number of chart edges");
    sub->add_flag("--trace", f.trace, "Print chart events to standard error");
    sub->add_flag("--first", f.first, "Stop at the first result");
    sub->add_flag("--stats-json", f.stats_json, "Print statistics as JSON");
    sub->add_flag("--declared-order", f.declared_order, "Ignore primed orders");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (compile->parsed()) return cmd_compile(f);
    if (gen->parsed()) return cmd_generate(f);
    if (par->parsed()) return cmd_parse(f);
    return cmd_inspect(f);
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
