#include <algorithm>
#include <sstream>

#include "grammar_reader.hpp"
#include "tfsprime/avm_io.hpp"
#include "tfsprime/priming.hpp"

namespace tfsprime {

namespace {

std::string join_numbers(const std::vector<std::size_t>& xs, std::size_t offset) {
  std::string out;
  for (std::size_t x : xs) out += (out.empty() ? "" : " ") + std::to_string(x + offset);
  return out;
}

std::vector<std::size_t> read_numbers(const std::string& text, std::size_t offset, int line) {
  std::istringstream in(text);
  std::vector<std::size_t> out;
  std::string w;
  while (in >> w) {
    std::size_t v = 0;
    try {
      v = std::stoul(w);
    } catch (const std::exception&) {
      throw ParseError("expected a number, found '" + w + "'", line, 1);
    }
    if (v < offset) throw ParseError("position must be at least " + std::to_string(offset), line, 1);
    out.push_back(v - offset);
  }
  return out;
}

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::string diagnostic_line(const Diagnostic& d) {
  std::string out = "DIAG " + kind_name(d.kind) + " " + d.rule;
  if (!d.related.empty()) out += " (" + d.related + ")";
  return out + " " + d.explanation + " -- remedy: " + d.remedy;
}

Diagnostic read_diagnostic(const std::string& raw) {
  std::string line = trim(raw);
  std::istringstream in(line);
  std::string tag, kind, rule;
  in >> tag >> kind >> rule;
  if (tag != "DIAG" || rule.empty()) throw GrammarError("malformed diagnostic line: " + line);
  Diagnostic d;
  d.kind = parse_kind(kind);
  d.rule = rule;
  std::string rest;
  std::getline(in, rest);
  rest = trim(rest);
  if (!rest.empty() && rest.front() == '(') {
    auto close = rest.find(')');
    if (close == std::string::npos) throw GrammarError("malformed diagnostic line: " + line);
    d.related = rest.substr(1, close - 1);
    rest = trim(rest.substr(close + 1));
  }
  const std::string marker = " -- remedy: ";
  auto at = rest.find(marker);
  if (at == std::string::npos) {
    d.explanation = rest;
  } else {
    d.explanation = rest.substr(0, at);
    d.remedy = trim(rest.substr(at + marker.size()));
  }
  return d;
}

}  // namespace

std::string serialize_primed(const PrimedGrammar& p) {
  const auto& sig = *p.grammar.sig;
  std::string out = "@mode " + mode_name(p.mode) + "\n";
  out += "@budget-cap " + std::to_string(p.budget_cap) + "\n";
  out += "@restrictor-depth " + std::to_string(p.restrictor_depth) + "\n";
  for (const auto& u : p.unreachable) out += "@unreachable " + u + "\n";

  // Rule annotations are spliced in after each printed rule.
  std::string plain = print_grammar(p.grammar, false);
  auto rules_at = plain.find("rules:\n");
  auto lexicon_at = plain.find("lexicon:\n");
  out += plain.substr(0, rules_at) + "rules:\n";
  for (std::size_t r = 0; r < p.grammar.rules.size(); ++r) {
    out += print_rule(p.grammar.rules[r]);
    if (const auto& o = p.orderings[r]) {
      out += "@order " + join_numbers(o->order, 1) + "\n";
      out += "@steps " + join_numbers(o->steps, 0) + "\n";
      out += "@phead " + std::to_string(o->processing_head() + 1) + "\n";
      out += "@budget " + std::to_string(o->budget) + "\n";
    }
    std::string paths;
    for (const auto& path : p.restrictors[r]) paths += (paths.empty() ? "" : ",") + format_path(sig, path);
    out += "@restrict " + paths + "\n";
  }
  out += plain.substr(lexicon_at);
  out += "diagnostics:\n";
  for (const auto& d : p.diagnostics) out += diagnostic_line(d) + "\n";
  return out;
}

PrimedGrammar load_primed(std::string_view text) {
  auto read = detail::read_grammar(text, true);
  PrimedGrammar p;
  p.grammar = std::move(read.grammar);
  const auto& sig = *p.grammar.sig;
  const std::size_t n = p.grammar.rules.size();
  p.orderings.assign(n, std::nullopt);
  p.restrictors.assign(n, {});
  bool have_mode = false;
  for (const auto& x : read.extras) {
    if (!x.rule) {
      if (x.name == "mode") {
        p.mode = parse_mode(trim(x.args));
        have_mode = true;
      } else if (x.name == "budget-cap") {
        auto v = read_numbers(x.args, 0, x.line);
        if (v.size() != 1) throw ParseError("@budget-cap takes one number", x.line, 1);
        p.budget_cap = v[0];
      } else if (x.name == "restrictor-depth") {
        auto v = read_numbers(x.args, 0, x.line);
        if (v.size() != 1) throw ParseError("@restrictor-depth takes one number", x.line, 1);
        p.restrictor_depth = v[0];
      } else if (x.name == "unreachable") {
        p.unreachable.push_back(trim(x.args));
      } else {
        throw ParseError("unknown directive @" + x.name, x.line, 1);
      }
      continue;
    }
    const std::size_t r = *x.rule;
    auto& o = p.orderings[r];
    auto ensure = [&]() -> OrderingResult& {
      if (!o) o.emplace();
      return *o;
    };
    if (x.name == "order") {
      ensure().order = read_numbers(x.args, 1, x.line);
    } else if (x.name == "steps") {
      ensure().steps = read_numbers(x.args, 0, x.line);
    } else if (x.name == "budget") {
      auto v = read_numbers(x.args, 0, x.line);
      if (v.size() != 1) throw ParseError("@budget takes one number", x.line, 1);
      ensure().budget = v[0];
    } else if (x.name == "phead") {
      auto v = read_numbers(x.args, 1, x.line);
      if (v.size() != 1) throw ParseError("@phead takes one position", x.line, 1);
    } else if (x.name == "restrict") {
      std::istringstream in(x.args);
      std::string item;
      while (std::getline(in, item, ','))
        if (!trim(item).empty()) p.restrictors[r].push_back(parse_path(sig, trim(item)));
    } else {
      throw ParseError("unknown rule annotation @" + x.name, x.line, 1);
    }
  }
  if (!have_mode) throw GrammarError("primed grammar lacks an @mode line");
  for (std::size_t r = 0; r < n; ++r) {
    const auto& o = p.orderings[r];
    if (!o) continue;
    const std::string& name = p.grammar.rules[r].name;
    std::vector<std::size_t> sorted = o->order;
    std::sort(sorted.begin(), sorted.end());
    bool permutation = sorted.size() == p.grammar.rules[r].arity();
    for (std::size_t i = 0; permutation && i < sorted.size(); ++i) permutation = sorted[i] == i;
    if (!permutation) throw GrammarError("@order of rule " + name + " is not a permutation of its daughters");
    if (o->steps.size() != o->order.size())
      throw GrammarError("@steps of rule " + name + " does not match its @order");
  }
  for (const auto& line : read.section_lines)
    if (!trim(line).empty()) p.diagnostics.push_back(read_diagnostic(line));
  return p;
}

PrimedGrammar load_primed_file(const std::filesystem::path& path) { return load_primed(read_text_file(path)); }

}  // namespace tfsprime
