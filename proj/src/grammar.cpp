#include "tfsprime/grammar.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "grammar_reader.hpp"
#include "tfsprime/avm_io.hpp"

namespace tfsprime {

namespace {

using Tok = AvmLexer::Tok;

const std::set<std::string, std::less<>> kSections = {"types", "features", "rules", "lexicon", "start", "diagnostics"};

bool at_section(const AvmLexer& lx) {
  if (lx.peek().kind != Tok::Ident || !kSections.contains(lx.peek().text)) return false;
  AvmLexer probe = lx;
  probe.next();
  return probe.at(":");
}

bool at_named_item(const AvmLexer& lx) {
  if (lx.peek().kind != Tok::Ident) return false;
  AvmLexer probe = lx;
  probe.next();
  return probe.at(":");
}

std::size_t parse_count(const std::string& text, const std::string& what, int line) {
  try {
    std::size_t used = 0;
    long v = std::stol(text, &used);
    if (used != text.size() || v < 1) throw std::invalid_argument(text);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ParseError(what + " must be a positive integer, got '" + text + "'", line, 1);
  }
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct RawRule {
  std::string name;
  AvmAst mother;
  std::vector<AvmAst> daughters;
  std::optional<std::size_t> head;
  int line;
};

struct RawEntry {
  std::string name;
  AvmAst avm;
  int line;
};

struct RawBind {
  std::string mode, path;
  int line;
};

}  // namespace

namespace detail {

ReadResult read_grammar(std::string_view text, bool allow_extras) {
  AvmLexer lx(text);
  TypeHierarchy::Builder builder;
  std::vector<RawRule> rules;
  std::vector<RawEntry> entries;
  std::optional<AvmAst> start;
  std::vector<RawBind> binds;
  std::vector<std::pair<std::string, int>> index_paths;
  std::vector<std::pair<std::string, int>> partials;
  ReadResult result;
  std::string section;

  while (lx.peek().kind != Tok::End) {
    if (at_section(lx)) {
      section = lx.next().text;
      lx.expect(":");
      if (section == "diagnostics") {
        if (!allow_extras) lx.fail("diagnostics section is only valid in primed grammars");
        while (lx.peek().kind != Tok::End && !at_section(lx)) result.section_lines.push_back(lx.rest_of_line());
      }
      continue;
    }
    const auto& tok = lx.peek();
    if (tok.kind == Tok::Directive) {
      auto d = lx.next();
      std::string args = lx.peek().line == d.line ? lx.rest_of_line() : std::string{};
      if (section == "rules" && d.text == "head") {
        if (rules.empty()) throw ParseError("@head must follow a rule", d.line, d.column);
        rules.back().head = parse_count(args, "@head", d.line) - 1;
      } else if (section == "rules" && d.text == "partial-execute") {
        partials.emplace_back(args, d.line);
      } else if (section == "start" && d.text == "bind") {
        auto w = split_ws(args);
        if (w.size() != 2 || (w[0] != "generate" && w[0] != "parse"))
          throw ParseError("expected '@bind generate|parse path'", d.line, d.column);
        binds.push_back({w[0], w[1], d.line});
      } else if (section == "start" && d.text == "index") {
        index_paths.emplace_back(args, d.line);
      } else if (allow_extras) {
        std::optional<std::size_t> rule;
        if (section == "rules" && !rules.empty()) rule = rules.size() - 1;
        result.extras.push_back({rule, d.text, args, d.line});
      } else {
        throw ParseError("unknown directive @" + d.text, d.line, d.column);
      }
      continue;
    }
    if (section.empty()) lx.fail("expected a section header (types:, features:, rules:, lexicon:, start:)");
    if (section == "types") {
      if (tok.kind != Tok::Ident || tok.text != "sub") lx.fail("expected 'sub parent > child ...'");
      int line = lx.next().line;
      if (lx.peek().kind != Tok::Ident) lx.fail("expected a parent type");
      std::string parent = lx.next().text;
      lx.expect(">");
      std::vector<std::string> children;
      while (lx.peek().kind == Tok::Ident && lx.peek().line == line) children.push_back(lx.next().text);
      if (children.empty()) lx.fail("expected at least one subtype");
      builder.add_subtypes(parent, children);
    } else if (section == "features") {
      if (tok.kind != Tok::Ident || tok.text != "approp") lx.fail("expected 'approp type feature valuetype'");
      lx.next();
      std::string parts[3];
      for (auto& p : parts) {
        if (lx.peek().kind != Tok::Ident) lx.fail("expected 'approp type feature valuetype'");
        p = lx.next().text;
      }
      builder.add_appropriateness(parts[0], parts[1], parts[2]);
    } else if (section == "rules") {
      if (!at_named_item(lx)) lx.fail("expected 'name: mother -> daughters'");
      RawRule r;
      r.line = tok.line;
      r.name = lx.next().text;
      lx.expect(":");
      r.mother = parse_avm(lx);
      if (lx.peek().kind != Tok::Arrow) lx.fail("expected '->'");
      lx.next();
      while (lx.peek().kind != Tok::End && lx.peek().kind != Tok::Directive && !at_named_item(lx) &&
             !at_section(lx))
        r.daughters.push_back(parse_avm(lx));
      if (r.daughters.empty()) throw ParseError("rule " + r.name + " has no daughters", r.line, 1);
      rules.push_back(std::move(r));
    } else if (section == "lexicon") {
      if (!at_named_item(lx)) lx.fail("expected 'name: feature structure'");
      RawEntry e;
      e.line = tok.line;
      e.name = lx.next().text;
      lx.expect(":");
      e.avm = parse_avm(lx);
      entries.push_back(std::move(e));
    } else if (section == "start") {
      if (start) lx.fail("start section holds a single feature structure");
      start = parse_avm(lx);
    } else {
      lx.fail("unexpected text");
    }
  }

  if (rules.empty()) throw GrammarError("grammar has no rules");
  if (!start) throw GrammarError("grammar has no start category");

  std::set<std::string> words;
  for (const auto& r : rules) {
    collect_words(r.mother, words);
    for (const auto& d : r.daughters) collect_words(d, words);
  }
  for (const auto& e : entries) collect_words(e.avm, words);
  collect_words(*start, words);
  for (const auto& w : words) builder.intern_string(w);

  Grammar& g = result.grammar;
  g.sig = builder.finish();
  std::set<std::string> names;
  for (const auto& r : rules) {
    if (!names.insert(r.name).second) throw ParseError("duplicate rule name " + r.name, r.line, 1);
    std::vector<const AvmAst*> roots{&r.mother};
    for (const auto& d : r.daughters) roots.push_back(&d);
    Rule rule{r.name, build_structure(g.sig, roots, "rule " + r.name), r.head};
    if (rule.head && *rule.head >= rule.arity())
      throw ParseError("@head of rule " + r.name + " is out of range", r.line, 1);
    for (std::size_t i = 1; i < rule.body.root_count(); ++i)
      if (rule.body.root(i) == rule.body.root(0))
        throw ParseError("rule " + r.name + ": mother and daughter " + std::to_string(i) + " are the same node", r.line, 1);
    g.rules.push_back(std::move(rule));
  }
  auto phon = g.sig->find_feature(kPhonFeature);
  for (const auto& e : entries) {
    LexicalEntry entry{e.name, build_structure(g.sig, {&e.avm}, "lexical entry " + e.name), {}};
    std::optional<NodeId> pn;
    if (phon) pn = entry.fs.node(entry.fs.root()).arc(*phon);
    if (!pn || !g.sig->is_string(entry.fs.node(*pn).type) || !entry.fs.node(*pn).arcs.empty())
      throw ParseError("lexical entry " + e.name + " needs an atomic phon value", e.line, 1);
    const auto& quoted = g.sig->name(entry.fs.node(*pn).type);
    entry.word = quoted.substr(1, quoted.size() - 2);
    g.lexicon.push_back(std::move(entry));
  }
  g.start = build_structure(g.sig, {&*start}, "start category");

  auto checked_path = [&](const std::string& text, int line) {
    try {
      return parse_path(*g.sig, text);
    } catch (const PathError& err) {
      throw ParseError(err.what(), line, 1);
    }
  };
  for (const auto& b : binds) (b.mode == "generate" ? g.generation_bound : g.parsing_bound).push_back(checked_path(b.path, b.line));
  if (g.generation_bound.empty())
    if (auto cont = g.sig->find_feature("cont")) g.generation_bound.push_back({*cont});
  if (g.parsing_bound.empty() && phon) g.parsing_bound.push_back({*phon});
  for (const auto& p : g.generation_bound)
    if (!g.start.resolve(p))
      throw GrammarError("start category has no path " + format_path(*g.sig, p) + " to bind for generation");
  for (const auto& [p, line] : index_paths) g.index_paths.push_back(checked_path(p, line));
  if (index_paths.empty()) {
    if (phon) g.index_paths.push_back({*phon});
    auto cont = g.sig->find_feature("cont");
    auto nucleus = g.sig->find_feature("nucleus");
    if (cont && nucleus) g.index_paths.push_back({*cont, *nucleus});
  }
  for (const auto& [args, line] : partials) {
    PartialExecution pe;
    bool have_rule = false, have_pos = false;
    for (const auto& w : split_ws(args)) {
      if (w.starts_with("rule=")) {
        pe.rule = w.substr(5);
        have_rule = true;
      } else if (w.starts_with("pos=")) {
        pe.position = parse_count(w.substr(4), "pos", line) - 1;
        have_pos = true;
      } else {
        throw ParseError("unexpected argument '" + w + "' to @partial-execute", line, 1);
      }
    }
    if (!have_rule || !have_pos) throw ParseError("@partial-execute needs rule= and pos=", line, 1);
    const Rule* r = g.find_rule(pe.rule);
    if (!r) throw ParseError("@partial-execute names unknown rule " + pe.rule, line, 1);
    if (pe.position >= r->arity()) throw ParseError("@partial-execute position out of range for rule " + pe.rule, line, 1);
    g.directives.push_back(pe);
  }
  return result;
}

}  // namespace detail

const Rule* Grammar::find_rule(std::string_view name) const {
  for (const auto& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

std::optional<std::size_t> Grammar::rule_index(std::string_view name) const {
  for (std::size_t i = 0; i < rules.size(); ++i)
    if (rules[i].name == name) return i;
  return std::nullopt;
}

Grammar load_grammar(std::string_view text) { return detail::read_grammar(text, false).grammar; }

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GrammarError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Grammar load_grammar_file(const std::filesystem::path& path) { return load_grammar(read_text_file(path)); }

std::string print_rule(const Rule& r) {
  auto parts = write_avm_roots(r.body);
  std::string out = r.name + ": " + parts[0] + " ->";
  for (std::size_t i = 1; i < parts.size(); ++i) out += " " + parts[i];
  out += "\n";
  if (r.head) out += "@head " + std::to_string(*r.head + 1) + "\n";
  return out;
}

std::string print_grammar(const Grammar& g, bool with_directives) {
  const auto& sig = *g.sig;
  std::string out = "types:\n";
  for (const auto& [parent, children] : sig.declared_subtypes()) {
    out += "sub " + parent + " >";
    for (const auto& c : children) out += " " + c;
    out += "\n";
  }
  out += "features:\n";
  for (const auto& a : sig.declared_appropriateness()) out += "approp " + a.type + " " + a.feature + " " + a.value + "\n";
  out += "rules:\n";
  for (const auto& r : g.rules) out += print_rule(r);
  if (with_directives)
    for (const auto& d : g.directives)
      out += "@partial-execute rule=" + d.rule + " pos=" + std::to_string(d.position + 1) + "\n";
  out += "lexicon:\n";
  for (const auto& e : g.lexicon) out += e.name + ": " + write_avm(e.fs) + "\n";
  out += "start:\n" + write_avm(g.start) + "\n";
  for (const auto& p : g.generation_bound) out += "@bind generate " + format_path(sig, p) + "\n";
  for (const auto& p : g.parsing_bound) out += "@bind parse " + format_path(sig, p) + "\n";
  for (const auto& p : g.index_paths) out += "@index " + format_path(sig, p) + "\n";
  return out;
}

std::vector<DefiningMember> defining_set(const FeatureStructure& category, const Grammar& g) {
  std::vector<DefiningMember> out;
  for (std::size_t i = 0; i < g.lexicon.size(); ++i)
    if (unify(category, g.lexicon[i].fs)) out.push_back({DefiningMember::Kind::Entry, i});
  for (std::size_t i = 0; i < g.rules.size(); ++i)
    if (unify(category, g.rules[i].mother())) out.push_back({DefiningMember::Kind::Rule, i});
  return out;
}

}  // namespace tfsprime
