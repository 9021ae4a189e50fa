#include <doctest.h>

#include <map>
#include <sstream>

#include "support.hpp"
#include "tfsprime/avm_io.hpp"

using namespace tfsprime;
using namespace tfsprime::testing;

namespace {

std::set<std::string> texts(const std::vector<Result>& results) {
  std::set<std::string> out;
  for (const auto& r : results) out.insert(r.text);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

TEST_CASE("tokenizer lowercases and drops punctuation") {
  CHECK(tokenize("Hat Karl Marie geküßt?") == std::vector<std::string>{"hat", "karl", "marie", "geküßt"});
  CHECK(tokenize("  anna,  lieben! ") == std::vector<std::string>{"anna", "lieben"});
  CHECK(tokenize("").empty());
}

TEST_CASE("generation finds the pinned strings of every fixture goal") {
  for (const auto& target : fixture_goals()) {
    CAPTURE(target.avm);
    PrimedGrammar p = prime_grammar(fixture(target.grammar), Mode::Generation);
    auto results = generate(p, read_avm(p.grammar.sig, target.avm));
    CHECK_FALSE(results.empty());
    if (!target.expected.empty())
      CHECK(texts(results) == std::set<std::string>(target.expected.begin(), target.expected.end()));
    for (const auto& r : results) CHECK(r.words == split(r.text));
  }
}

TEST_CASE("generation without inversion yields the verb-second variants") {
  PrimedGrammar p = prime_grammar(fixture("argcomp.gram"), Mode::Generation);
  auto goal = read_avm(p.grammar.sig, "[cont [nucleus [perf-rel, arg [nucleus [kiss-rel, actor karl, undergoer marie]]]]]");
  CHECK(texts(generate(p, goal)) ==
        std::set<std::string>{"hat karl marie geküßt", "karl hat marie geküßt", "marie hat karl geküßt"});
}

TEST_CASE("primed and declared order agree on results") {
  for (const auto& target : fixture_goals()) {
    if (target.grammar == "headrec.gram") continue;
    CAPTURE(target.avm);
    PrimedGrammar p = prime_grammar(fixture(target.grammar), Mode::Generation);
    auto goal = read_avm(p.grammar.sig, target.avm);
    EngineOptions declared;
    declared.declared_order = true;
    CHECK(readings(generate(p, goal)) == readings(generate(p, goal, declared)));
    EngineOptions tabling;
    tabling.subsumption_tabling = true;
    CHECK(readings(generate(p, goal)) == readings(generate(p, goal, tabling)));
  }
}

TEST_CASE("generation matches the enumerator on head recursion") {
  Grammar g = fixture("headrec.gram");
  PrimedGrammar p = prime_grammar(g, Mode::Generation);
  auto items = enumerate_derivations(g, 5);
  for (const char* goal_text : {"[cont [nucleus [sleep-rel]]]", "[cont [nucleus [today-rel, arg [nucleus laugh-rel]]]]",
                                "[cont [nucleus [often-rel, arg [nucleus [often-rel, arg [nucleus [sleep-rel, actor anna]]]]]]]"}) {
    CAPTURE(goal_text);
    auto goal = read_avm(g.sig, goal_text);
    CHECK(readings(generate(p, goal)) == enumerated_readings(g, items, goal));
  }
}

TEST_CASE("parsing matches the enumerator on every enumerated sentence") {
  for (const char* file : {"argcomp.gram", "topicalization_pe.gram", "headrec.gram"}) {
    CAPTURE(file);
    Grammar g = apply_partial_execution(fixture(file));
    PrimedGrammar p = prime_grammar(g, Mode::Parsing);
    auto items = enumerate_derivations(g, 3);
    std::map<std::string, std::set<Reading>> by_text;
    for (const auto& r : enumerated_readings(g, items, std::nullopt)) by_text[r.first].insert(r);
    REQUIRE_FALSE(by_text.empty());
    for (const auto& [text, want] : by_text) {
      CAPTURE(text);
      if (split(text).size() > 4) continue;
      CHECK(readings(parse(p, split(text))) == want);
    }
  }
}

TEST_CASE("parsing rejects ungrammatical orders and reports unknown words") {
  PrimedGrammar p = prime_grammar(fixture("argcomp.gram"), Mode::Parsing);
  CHECK(parse(p, tokenize("Hat Karl Marie geküßt?")).size() == 1);
  CHECK(parse(p, tokenize("marie hat karl geküßt")).size() == 2);
  CHECK(parse(p, tokenize("karl hat geküßt marie")).empty());
  CHECK_THROWS_WITH_AS(parse(p, tokenize("hat karl maria geküßt")), doctest::Contains("maria"), GrammarError);
  PrimedGrammar gen = prime_grammar(fixture("argcomp.gram"), Mode::Generation);
  CHECK_THROWS_AS(parse(gen, tokenize("hat karl marie geküßt")), GrammarError);
  CHECK_THROWS_AS(generate(p, read_avm(p.grammar.sig, kQuestionGoal)), GrammarError);
}

TEST_CASE("edge cap stops runaway charts") {
  PrimedGrammar p = prime_grammar(fixture("headrec.gram"), Mode::Generation);
  auto goal = read_avm(p.grammar.sig, "[cont [nucleus [often-rel, arg [nucleus [sleep-rel]]]]]");
  EngineOptions tiny;
  tiny.edge_cap = 3;
  CHECK_THROWS_AS(generate(p, goal, tiny), ResourceError);
  EngineOptions declared;
  declared.declared_order = true;
  declared.edge_cap = 2000;
  CHECK_THROWS_AS(generate(p, goal, declared), ResourceError);
}

TEST_CASE("first-only stops after one result") {
  PrimedGrammar p = prime_grammar(fixture("argcomp.gram"), Mode::Generation);
  auto goal = read_avm(p.grammar.sig, "[cont [nucleus [perf-rel, arg [nucleus kiss-rel]]]]");
  EngineOptions first;
  first.first_only = true;
  CHECK(generate(p, goal).size() > 1);
  CHECK(generate(p, goal, first).size() == 1);
}

TEST_CASE("chart invariants and statistics") {
  PrimedGrammar p = prime_grammar(fixture("argcomp.gram"), Mode::Parsing);
  EngineOptions opts;
  opts.verify_index = true;
  std::ostringstream trace;
  opts.trace = &trace;
  Chart chart(p, opts);
  auto results = chart.parse(tokenize("marie hat karl geküßt"));
  const auto& s = chart.stats();
  CHECK(results.size() == 2);
  CHECK(s.results == 2);
  CHECK(s.edges == chart.edges().size());
  CHECK(s.active_edges + s.passive_edges == s.edges);
  CHECK(s.index_verified);
  CHECK(s.index_complete);
  CHECK(s.prediction_hits > 0);
  CHECK(s.completions_succeeded <= s.completions_attempted);
  for (const auto& e : chart.edges()) {
    CHECK(e.dot <= p.grammar.rules[e.rule].arity());
    CHECK(e.passive == (e.dot == p.grammar.rules[e.rule].arity()));
    if (e.passive) CHECK_FALSE(e.forward.has_value());
    else CHECK(e.forward.has_value());
  }
  CHECK(chart.evaluation_order(0) == p.orderings[0]->order);
  std::istringstream lines(trace.str());
  std::size_t n = 0;
  for (std::string line; std::getline(lines, line); ++n) CHECK(line.rfind("EVENT ", 0) == 0);
  CHECK(n >= s.edges);
}
