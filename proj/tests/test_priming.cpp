#include <doctest.h>

#include "support.hpp"
#include "tfsprime/avm_io.hpp"

using namespace tfsprime;
using namespace tfsprime::testing;

namespace {

const OrderingResult& ordering(const PrimedGrammar& p, const std::string& rule) {
  auto r = p.grammar.rule_index(rule);
  REQUIRE(r.has_value());
  REQUIRE(p.orderings[*r].has_value());
  return *p.orderings[*r];
}

}  // namespace

TEST_CASE("summaries subsume every derivable mother") {
  for (const char* file : {"argcomp.gram", "headrec.gram", "topicalization.gram"}) {
    CAPTURE(file);
    Grammar g = fixture(file);
    auto summaries = recurse_summaries(g);
    REQUIRE(summaries.size() == g.rules.size());
    auto items = enumerate_derivations(g, 3);
    for (const auto& d : items) {
      if (!d.phrasal) continue;
      bool covered = false;
      for (const auto& s : summaries) covered = covered || subsumes(s, d.fs);
      CHECK(covered);
    }
  }
}

TEST_CASE("summaries narrow rule mothers") {
  Grammar g = fixture("headrec.gram");
  auto summaries = recurse_summaries(g);
  auto vp = summaries[*g.rule_index("vp-adv")];
  auto nucleus = vp.resolve(parse_path(*g.sig, "cont|nucleus"));
  REQUIRE(nucleus);
  CHECK(g.sig->name(vp.node(*nucleus).type) == "adv-rel");
  // Without iteration the bare mother is kept.
  auto bare = recurse_summaries(g, 0);
  CHECK(isomorphic(bare[0], strip_bindings(g.rules[0].mother())));
}

TEST_CASE("seeding marks the start category's bound paths") {
  Grammar g = fixture("argcomp.gram");
  const Rule& r = *g.find_rule("argcomp");
  auto seeded = seed_bindings(r, g.start, g.generation_bound);
  REQUIRE(seeded);
  CHECK(is_bound(*seeded, parse_path(*g.sig, "cont")));
  // The aux shares the mother's content, so its content is bound too.
  CHECK(bound_frontier(seeded->extract(1)).size() >= 1);
  CHECK_FALSE(seed_bindings(*fixture("headrec.gram").find_rule("vp-adv"), g.start, g.generation_bound));
}

TEST_CASE("nondeterminacy counts the defining members one instantiation can leave") {
  Grammar g = fixture("argcomp.gram");
  DataflowAnalyzer a(g, Mode::Generation);
  auto bare_noun = read_avm(g.sig, "[cat n]");
  CHECK(a.nondeterminacy(bare_noun) == 4);
  auto bound_noun = read_avm(g.sig, "[cat n, cont ent!]");
  CHECK(a.nondeterminacy(bound_noun) == 1);
  CHECK(a.nondeterminacy(read_avm(g.sig, "[cat n, case acc, cont marie]")) == 1);
  CHECK(a.nondeterminacy(read_avm(g.sig, "[cat v, cont [prop!, nucleus trans-rel]]")) <= 2);
  CHECK(nondeterminacy(bare_noun, g) == 4);
  DataflowAnalyzer parsing(g, Mode::Parsing);
  CHECK(parsing.nondeterminacy(bare_noun) == 1);
}

TEST_CASE("nondeterminacy matches the subset oracle on fixture categories") {
  for (const char* file : {"argcomp.gram", "argcomp_variant.gram", "headrec.gram", "topicalization_pe.gram"}) {
    for (Mode mode : {Mode::Generation, Mode::Parsing}) {
      CAPTURE(file);
      Grammar g = apply_partial_execution(fixture(file));
      DataflowAnalyzer a(g, mode);
      for (const auto& rule : g.rules) {
        auto seeded = seed_bindings(rule, g.start, mode == Mode::Generation ? g.generation_bound : g.parsing_bound);
        const FeatureStructure& body = seeded ? *seeded : rule.body;
        for (std::size_t k = 0; k < rule.arity(); ++k) {
          auto cat = body.extract(k + 1);
          if (auto want = nondeterminacy_oracle(cat, g, a.summaries(), mode)) CHECK(a.nondeterminacy(cat) == *want);
        }
      }
    }
  }
}

TEST_CASE("mimicking evaluation adds what all defining members share") {
  Grammar g = fixture("argcomp.gram");
  const Rule& r = *g.find_rule("argcomp");
  DataflowAnalyzer a(g, Mode::Generation);
  auto seeded = *seed_bindings(r, g.start, g.generation_bound);
  auto after = mimic_evaluation(seeded, 0, a);
  REQUIRE(after);
  CHECK(subsumes(seeded, *after));
  // After the auxiliary, the verbal complement's content is known.
  CHECK(a.nondeterminacy(after->extract(4)) < a.nondeterminacy(seeded.extract(4)) + 1);
  CHECK(is_bound(*after, parse_path(*g.sig, "cont")));
}

TEST_CASE("orders chosen for each fixture") {
  auto gen = [](const char* file) { return prime_grammar(fixture(file), Mode::Generation); };
  CHECK(ordering(gen("argcomp.gram"), "argcomp").order == std::vector<std::size_t>{0, 3, 1, 2});
  CHECK(ordering(gen("argcomp.gram"), "argcomp").processing_head() == 0);
  CHECK(ordering(gen("argcomp_variant.gram"), "argcomp").order == std::vector<std::size_t>{3, 0, 1, 2});
  CHECK(ordering(gen("argcomp_variant.gram"), "argcomp").processing_head() == 3);
  CHECK(ordering(gen("headrec.gram"), "s").order == std::vector<std::size_t>{1, 0});
  CHECK(ordering(gen("headrec.gram"), "vp-adv").order == std::vector<std::size_t>{1, 0});
  auto pe = gen("topicalization_pe.gram");
  CHECK(ordering(pe, "filler-head+head-comp-inv").order == std::vector<std::size_t>{1, 0, 2});
  CHECK(pe.unreachable == std::vector<std::string>{"head-comp-inv"});
  CHECK(pe.diagnostics.empty());
  for (const auto& o : pe.orderings)
    if (o) CHECK(std::all_of(o->steps.begin(), o->steps.end(), [&](std::size_t s) { return s >= 1 && s <= o->budget; }));
}

TEST_CASE("find_order respects the budget") {
  Grammar g = fixture("headrec.gram");
  DataflowAnalyzer a(g, Mode::Generation);
  const Rule& s = *g.find_rule("s");
  auto seeded = *seed_bindings(s, g.start, g.generation_bound);
  CHECK_FALSE(find_order(s, seeded, 1, a));
  auto two = find_order(s, seeded, 2, a);
  REQUIRE(two);
  CHECK(two->budget == 2);
  CHECK(two->order.size() == 2);
}

TEST_CASE("diagnostics for rules that cannot be ordered") {
  auto schematic = prime_grammar(fixture("schematic.gram"), Mode::Generation);
  REQUIRE(schematic.diagnostics.size() == 1);
  CHECK(schematic.diagnostics[0].kind == Diagnostic::Kind::AllOrdersRejected);
  CHECK(schematic.diagnostics[0].remedy.find("split") != std::string::npos);

  auto topic = prime_grammar(fixture("topicalization.gram"), Mode::Generation);
  REQUIRE_FALSE(topic.diagnostics.empty());
  const auto& d = topic.diagnostics[0];
  CHECK(d.kind == Diagnostic::Kind::DisplacementSuspected);
  CHECK(d.rule == "filler-head");
  CHECK(d.related == "head-comp-inv");
  CHECK(d.remedy == "@partial-execute rule=filler-head pos=2");

  PrimingOptions tight;
  tight.budget_cap = 1;
  auto capped = prime_grammar(fixture("headrec.gram"), Mode::Generation, tight);
  REQUIRE_FALSE(capped.diagnostics.empty());
  CHECK(capped.diagnostics[0].kind == Diagnostic::Kind::BudgetCapReached);
}

TEST_CASE("partial execution splices the inner rule") {
  Grammar g = fixture("topicalization.gram");
  Rule spliced = partial_execute(*g.find_rule("filler-head"), 1, *g.find_rule("head-comp-inv"));
  CHECK(spliced.name == "filler-head+head-comp-inv");
  CHECK(spliced.arity() == 3);
  CHECK(spliced.head == 1u);
  CHECK_THROWS_WITH_AS(partial_execute(*g.find_rule("filler-head"), 0, *g.find_rule("head-comp-inv")),
                       doctest::Contains("head-comp-inv"), GrammarError);

  Grammar applied = apply_partial_execution(fixture("topicalization_pe.gram"));
  CHECK(applied.directives.empty());
  CHECK(applied.find_rule("filler-head") == nullptr);
  CHECK(applied.find_rule("filler-head+head-comp-inv") != nullptr);
  CHECK(applied.find_rule("head-comp-inv") != nullptr);
}

TEST_CASE("partial execution preserves the sentences") {
  Grammar before = fixture("topicalization.gram");
  Grammar after = apply_partial_execution(fixture("topicalization_pe.gram"));
  auto a = enumerated_readings(before, enumerate_derivations(before, 4), std::nullopt);
  auto b = enumerated_readings(after, enumerate_derivations(after, 4), std::nullopt);
  CHECK(a.size() == 4);
  CHECK(a == b);
}

TEST_CASE("primed grammars serialize and load back") {
  for (const char* file : {"argcomp.gram", "schematic.gram", "topicalization.gram", "topicalization_pe.gram"}) {
    for (Mode mode : {Mode::Generation, Mode::Parsing}) {
      CAPTURE(file);
      PrimedGrammar p = prime_grammar(fixture(file), mode);
      std::string text = serialize_primed(p);
      PrimedGrammar q = load_primed(text);
      CHECK(q.mode == p.mode);
      CHECK(q.orderings == p.orderings);
      CHECK(q.restrictors == p.restrictors);
      CHECK(q.unreachable == p.unreachable);
      CHECK(q.budget_cap == p.budget_cap);
      REQUIRE(q.diagnostics.size() == p.diagnostics.size());
      for (std::size_t i = 0; i < p.diagnostics.size(); ++i) {
        CHECK(q.diagnostics[i].kind == p.diagnostics[i].kind);
        CHECK(q.diagnostics[i].rule == p.diagnostics[i].rule);
        CHECK(q.diagnostics[i].related == p.diagnostics[i].related);
        CHECK(q.diagnostics[i].explanation == p.diagnostics[i].explanation);
        CHECK(q.diagnostics[i].remedy == p.diagnostics[i].remedy);
      }
      CHECK(serialize_primed(q) == text);
      CHECK(serialize_primed(prime_grammar(fixture(file), mode)) == text);
    }
  }
}

TEST_CASE("malformed primed files are rejected") {
  std::string text = serialize_primed(prime_grammar(fixture("argcomp.gram"), Mode::Generation));
  auto broken = text;
  broken.replace(broken.find("@order 1 4 2 3"), 14, "@order 1 1 2 3");
  CHECK_THROWS_WITH_AS(load_primed(broken), doctest::Contains("permutation"), GrammarError);
  auto modeless = text.substr(text.find('\n') + 1);
  CHECK_THROWS_WITH_AS(load_primed(modeless), doctest::Contains("@mode"), GrammarError);
}

TEST_CASE("restrictors stay within the depth limit") {
  PrimingOptions shallow;
  shallow.restrictor_depth = 2;
  PrimedGrammar p = prime_grammar(fixture("argcomp.gram"), Mode::Generation, shallow);
  for (const auto& paths : p.restrictors) {
    CHECK_FALSE(paths.empty());
    for (const auto& path : paths) CHECK(path.size() <= 2);
  }
  CHECK_FALSE(p.restrictor().empty());
}
