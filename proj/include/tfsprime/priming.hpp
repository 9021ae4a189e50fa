#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfsprime/grammar.hpp"

namespace tfsprime {

enum class Mode { Generation, Parsing };

std::string mode_name(Mode m);
Mode parse_mode(std::string_view text);  // "generate" / "parse"; throws GrammarError

/// Evaluation order chosen for one rule.  Positions are 0-based daughter
/// indices; steps[i] is the nondeterminacy of order[i] when it is evaluated.
struct OrderingResult {
  std::vector<std::size_t> order;
  std::vector<std::size_t> steps;
  std::size_t budget = 0;

  std::size_t processing_head() const { return order.front(); }
  bool operator==(const OrderingResult&) const = default;
};

struct Diagnostic {
  enum class Kind { AllOrdersRejected, DisplacementSuspected, BudgetCapReached };
  Kind kind;
  std::string rule;
  std::string related;  // the other rule involved, if any
  std::string explanation;
  std::string remedy;
};

std::string kind_name(Diagnostic::Kind k);
Diagnostic::Kind parse_kind(std::string_view text);

struct PrimingOptions {
  std::optional<std::size_t> budget_cap;  // defaults to the lexicon size
  std::size_t restrictor_depth = 4;
  std::size_t summary_depth = 8;
};

/// A grammar together with the evaluation order of every rule.
///
/// Rules that no derivation from the start category can reach are removed
/// and listed in `unreachable`.  A rule without an ordering carries a
/// diagnostic and is evaluated in declared order.
struct PrimedGrammar {
  Grammar grammar;
  Mode mode = Mode::Generation;
  std::vector<std::optional<OrderingResult>> orderings;  // parallel to grammar.rules
  std::vector<std::vector<Path>> restrictors;            // parallel to grammar.rules
  std::vector<Diagnostic> diagnostics;
  std::vector<std::string> unreachable;
  std::size_t budget_cap = 0;
  std::size_t restrictor_depth = 4;

  /// Union of all rule restrictors; what the engine restricts predictions with.
  std::vector<Path> restrictor() const;
};

/// Compile-time model of evaluation: category summaries, nondeterminacy
/// counts and simulated evaluation of rule daughters.
class DataflowAnalyzer {
 public:
  DataflowAnalyzer(const Grammar& g, Mode mode, std::size_t summary_depth = 8);

  const Grammar& grammar() const { return *g_; }
  Mode mode() const { return mode_; }
  /// Per rule, a structure subsuming every mother the rule can derive.
  const std::vector<FeatureStructure>& summaries() const { return summaries_; }

  std::vector<DefiningMember> defining(const FeatureStructure& category) const;
  /// Largest set of defining members that a single run-time instantiation of
  /// the category's bound paths can leave compatible.
  std::size_t nondeterminacy(const FeatureStructure& category) const;
  /// Unifies the generalization of the category's defining members into the
  /// body at daughter `position`.  Empty if nothing defines the category.
  std::optional<FeatureStructure> mimic(const FeatureStructure& body, std::size_t position) const;
  /// Depth-first search for an admissible evaluation order under `budget`.
  std::optional<OrderingResult> find_order(const FeatureStructure& body, std::optional<std::size_t> head,
                                           std::size_t budget) const;
  /// The annotated body just before each step of `order`, and after the last.
  std::vector<FeatureStructure> replay(const FeatureStructure& body, const std::vector<std::size_t>& order) const;

 private:
  FeatureStructure member_structure(const DefiningMember& m) const;
  std::vector<FeatureStructure> instantiations(const FeatureStructure& category,
                                               const std::vector<DefiningMember>& members) const;

  const Grammar* g_;
  Mode mode_;
  std::vector<FeatureStructure> summaries_;
  std::vector<FeatureStructure> lexical_;  // entries with type-implied flags set
  mutable std::map<std::string, std::size_t> nondet_cache_;
};

/// Category summaries iterated to a fixpoint; rules that do not settle
/// within `depth` rounds keep their bare mother.
std::vector<FeatureStructure> recurse_summaries(const Grammar& g, std::size_t depth = 8);

/// The rule body unified with the start category whose bound paths are
/// marked; empty if the mother does not unify with the start category.
std::optional<FeatureStructure> seed_bindings(const Rule& rule, const FeatureStructure& start,
                                              const std::vector<Path>& bound_paths);

std::size_t nondeterminacy(const FeatureStructure& category, const Grammar& g, Mode mode = Mode::Generation);
std::optional<FeatureStructure> mimic_evaluation(const FeatureStructure& body, std::size_t position,
                                                 const DataflowAnalyzer& analyzer);
std::optional<OrderingResult> find_order(const Rule& rule, const FeatureStructure& body, std::size_t budget,
                                         const DataflowAnalyzer& analyzer);

/// Splices `inner`'s daughters into `outer` at `position`.  Throws
/// GrammarError naming both rules if inner's mother does not unify there.
Rule partial_execute(const Rule& outer, std::size_t position, const Rule& inner);
/// Applies every directive of the grammar; the result has none left.
Grammar apply_partial_execution(const Grammar& g);

PrimedGrammar prime_grammar(const Grammar& g, Mode mode, const PrimingOptions& options = {});

/// Serialized form: the grammar text plus @order/@steps/@phead/@restrict/
/// @budget lines after each rule and a diagnostics: section.
std::string serialize_primed(const PrimedGrammar& p);
PrimedGrammar load_primed(std::string_view text);
PrimedGrammar load_primed_file(const std::filesystem::path& path);

}  // namespace tfsprime
