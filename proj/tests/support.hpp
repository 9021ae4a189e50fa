#pragma once

// Independent oracles shared by the unit tests and the acceptance driver.

#include <filesystem>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tfsprime/earley.hpp"
#include "tfsprime/priming.hpp"

namespace tfsprime::testing {

std::filesystem::path grammar_path(const std::string& file);
Grammar fixture(const std::string& file);

/// Goals used across the suites.
struct Goal {
  std::string grammar;  // fixture file
  std::string avm;
  std::vector<std::string> expected;  // surface strings, if pinned down
};
extern const char* const kQuestionGoal;  // "hat karl marie geküßt"
extern const char* const kTopicGoal;     // "anna lieben wird karl"
std::vector<Goal> fixture_goals();

/// Meet and join by enumerating the whole hierarchy.
std::optional<TypeId> brute_meet(const TypeHierarchy& h, TypeId a, TypeId b);
TypeId brute_join(const TypeHierarchy& h, TypeId a, TypeId b);

/// Largest number of defining members left by one ground assignment of the
/// category's bound paths, trying every combination of values the members
/// themselves supply.  Empty when more than `limit` members define it.
std::optional<std::size_t> nondeterminacy_oracle(const FeatureStructure& category, const Grammar& g,
                                                 const std::vector<FeatureStructure>& summaries, Mode mode,
                                                 std::size_t limit = 8);

/// Bottom-up enumeration of every derivation up to `depth` rule applications,
/// with daughters combined in declared order.
struct Derived {
  std::vector<std::string> words;
  FeatureStructure fs;
  bool phrasal = false;
};
std::vector<Derived> enumerate_derivations(const Grammar& g, std::size_t depth);

/// (surface string, canonical logical form) of derivations whose mother
/// unifies with the start category and `goal`.
using Reading = std::pair<std::string, std::string>;
std::set<Reading> enumerated_readings(const Grammar& g, const std::vector<Derived>& items,
                                      const std::optional<FeatureStructure>& goal);
std::set<Reading> readings(const std::vector<Result>& results);

/// Random well-typed acyclic structure with some reentrancy and flags.
FeatureStructure random_structure(const HierarchyPtr& sig, std::mt19937& rng, int max_depth = 3);
/// Checks the unification/generalization laws on one pair; returns failures.
std::vector<std::string> check_laws(const FeatureStructure& a, const FeatureStructure& b, bool* unified = nullptr);

}  // namespace tfsprime::testing
