#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfsprime/lexical_index.hpp"
#include "tfsprime/priming.hpp"

namespace tfsprime {

/// The chart grew past the edge cap or the node cap.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(std::size_t edges, const std::string& what = "edge cap")
      : std::runtime_error(what + " exceeded after " + std::to_string(edges) + " edges"), edges_(edges) {}
  std::size_t edges() const { return edges_; }

 private:
  std::size_t edges_;
};

struct EngineOptions {
  std::size_t edge_cap = 100000;
  /// Total feature-structure nodes over all edges.
  std::size_t node_cap = 20000000;
  bool first_only = false;
  /// Reuse a prediction whose restricted category subsumes the new one
  /// instead of requiring structural identity.
  bool subsumption_tabling = false;
  /// Ignore the primed orders and evaluate every rule left to right.
  bool declared_order = false;
  /// After the run, compare index-driven completion with an exhaustive scan.
  bool verify_index = false;
  std::ostream* trace = nullptr;
};

struct EngineStats {
  std::size_t edges = 0;
  std::size_t active_edges = 0;
  std::size_t passive_edges = 0;
  std::size_t predictions = 0;       // prediction table entries
  std::size_t prediction_hits = 0;   // predictions answered by the table
  std::size_t scans = 0;
  std::size_t completions_attempted = 0;
  std::size_t completions_succeeded = 0;
  std::size_t duplicates = 0;        // edges derived more than once
  std::size_t derivations = 0;       // successful analyses before deduplication
  std::size_t results = 0;
  std::size_t index_pairs = 0;       // completion pairs found through the index
  bool index_verified = false;
  bool index_complete = false;
  double wall_ms = 0.0;
};

struct Edge {
  enum class Origin { Predict, Scan, Complete };
  std::size_t id = 0;
  std::size_t rule = 0;
  std::size_t dot = 0;  // over the rule's evaluation order
  FeatureStructure inst;
  std::size_t backward = 0;
  std::optional<std::size_t> forward;
  Origin origin = Origin::Predict;
  std::optional<std::size_t> parent;  // edge advanced to produce this one
  std::vector<std::vector<std::string>> phon;  // per daughter, declared order
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> spans;  // parsing only
  bool passive = false;

  std::vector<std::string> words() const;
  std::optional<std::pair<std::size_t, std::size_t>> span() const;
};

struct Result {
  std::string text;
  std::vector<std::string> words;
  FeatureStructure fs;    // mother unified with the goal
  FeatureStructure cont;  // its logical form (whole structure if it has none)
};

/// One chart over a primed grammar.  Runs once, as generator or parser.
class Chart {
 public:
  Chart(const PrimedGrammar& primed, EngineOptions options = {});

  std::vector<Result> generate(const FeatureStructure& goal);
  std::vector<Result> parse(const std::vector<std::string>& tokens);

  const EngineStats& stats() const { return stats_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& evaluation_order(std::size_t rule) const { return orders_[rule]; }

 private:
  std::vector<Result> run(const FeatureStructure& goal);
  void process(std::size_t id);
  std::size_t predict(const FeatureStructure& category);
  void scan(std::size_t active);
  void complete(std::size_t active, std::size_t passive);
  bool adjacent(const Edge& active, std::size_t position, std::pair<std::size_t, std::size_t> span) const;
  void add_edge(Edge e);
  void trace(const char* kind, const Edge& e) const;
  void verify();

  const PrimedGrammar* primed_;
  EngineOptions opts_;
  LexicalIndex index_;
  std::vector<Path> restrictor_;
  std::vector<std::vector<std::size_t>> orders_;
  std::vector<FeatureStructure> bodies_;  // rule bodies without binding flags

  bool parsing_ = false;
  std::vector<std::string> tokens_;
  FeatureStructure goal_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> agenda_;
  std::map<std::string, std::size_t> edge_keys_;
  std::map<std::string, std::size_t> table_;
  std::vector<FeatureStructure> table_entries_;
  std::map<std::size_t, std::vector<std::size_t>> by_forward_;   // actives
  std::map<std::size_t, std::vector<std::size_t>> by_backward_;  // passives
  std::vector<std::pair<std::size_t, std::size_t>> combined_;
  std::vector<Result> results_;
  std::map<std::string, std::size_t> result_keys_;
  bool done_ = false;
  std::size_t nodes_ = 0;
  EngineStats stats_;
};

/// Generation mode: every string whose analysis unifies with the start
/// category and `goal`.  Throws GrammarError if `primed` is a parsing grammar.
std::vector<Result> generate(const PrimedGrammar& primed, const FeatureStructure& goal,
                             const EngineOptions& options = {}, EngineStats* stats = nullptr);
/// Parsing mode: analyses of the whole token sequence.  Throws GrammarError
/// for unknown words or a generation grammar.
std::vector<Result> parse(const PrimedGrammar& primed, const std::vector<std::string>& tokens,
                          const EngineOptions& options = {}, EngineStats* stats = nullptr);

std::vector<std::string> tokenize(std::string_view text);

}  // namespace tfsprime
