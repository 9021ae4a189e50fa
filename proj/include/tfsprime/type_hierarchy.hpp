#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tfsprime {

using TypeId = std::int32_t;
using FeatureId = std::int32_t;

/// Thrown for malformed hierarchies, unknown names and ill-typed input.
class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bounded-complete type lattice with feature appropriateness.
///
/// Built once through TypeHierarchy::Builder and immutable afterwards.  The
/// builder completes the declared hierarchy with synthetic types wherever two
/// types lack a unique least common supertype, so join() is total.  Meets are
/// partial; a missing meet is a unification clash.
class TypeHierarchy {
 public:
  class Builder {
   public:
    struct Approp {
      std::string type, feature, value;
    };

    Builder();

    /// `sub parent > child1 child2 ...`; types are created on first mention.
    void add_subtypes(std::string_view parent, const std::vector<std::string>& children);
    /// `approp type feature valuetype`
    void add_appropriateness(std::string_view type, std::string_view feature, std::string_view value);
    /// Registers an atomic word form as a leaf below `string`.
    TypeId intern_string(std::string_view word);

    std::shared_ptr<const TypeHierarchy> finish();

   private:
    TypeId ensure_type(std::string_view name);

    std::vector<std::string> names_;
    std::unordered_map<std::string, TypeId> ids_;
    std::vector<std::vector<TypeId>> parents_;
    std::vector<std::pair<std::string, std::vector<std::string>>> declared_subs_;
    std::vector<Approp> declared_approps_;
    std::vector<std::string> strings_;
  };

  TypeId top() const { return 0; }
  TypeId string_type() const { return string_; }
  TypeId list_type() const { return list_; }
  TypeId empty_list_type() const { return elist_; }
  TypeId nonempty_list_type() const { return nelist_; }
  FeatureId first_feature() const { return first_; }
  FeatureId rest_feature() const { return rest_; }

  std::size_t type_count() const { return names_.size(); }
  std::size_t feature_count() const { return feature_names_.size(); }

  const std::string& name(TypeId t) const { return names_.at(static_cast<std::size_t>(t)); }
  std::optional<TypeId> find(std::string_view name) const;
  TypeId id(std::string_view name) const;  // throws GrammarError

  const std::string& feature_name(FeatureId f) const { return feature_names_.at(static_cast<std::size_t>(f)); }
  std::optional<FeatureId> find_feature(std::string_view name) const;
  FeatureId feature(std::string_view name) const;  // throws GrammarError

  /// True iff `specific` is `general` or one of its descendants.
  bool subsumes(TypeId general, TypeId specific) const {
    return ancestors_[static_cast<std::size_t>(specific)][static_cast<std::size_t>(general)] != 0;
  }
  std::optional<TypeId> meet(TypeId a, TypeId b) const {
    TypeId m = meet_[index(a, b)];
    if (m < 0) return std::nullopt;
    return m;
  }
  TypeId join(TypeId a, TypeId b) const { return join_[index(a, b)]; }

  bool has_subtypes(TypeId t) const { return !children_[static_cast<std::size_t>(t)].empty(); }
  const std::vector<TypeId>& children(TypeId t) const { return children_[static_cast<std::size_t>(t)]; }
  const std::vector<TypeId>& parents(TypeId t) const { return parents_[static_cast<std::size_t>(t)]; }

  /// Appropriateness restriction for (t, f), if f is appropriate for t.
  std::optional<TypeId> appropriate(TypeId t, FeatureId f) const;
  /// Features appropriate for t, ordered by feature id.
  std::span<const std::pair<FeatureId, TypeId>> features_of(TypeId t) const {
    return approp_[static_cast<std::size_t>(t)];
  }
  /// The most general type carrying feature f.
  TypeId introducer(FeatureId f) const { return introducer_[static_cast<std::size_t>(f)]; }

  /// A type with no proper subtypes and no appropriate features: its value is
  /// fully determined by the type alone.
  bool is_atomic(TypeId t) const { return !has_subtypes(t) && features_of(t).empty(); }
  bool is_synthetic(TypeId t) const { return synthetic_[static_cast<std::size_t>(t)] != 0; }
  bool is_string(TypeId t) const { return t != string_ && subsumes(string_, t); }

  const std::vector<std::pair<std::string, std::vector<std::string>>>& declared_subtypes() const {
    return declared_subs_;
  }
  const std::vector<Builder::Approp>& declared_appropriateness() const { return declared_approps_; }

 private:
  TypeHierarchy() = default;
  std::size_t index(TypeId a, TypeId b) const {
    return static_cast<std::size_t>(a) * names_.size() + static_cast<std::size_t>(b);
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, TypeId> ids_;
  std::vector<std::vector<TypeId>> parents_, children_;
  std::vector<std::vector<char>> ancestors_;  // ancestors_[t][u] != 0 iff u subsumes t
  std::vector<char> synthetic_;
  std::vector<TypeId> meet_, join_;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, FeatureId> feature_ids_;
  std::vector<std::vector<std::pair<FeatureId, TypeId>>> approp_;
  std::vector<TypeId> introducer_;
  std::vector<std::pair<std::string, std::vector<std::string>>> declared_subs_;
  std::vector<Builder::Approp> declared_approps_;
  TypeId string_ = 0, list_ = 0, elist_ = 0, nelist_ = 0;
  FeatureId first_ = 0, rest_ = 0;
};

using HierarchyPtr = std::shared_ptr<const TypeHierarchy>;

}  // namespace tfsprime
