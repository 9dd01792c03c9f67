#pragma once

// Requirement-driven configuration derivation.
//
// derive_constraints encodes the feature tree and cross-tree constraints as
// CNF over two kinds of boolean variables: selected(f) per feature and
// binding(A, v) per attribute value. apply_requirement adds forced literals
// (each with a reason code), enumerate_configurations lists every distinct
// selection of visible features that extends to a model of the clauses.
//
// verify_configuration and brute_force_enumerate are an independent route:
// they check the model's rules directly against selection sets and share
// no code with the clause encoding or the search.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfm/model.hpp"

namespace qfm::config {

struct Literal {
  std::uint32_t var = 0;
  bool positive = true;

  Literal operator~() const { return {var, !positive}; }
  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;
};

enum class VariableKind { Selected, Binding };

struct Variable {
  VariableKind kind = VariableKind::Selected;
  FeatureId feature;          // Selected
  AttributeBinding binding;   // Binding
};

enum class ClauseRule {
  Root,
  ChildImpliesParent,
  Mandatory,
  OrGroup,
  AltAtLeastOne,
  AltAtMostOne,
  Requires,
  Excludes,
  AttributeAtMostOne,
};

std::string_view to_string(ClauseRule rule);

struct Clause {
  std::vector<Literal> literals;
  ClauseRule rule = ClauseRule::Root;
  std::string origin;  // human-readable source of the clause
};

class ConstraintSet {
 public:
  explicit ConstraintSet(const FeatureModel& model);

  std::size_t variable_count() const { return variables_.size(); }
  std::size_t feature_count() const { return feature_count_; }
  const Variable& variable(std::uint32_t var) const { return variables_.at(var); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::vector<Literal>& forced_true() const { return forced_true_; }
  const std::vector<Literal>& forced_false() const { return forced_false_; }

  std::uint32_t selected(FeatureId feature) const { return feature.value; }
  std::uint32_t binding(const AttributeBinding& binding) const;
  Literal selected_literal(FeatureId feature, bool positive = true) const {
    return {selected(feature), positive};
  }
  Literal binding_literal(const AttributeBinding& b, bool positive = true) const {
    return {binding(b), positive};
  }
  /// Every binding variable of one attribute, in value order.
  std::vector<std::uint32_t> attribute_variables(AttributeRef attribute) const;

  /// `selected(KNN)`, `binding(Dataset.Label = binary)`, negated with `not`.
  std::string describe(Literal literal) const;

  void add_clause(std::vector<Literal> literals, ClauseRule rule, std::string origin);
  /// Records the literal as forced; the caller guarantees its negation is
  /// not already forced.
  void force(Literal literal);
  bool is_forced(Literal literal) const;

 private:
  const FeatureModel* model_;
  std::size_t feature_count_ = 0;
  std::vector<Variable> variables_;
  std::map<AttributeRef, std::uint32_t> attribute_base_;
  std::vector<Clause> clauses_;
  std::vector<Literal> forced_true_;
  std::vector<Literal> forced_false_;
};

/// Clauses for the tree, the groups and the cross-tree constraints. No
/// literal is forced.
ConstraintSet derive_constraints(const FeatureModel& model);

enum class ReasonCode {
  MandatoryRoot,
  AttrSpec,
  QualityImplementer,
  ThresholdMetric,
  UnrequestedQuality,
  UnrequestedMetric,
  ConstraintConflict,
};

std::string_view to_string(ReasonCode code);  // e.g. "CONSTRAINT_CONFLICT"

struct Provenance {
  ReasonCode code = ReasonCode::MandatoryRoot;
  std::string detail;
  std::vector<Literal> antecedents;  // forced literals this one follows from
};

struct PrunedProblem {
  std::shared_ptr<const FeatureModel> model;
  std::optional<Requirement> requirement;
  ConstraintSet base;
  std::map<Literal, Provenance> provenance;

  const Provenance* reason(Literal literal) const;
};

/// One step of a derivation, rendered most-specific first.
struct ChainStep {
  std::string literal;
  std::string reason;  // reason code name or clause rule name
  std::string detail;
};

class RequirementUnsatisfiable : public std::runtime_error {
 public:
  RequirementUnsatisfiable(std::string literal, std::vector<ChainStep> positive,
                           std::vector<ChainStep> negative);

  const std::string& literal() const { return literal_; }
  /// Derivation of the literal being true, then of it being false.
  const std::vector<ChainStep>& positive_chain() const { return positive_; }
  const std::vector<ChainStep>& negative_chain() const { return negative_; }
  /// Deterministic multi-line rendering of both chains.
  std::string render() const;

 private:
  std::string literal_;
  std::vector<ChainStep> positive_;
  std::vector<ChainStep> negative_;
};

/// Problem for the model alone: derive_constraints plus the forced root.
PrunedProblem unconstrained_problem(const FeatureModel& model);

/// Forces and forbids selections according to the requirement, then runs
/// unit propagation. Throws RequirementUnsatisfiable when a literal ends up
/// forced both ways.
PrunedProblem apply_requirement(const FeatureModel& model, const Requirement& requirement);

struct EnumerationResult {
  std::vector<Configuration> configurations;
  bool truncated = false;
};

/// Every distinct configuration, sorted by the selection bit-vector over
/// the visible features in canonical order (unselected before selected).
EnumerationResult enumerate_configurations(const PrunedProblem& problem,
                                           std::optional<std::size_t> limit = std::nullopt);

/// Same count as enumerate_configurations without building the list.
std::uint64_t count_configurations(const PrunedProblem& problem);

/// Visible features of the model in canonical order.
std::vector<FeatureId> visible_features(const FeatureModel& model);

/// Bindings in effect for a selection: the requirement's attribute
/// specifications plus values required by selected features.
std::vector<AttributeBinding> effective_bindings(const FeatureModel& model,
                                                 const std::optional<Requirement>& requirement,
                                                 const std::vector<FeatureId>& selected);

/// Strict weak order matching the enumeration order.
bool configuration_less(const FeatureModel& model, const Configuration& a,
                        const Configuration& b);

struct Violation {
  std::string rule;  // reason code or tree rule, e.g. "ALT_GROUP"
  std::vector<EntityRef> entities;
  std::string message;
};

/// Checks one configuration against every rule. Abstract and hidden
/// features are not listed in a configuration, so the check searches for
/// a completion over them and reports the violations of the best one.
/// Empty iff the configuration is valid.
std::vector<Violation> verify_configuration(const FeatureModel& model,
                                            const std::optional<Requirement>& requirement,
                                            const Configuration& config);

/// Checks a full assignment (every feature decided, abstract and hidden
/// ones included).
std::vector<Violation> check_selection(const FeatureModel& model,
                                       const std::optional<Requirement>& requirement,
                                       const std::vector<bool>& selected);

class TooLarge : public std::length_error {
 public:
  explicit TooLarge(std::size_t feature_count);
  std::size_t feature_count() const { return feature_count_; }

 private:
  std::size_t feature_count_;
};

inline constexpr std::size_t kBruteForceLimit = 24;

/// Test oracle: tries all 2^n selections. Throws TooLarge above 24
/// features.
std::vector<Configuration> brute_force_enumerate(const PrunedProblem& problem);

/// Every full assignment accepted by check_selection, as bit-vectors
/// indexed by FeatureId. Throws TooLarge above 24 features.
void for_each_valid_selection(const FeatureModel& model,
                              const std::optional<Requirement>& requirement,
                              const std::function<void(const std::vector<bool>&)>& visit);

}  // namespace qfm::config
