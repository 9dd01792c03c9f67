#pragma once

// In-memory Quality-and-Feature Model.
//
// A FeatureModel is built once from a ModelDecl (see decl.hpp) and is
// immutable afterwards. Features are stored in canonical pre-order, so a
// FeatureId doubles as the feature's position in that order.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "qfm/source.hpp"

namespace qfm {

template <class Tag>
struct Id {
  std::uint32_t value = 0;

  friend auto operator<=>(const Id&, const Id&) = default;
  friend bool operator==(const Id&, const Id&) = default;
};

using FeatureId = Id<struct FeatureTag>;
using QualityId = Id<struct QualityTag>;

struct AttributeRef {
  FeatureId owner;
  std::uint32_t index = 0;

  friend auto operator<=>(const AttributeRef&, const AttributeRef&) = default;
  friend bool operator==(const AttributeRef&, const AttributeRef&) = default;
};

struct MetricRef {
  QualityId quality;
  std::uint32_t index = 0;

  friend auto operator<=>(const MetricRef&, const MetricRef&) = default;
  friend bool operator==(const MetricRef&, const MetricRef&) = default;
};

/// An attribute fixed to one of its declared values.
struct AttributeBinding {
  AttributeRef attribute;
  std::uint32_t value = 0;

  friend auto operator<=>(const AttributeBinding&, const AttributeBinding&) = default;
  friend bool operator==(const AttributeBinding&, const AttributeBinding&) = default;
};

enum class GroupKind { Or, Alt };
enum class Polarity { Require, Exclude };
enum class QualityKind {
  Fairness,
  Interpretability,
  Privacy,
  PredictionCorrectness,
  ComputationalComplexity,
};
enum class Nature { Quantitative, Qualitative };
enum class Level { Low, Medium, High };
enum class Comparator { LE, GE, LT, GT, EQ };

inline constexpr QualityKind kAllQualityKinds[] = {
    QualityKind::Fairness,
    QualityKind::Interpretability,
    QualityKind::Privacy,
    QualityKind::PredictionCorrectness,
    QualityKind::ComputationalComplexity,
};

std::string_view to_string(GroupKind kind);
std::string_view to_string(Polarity polarity);
std::string_view to_string(Nature nature);
std::string_view to_string(Level level);
std::string_view to_string(Comparator comparator);
/// DSL keyword, e.g. "prediction_correctness".
std::string_view keyword(QualityKind kind);
/// Human name, e.g. "Prediction Correctness".
std::string_view display_name(QualityKind kind);

/// Quantitative unless the attribute cannot be measured by a metric.
Nature default_nature(QualityKind kind);

struct Attribute {
  std::string name;
  std::vector<std::string> values;

  std::optional<std::uint32_t> value_index(std::string_view value) const;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Group {
  GroupKind kind = GroupKind::Or;
  std::vector<FeatureId> members;

  friend bool operator==(const Group&, const Group&) = default;
};

struct Feature {
  std::string name;
  bool is_abstract = false;
  bool is_mandatory = false;
  bool is_hidden = false;
  std::optional<FeatureId> parent;
  std::vector<Attribute> attributes;
  std::vector<Group> groups;
  std::vector<FeatureId> plain_children;

  /// Concrete and not hidden: the features a Configuration lists.
  bool is_visible() const { return !is_abstract && !is_hidden; }
  friend bool operator==(const Feature&, const Feature&) = default;
};

using ConstraintObject = std::variant<FeatureId, AttributeRef, AttributeBinding>;

struct CrossTreeConstraint {
  FeatureId subject;
  Polarity polarity = Polarity::Require;
  ConstraintObject object;

  friend bool operator==(const CrossTreeConstraint&, const CrossTreeConstraint&) = default;
};

struct Involvement {
  FeatureId feature;
  std::optional<Level> level;

  friend bool operator==(const Involvement&, const Involvement&) = default;
};

struct Metric {
  std::string name;
  QualityId property;
  FeatureId implementer;

  friend bool operator==(const Metric&, const Metric&) = default;
};

struct QualityProperty {
  std::string name;
  QualityKind kind = QualityKind::Fairness;
  Nature nature = Nature::Quantitative;
  std::optional<std::string> variant_tag;
  std::vector<FeatureId> implemented_by;
  std::vector<Involvement> involvements;
  std::vector<QualityId> influenced_by;
  std::vector<Metric> metrics;

  friend bool operator==(const QualityProperty&, const QualityProperty&) = default;
};

struct AttributeSpecification {
  AttributeRef attribute;
  std::uint32_t value = 0;

  AttributeBinding binding() const { return {attribute, value}; }
  friend bool operator==(const AttributeSpecification&, const AttributeSpecification&) = default;
};

struct Threshold {
  MetricRef metric;
  Comparator comparator = Comparator::GE;
  double value = 0.0;

  friend bool operator==(const Threshold&, const Threshold&) = default;
};

struct QualityRequirement {
  QualityId property;
  std::vector<Threshold> thresholds;
  std::optional<Level> required_level;

  friend bool operator==(const QualityRequirement&, const QualityRequirement&) = default;
};

struct Requirement {
  std::string task;
  std::vector<AttributeSpecification> attribute_specs;
  std::vector<QualityRequirement> quality_reqs;

  const QualityRequirement* find(QualityId property) const;
  std::optional<std::uint32_t> bound_value(AttributeRef attribute) const;
  bool has_threshold_on(MetricRef metric) const;
  friend bool operator==(const Requirement&, const Requirement&) = default;
};

/// One valid selection: visible features in canonical order plus the
/// attribute bindings it puts in effect.
struct Configuration {
  std::vector<FeatureId> selected;
  std::vector<AttributeBinding> bindings;

  bool contains(FeatureId feature) const;
  friend bool operator==(const Configuration&, const Configuration&) = default;
};

using EntityRef = std::variant<FeatureId, AttributeRef, QualityId, MetricRef>;

struct RequirementSpans {
  SourceSpan block;
  std::vector<SourceSpan> attribute_specs;
  std::vector<SourceSpan> quality_reqs;
  std::vector<std::vector<SourceSpan>> thresholds;
};

/// Declaration sites. Kept apart from the model so structural equality
/// ignores layout.
struct SourceMap {
  std::string file;
  std::vector<SourceSpan> features;
  std::vector<SourceSpan> qualities;
  std::vector<SourceSpan> constraints;
  RequirementSpans requirement;

  SourceSpan feature(FeatureId id) const;
  SourceSpan quality(QualityId id) const;
  SourceSpan constraint(std::size_t index) const;
};

class NotFound : public std::out_of_range {
 public:
  explicit NotFound(std::string path);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class FeatureModel {
 public:
  const std::string& name() const { return name_; }
  FeatureId root() const { return FeatureId{0}; }
  std::size_t feature_count() const { return features_.size(); }
  std::span<const Feature> features() const { return features_; }
  const Feature& feature(FeatureId id) const { return features_.at(id.value); }

  std::span<const QualityProperty> qualities() const { return qualities_; }
  const QualityProperty& quality(QualityId id) const { return qualities_.at(id.value); }
  const Attribute& attribute(AttributeRef ref) const;
  const Metric& metric(MetricRef ref) const;

  std::span<const CrossTreeConstraint> constraints() const { return constraints_; }
  const std::optional<Requirement>& requirement() const { return requirement_; }
  const SourceMap& sources() const { return sources_; }

  /// Depth-first pre-order: a node, its plain children, then its group
  /// members, each list in declaration order.
  std::vector<FeatureId> preorder_features() const;

  /// Resolves `Feature`, `Quality`, `Feature.Attribute` or `Quality.Metric`.
  /// Features shadow qualities of the same name; use the find_* functions
  /// to address one namespace explicitly.
  std::optional<EntityRef> try_lookup(std::string_view path) const;
  EntityRef lookup(std::string_view path) const;  // throws NotFound

  std::optional<FeatureId> find_feature(std::string_view name) const;
  std::optional<QualityId> find_quality(std::string_view name) const;
  std::optional<AttributeRef> find_attribute(std::string_view feature,
                                             std::string_view attribute) const;
  std::optional<MetricRef> find_metric(std::string_view quality,
                                       std::string_view metric) const;

  /// True when `ancestor` lies strictly above `feature`.
  bool is_ancestor(FeatureId ancestor, FeatureId feature) const;
  /// Every feature in the subtree rooted at `feature` (inclusive).
  std::vector<FeatureId> subtree(FeatureId feature) const;

  std::string describe(AttributeRef ref) const;           // Dataset.Label
  std::string describe(const AttributeBinding& b) const;  // Dataset.Label = binary
  std::string describe(MetricRef ref) const;              // Fairness.DI
  std::string describe(const ConstraintObject& object) const;
  std::string describe(const CrossTreeConstraint& constraint) const;

  /// Copy with the embedded requirement replaced.
  FeatureModel with_requirement(std::optional<Requirement> requirement,
                                RequirementSpans spans = {}) const;

  /// Structural equality: names, flags, kinds and relations. Source
  /// locations are not compared.
  friend bool operator==(const FeatureModel& a, const FeatureModel& b);

 private:
  friend class ModelAssembler;
  FeatureModel() = default;
  void index_names();

  std::string name_;
  std::vector<Feature> features_;
  std::vector<QualityProperty> qualities_;
  std::vector<CrossTreeConstraint> constraints_;
  std::optional<Requirement> requirement_;
  SourceMap sources_;
  std::unordered_map<std::string, FeatureId> feature_index_;
  std::unordered_map<std::string, QualityId> quality_index_;
};

}  // namespace qfm
