#pragma once

// Unresolved model declarations, as produced by the parser or assembled by
// hand in tests. build_model resolves names into a FeatureModel.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfm/model.hpp"
#include "qfm/source.hpp"

namespace qfm {

struct NameRef {
  std::string name;
  SourceSpan span;
};

struct AttributeDecl {
  NameRef name;
  std::vector<NameRef> values;
};

struct FeatureDecl;

struct GroupDecl {
  GroupKind kind = GroupKind::Or;
  SourceSpan span;
  std::vector<FeatureDecl> members;
};

struct FeatureDecl {
  NameRef name;
  bool is_abstract = false;
  bool is_mandatory = false;
  bool is_hidden = false;
  std::vector<AttributeDecl> attributes;
  std::vector<GroupDecl> groups;
  std::vector<FeatureDecl> children;
};

/// `Feature`, `Feature.Attribute` or `Feature.Attribute = Value`.
struct RefDecl {
  NameRef feature;
  std::optional<NameRef> attribute;
  std::optional<NameRef> value;
};

struct ConstraintDecl {
  NameRef subject;
  Polarity polarity = Polarity::Require;
  RefDecl object;
  SourceSpan span;
};

struct InvolvementDecl {
  NameRef feature;
  std::optional<Level> level;
};

struct MetricDecl {
  NameRef name;
  NameRef implementer;
};

struct QualityDecl {
  QualityKind kind = QualityKind::Fairness;
  NameRef name;
  std::optional<Nature> nature;
  std::optional<std::string> variant_tag;
  std::vector<NameRef> implemented_by;
  std::vector<InvolvementDecl> involves;
  std::vector<NameRef> influenced_by;
  std::vector<MetricDecl> metrics;
  SourceSpan span;
};

struct AttributeSpecDecl {
  NameRef feature;
  NameRef attribute;
  NameRef value;
  SourceSpan span;
};

struct ThresholdDecl {
  NameRef metric;
  Comparator comparator = Comparator::GE;
  double value = 0.0;
  SourceSpan span;
};

struct QualityRequirementDecl {
  NameRef quality;
  std::optional<Level> level;
  std::vector<ThresholdDecl> thresholds;
  SourceSpan span;
};

struct RequirementDecl {
  NameRef task;
  std::vector<AttributeSpecDecl> specs;
  std::vector<QualityRequirementDecl> quality_reqs;
  SourceSpan span;
};

struct ModelDecl {
  std::string file;
  NameRef name;
  FeatureDecl root;
  std::vector<QualityDecl> qualities;
  std::vector<ConstraintDecl> constraints;
  std::optional<RequirementDecl> requirement;
};

enum class BuildErrorKind {
  DuplicateName,
  UnresolvedReference,
  AbstractImplementsMetric,
  ValueOutOfDomain,
  InvalidStructure,
};

std::string_view to_string(BuildErrorKind kind);
std::string_view diagnostic_code(BuildErrorKind kind);

struct BuildIssue {
  BuildErrorKind kind = BuildErrorKind::InvalidStructure;
  std::string identifier;
  SourceSpan span;
  std::string message;
};

Diagnostic to_diagnostic(const BuildIssue& issue);

class ModelBuildError : public std::runtime_error {
 public:
  explicit ModelBuildError(std::vector<BuildIssue> issues);
  const std::vector<BuildIssue>& issues() const { return issues_; }

 private:
  std::vector<BuildIssue> issues_;
};

struct BuildResult {
  std::optional<FeatureModel> model;
  std::vector<BuildIssue> issues;
};

/// Resolves every reference; reports all issues found rather than the first.
BuildResult try_build_model(const ModelDecl& decl);
/// Throws ModelBuildError when try_build_model reports any issue.
FeatureModel build_model(const ModelDecl& decl);

struct RequirementBuildResult {
  std::optional<Requirement> requirement;
  RequirementSpans spans;
  std::vector<BuildIssue> issues;
};

/// Resolves a requirement block against an already built model.
RequirementBuildResult try_build_requirement(const FeatureModel& model,
                                             const RequirementDecl& decl);

}  // namespace qfm
