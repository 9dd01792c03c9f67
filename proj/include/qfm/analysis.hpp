#pragma once

// Checks and reports over a built FeatureModel: well-formedness findings
// beyond the structural invariants, feature-model anomalies, quality
// influence and the pipeline steps each quality kind touches.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qfm/model.hpp"
#include "qfm/source.hpp"

namespace qfm::analysis {

/// W010, E020, E021, E022, W023 and E024 findings, in model order.
std::vector<Diagnostic> validate(const FeatureModel& model);

struct AnomalyReport {
  std::vector<FeatureId> dead;
  std::vector<FeatureId> false_optional;
  bool is_void = false;

  friend bool operator==(const AnomalyReport&, const AnomalyReport&) = default;
};

class SearchBudgetExceeded : public std::runtime_error {
 public:
  explicit SearchBudgetExceeded(std::uint64_t limit);
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
};

inline constexpr std::uint64_t kDefaultProbeBudget = 5'000'000;

/// Dead and false-optional features of the model without its requirement.
/// Exhaustive up to 24 features, solver probes beyond that.
AnomalyReport detect_anomalies(const FeatureModel& model,
                               std::uint64_t budget = kDefaultProbeBudget);

/// The two routes behind detect_anomalies, exposed so they can be compared.
AnomalyReport detect_anomalies_exhaustive(const FeatureModel& model);
AnomalyReport detect_anomalies_by_search(const FeatureModel& model,
                                         std::uint64_t budget = kDefaultProbeBudget);

enum class EdgeOrigin { Model, Builtin };
std::string_view to_string(EdgeOrigin origin);  // "MODEL" / "BUILTIN"

/// A quality declared in the model, or a kind the model does not declare
/// (then `quality` is empty and `name` is the kind's display name).
struct InfluenceNode {
  std::optional<QualityId> quality;
  QualityKind kind = QualityKind::Fairness;
  std::string name;

  friend bool operator==(const InfluenceNode&, const InfluenceNode&) = default;
};

struct InfluenceEdge {
  InfluenceNode source;
  InfluenceNode target;
  EdgeOrigin origin = EdgeOrigin::Model;

  friend bool operator==(const InfluenceEdge&, const InfluenceEdge&) = default;
};

struct InfluenceReport {
  std::vector<InfluenceEdge> edges;
  std::vector<std::string> warnings;
};

/// Edges `Q -> P` for every Q in P's influenced_by list, then (with
/// include_builtin) the built-in table keyed by quality kind. Warnings name
/// required qualities that influence other required qualities.
InfluenceReport influence_report(const FeatureModel& model,
                                 const std::optional<Requirement>& requirement,
                                 bool include_builtin);

struct BuiltinInfluence {
  QualityKind source;
  QualityKind target;
  std::string_view note;
};

std::span<const BuiltinInfluence> builtin_influences();

enum class PipelineStep {
  DataPreProcessing,
  FeatureEngineering,
  ModelTrainingTesting,
  ModelEvaluation,
  ModelDeployMonitoring,
};

std::string_view to_string(PipelineStep step);  // "Model Training-Testing"

/// Pipeline steps a quality kind has an impact on, in pipeline order.
std::span<const PipelineStep> step_impact(QualityKind kind);

}  // namespace qfm::analysis
