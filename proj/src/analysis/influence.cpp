#include <algorithm>
#include <set>

#include "qfm/analysis.hpp"

namespace qfm::analysis {

namespace {

#define INFLUENCE(src, dst, note) BuiltinInfluence{QualityKind::src, QualityKind::dst, note},
#define STEPS(kind, ...)
constexpr BuiltinInfluence kInfluences[] = {
#include "knowledge.inc"
};
#undef INFLUENCE
#undef STEPS

struct StepRow {
  QualityKind kind;
  std::vector<PipelineStep> steps;
};

#define INFLUENCE(src, dst, note)
#define STEPS(kind, ...) StepRow{QualityKind::kind, {__VA_ARGS__}},
const std::vector<StepRow>& step_rows() {
  using enum PipelineStep;
  static const std::vector<StepRow> rows = {
#include "knowledge.inc"
  };
  return rows;
}
#undef INFLUENCE
#undef STEPS

InfluenceNode node_for(const FeatureModel& model, QualityId id) {
  const auto& q = model.quality(id);
  return InfluenceNode{id, q.kind, q.name};
}

std::vector<InfluenceNode> nodes_of_kind(const FeatureModel& model, QualityKind kind) {
  std::vector<InfluenceNode> out;
  for (std::uint32_t i = 0; i < model.qualities().size(); ++i) {
    if (model.quality(QualityId{i}).kind == kind) out.push_back(node_for(model, QualityId{i}));
  }
  if (out.empty()) out.push_back(InfluenceNode{std::nullopt, kind, std::string(display_name(kind))});
  return out;
}

std::string key(const InfluenceNode& n) {
  return n.quality ? "q" + std::to_string(n.quality->value) : "k" + std::string(keyword(n.kind));
}

std::string_view note_for(QualityKind source, QualityKind target) {
  for (const auto& row : kInfluences) {
    if (row.source == source && row.target == target) return row.note;
  }
  return {};
}

}  // namespace

std::string_view to_string(EdgeOrigin origin) {
  return origin == EdgeOrigin::Model ? "MODEL" : "BUILTIN";
}

std::span<const BuiltinInfluence> builtin_influences() { return kInfluences; }

std::string_view to_string(PipelineStep step) {
  switch (step) {
    case PipelineStep::DataPreProcessing: return "Data Pre-Processing";
    case PipelineStep::FeatureEngineering: return "Feature Engineering";
    case PipelineStep::ModelTrainingTesting: return "Model Training-Testing";
    case PipelineStep::ModelEvaluation: return "Model Evaluation";
    case PipelineStep::ModelDeployMonitoring: return "Model Deploy and Monitoring";
  }
  return "Data Pre-Processing";
}

std::span<const PipelineStep> step_impact(QualityKind kind) {
  for (const auto& row : step_rows()) {
    if (row.kind == kind) return row.steps;
  }
  return {};
}

InfluenceReport influence_report(const FeatureModel& model,
                                 const std::optional<Requirement>& requirement,
                                 bool include_builtin) {
  InfluenceReport report;
  std::set<std::pair<std::string, std::string>> seen;
  auto add = [&](InfluenceNode source, InfluenceNode target, EdgeOrigin origin) {
    if (key(source) == key(target)) return;
    if (!seen.emplace(key(source), key(target)).second) return;
    report.edges.push_back(InfluenceEdge{std::move(source), std::move(target), origin});
  };

  for (std::uint32_t i = 0; i < model.qualities().size(); ++i) {
    for (QualityId q : model.quality(QualityId{i}).influenced_by) {
      add(node_for(model, q), node_for(model, QualityId{i}), EdgeOrigin::Model);
    }
  }
  if (include_builtin) {
    for (const auto& row : kInfluences) {
      const auto sources = nodes_of_kind(model, row.source);
      const auto targets = nodes_of_kind(model, row.target);
      for (const auto& s : sources) {
        for (const auto& t : targets) {
          if (!s.quality && !t.quality) continue;
          add(s, t, EdgeOrigin::Builtin);
        }
      }
    }
  }

  if (!requirement) return report;
  auto required = [&](const InfluenceNode& n) { return n.quality && requirement->find(*n.quality); };
  auto has_edge = [&](const InfluenceNode& s, const InfluenceNode& t) {
    return seen.count({key(s), key(t)}) > 0;
  };
  std::set<std::pair<std::string, std::string>> warned;
  for (const auto& e : report.edges) {
    if (!required(e.source) || !required(e.target)) continue;
    const std::string a = key(e.source);
    const std::string b = key(e.target);
    if (!warned.emplace(std::min(a, b), std::max(a, b)).second) continue;
    std::string text;
    if (has_edge(e.target, e.source)) {
      text = "`" + e.source.name + "` and `" + e.target.name +
             "` mutually influence each other: tightening one may degrade the other";
    } else {
      text = "requiring `" + e.source.name + "` may degrade `" + e.target.name + "`";
    }
    if (auto note = note_for(e.source.kind, e.target.kind); !note.empty()) {
      text += " (" + std::string(note) + ")";
    }
    report.warnings.push_back(std::move(text));
  }
  return report;
}

}  // namespace qfm::analysis
