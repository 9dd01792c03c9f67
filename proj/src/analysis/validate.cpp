#include <set>

#include "qfm/analysis.hpp"

namespace qfm::analysis {

namespace {

Diagnostic make(Severity severity, std::string_view code, std::string message, SourceSpan span) {
  return Diagnostic{severity, std::string(code), std::move(message), std::move(span)};
}

std::string q(const FeatureModel& model, FeatureId f) { return "`" + model.feature(f).name + "`"; }

// Selecting `from` forces `to`: `to` is reached through mandatory children.
bool mandatory_descendant(const FeatureModel& model, FeatureId from, FeatureId to) {
  if (!model.is_ancestor(from, to)) return false;
  for (auto cur = std::optional<FeatureId>(to); cur && *cur != from; cur = model.feature(*cur).parent) {
    if (!model.feature(*cur).is_mandatory) return false;
  }
  return true;
}

}  // namespace

std::vector<Diagnostic> validate(const FeatureModel& model) {
  std::vector<Diagnostic> out;
  const SourceMap& src = model.sources();

  for (FeatureId id : model.preorder_features()) {
    const Feature& f = model.feature(id);
    if (f.is_abstract && f.plain_children.empty() && f.groups.empty()) {
      out.push_back(make(Severity::Warning, codes::kAbstractLeaf,
                         "abstract feature " + q(model, id) + " has no children to realize it",
                         src.feature(id)));
    }
  }

  const auto& requirement = model.requirement();
  for (std::size_t i = 0; i < model.constraints().size(); ++i) {
    const auto& c = model.constraints()[i];
    if (const auto* f = std::get_if<FeatureId>(&c.object)) {
      if (c.polarity != Polarity::Exclude) continue;
      if (model.is_ancestor(*f, c.subject)) {
        out.push_back(make(Severity::Error, codes::kContradictoryConstraint,
                           q(model, c.subject) + " excludes its own ancestor " + q(model, *f),
                           src.constraint(i)));
      } else if (mandatory_descendant(model, c.subject, *f)) {
        out.push_back(make(Severity::Error, codes::kContradictoryConstraint,
                           q(model, c.subject) + " excludes its mandatory descendant " +
                               q(model, *f),
                           src.constraint(i)));
      }
    } else if (const auto* a = std::get_if<AttributeRef>(&c.object)) {
      if (c.polarity == Polarity::Exclude) {
        out.push_back(make(Severity::Error, codes::kExcludeUnvaluedAttribute,
                           q(model, c.subject) + " excludes attribute `" + model.describe(*a) +
                               "` without naming a value",
                           src.constraint(i)));
      } else if (!requirement || !requirement->bound_value(*a)) {
        out.push_back(make(Severity::Warning, codes::kUnboundRequiredAttribute,
                           q(model, c.subject) + " requires `" + model.describe(*a) +
                               "` but no requirement sets it",
                           src.constraint(i)));
      }
    }
  }

  std::set<std::pair<QualityKind, std::optional<std::string>>> kinds;
  for (std::uint32_t i = 0; i < model.qualities().size(); ++i) {
    const auto& p = model.quality(QualityId{i});
    if (!kinds.emplace(p.kind, p.variant_tag).second) {
      std::string what = "`" + std::string(keyword(p.kind)) + "`";
      if (p.variant_tag) what += " with variant \"" + *p.variant_tag + "\"";
      out.push_back(make(Severity::Error, codes::kDuplicateQualityKind,
                         "quality " + what + " is declared more than once (again as `" + p.name +
                             "`)",
                         src.quality(QualityId{i})));
    }
  }

  if (requirement) {
    const auto& spans = src.requirement;
    for (std::size_t r = 0; r < requirement->quality_reqs.size(); ++r) {
      const auto& qr = requirement->quality_reqs[r];
      for (std::size_t t = 0; t < qr.thresholds.size(); ++t) {
        const MetricRef m = qr.thresholds[t].metric;
        if (m.quality == qr.property) continue;
        SourceSpan span = spans.block;
        if (r < spans.thresholds.size() && t < spans.thresholds[r].size()) {
          span = spans.thresholds[r][t];
        }
        out.push_back(make(Severity::Error, codes::kThresholdMetricMismatch,
                           "threshold on metric `" + model.metric(m).name + "` belongs to `" +
                               model.quality(m.quality).name + "`, not to `" +
                               model.quality(qr.property).name + "`",
                           span));
      }
    }
  }
  return out;
}

}  // namespace qfm::analysis
