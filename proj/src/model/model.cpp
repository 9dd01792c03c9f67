#include "qfm/model.hpp"

#include <algorithm>
#include <functional>

namespace qfm {

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

const std::vector<std::string_view>& all_diagnostic_codes() {
  static const std::vector<std::string_view> kCodes = [] {
    std::vector<std::string_view> all = {
        codes::kLexical,
        codes::kSyntax,
        codes::kUnknownKeyword,
        codes::kDuplicateName,
        codes::kUnresolvedReference,
        codes::kAbstractImplementsMetric,
        codes::kValueOutOfDomain,
        codes::kInvalidStructure,
        codes::kContradictoryConstraint,
        codes::kThresholdMetricMismatch,
        codes::kDuplicateQualityKind,
        codes::kExcludeUnvaluedAttribute,
        codes::kAbstractLeaf,
        codes::kUnboundRequiredAttribute,
    };
    std::sort(all.begin(), all.end());
    return all;
  }();
  return kCodes;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string_view to_string(GroupKind kind) { return kind == GroupKind::Or ? "or" : "alt"; }

std::string_view to_string(Polarity polarity) {
  return polarity == Polarity::Require ? "requires" : "excludes";
}

std::string_view to_string(Nature nature) {
  return nature == Nature::Quantitative ? "quantitative" : "qualitative";
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Low: return "low";
    case Level::Medium: return "medium";
    case Level::High: return "high";
  }
  return "low";
}

std::string_view to_string(Comparator comparator) {
  switch (comparator) {
    case Comparator::LE: return "<=";
    case Comparator::GE: return ">=";
    case Comparator::LT: return "<";
    case Comparator::GT: return ">";
    case Comparator::EQ: return "=";
  }
  return "=";
}

std::string_view keyword(QualityKind kind) {
  switch (kind) {
    case QualityKind::Fairness: return "fairness";
    case QualityKind::Interpretability: return "interpretability";
    case QualityKind::Privacy: return "privacy";
    case QualityKind::PredictionCorrectness: return "prediction_correctness";
    case QualityKind::ComputationalComplexity: return "computational_complexity";
  }
  return "fairness";
}

std::string_view display_name(QualityKind kind) {
  switch (kind) {
    case QualityKind::Fairness: return "Fairness";
    case QualityKind::Interpretability: return "Interpretability";
    case QualityKind::Privacy: return "Privacy";
    case QualityKind::PredictionCorrectness: return "Prediction Correctness";
    case QualityKind::ComputationalComplexity: return "Computational Complexity";
  }
  return "Fairness";
}

Nature default_nature(QualityKind kind) {
  switch (kind) {
    case QualityKind::Privacy:
    case QualityKind::Interpretability:
      return Nature::Qualitative;
    default:
      return Nature::Quantitative;
  }
}

std::optional<std::uint32_t> Attribute::value_index(std::string_view value) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == value) return static_cast<std::uint32_t>(i);
  }
  return std::nullopt;
}

const QualityRequirement* Requirement::find(QualityId property) const {
  for (const auto& qr : quality_reqs) {
    if (qr.property == property) return &qr;
  }
  return nullptr;
}

std::optional<std::uint32_t> Requirement::bound_value(AttributeRef attribute) const {
  for (const auto& spec : attribute_specs) {
    if (spec.attribute == attribute) return spec.value;
  }
  return std::nullopt;
}

bool Requirement::has_threshold_on(MetricRef metric) const {
  for (const auto& qr : quality_reqs) {
    for (const auto& t : qr.thresholds) {
      if (t.metric == metric) return true;
    }
  }
  return false;
}

bool Configuration::contains(FeatureId feature) const {
  return std::find(selected.begin(), selected.end(), feature) != selected.end();
}

namespace {
SourceSpan span_at(const std::vector<SourceSpan>& spans, std::size_t index,
                   const std::string& file) {
  if (index < spans.size()) return spans[index];
  return SourceSpan{file, 1, 1, 0};
}
}  // namespace

SourceSpan SourceMap::feature(FeatureId id) const { return span_at(features, id.value, file); }
SourceSpan SourceMap::quality(QualityId id) const { return span_at(qualities, id.value, file); }
SourceSpan SourceMap::constraint(std::size_t index) const {
  return span_at(constraints, index, file);
}

NotFound::NotFound(std::string path)
    : std::out_of_range("no entity named `" + path + "`"), path_(std::move(path)) {}

const Attribute& FeatureModel::attribute(AttributeRef ref) const {
  return feature(ref.owner).attributes.at(ref.index);
}

const Metric& FeatureModel::metric(MetricRef ref) const {
  return quality(ref.quality).metrics.at(ref.index);
}

std::vector<FeatureId> FeatureModel::preorder_features() const {
  std::vector<FeatureId> order;
  order.reserve(features_.size());
  std::function<void(FeatureId)> visit = [&](FeatureId id) {
    order.push_back(id);
    const Feature& f = feature(id);
    for (FeatureId child : f.plain_children) visit(child);
    for (const Group& g : f.groups) {
      for (FeatureId member : g.members) visit(member);
    }
  };
  if (!features_.empty()) visit(root());
  return order;
}

std::optional<FeatureId> FeatureModel::find_feature(std::string_view name) const {
  auto it = feature_index_.find(std::string(name));
  if (it == feature_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<QualityId> FeatureModel::find_quality(std::string_view name) const {
  auto it = quality_index_.find(std::string(name));
  if (it == quality_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<AttributeRef> FeatureModel::find_attribute(std::string_view feature_name,
                                                         std::string_view attribute) const {
  auto owner = find_feature(feature_name);
  if (!owner) return std::nullopt;
  const auto& attrs = feature(*owner).attributes;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == attribute) return AttributeRef{*owner, static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

std::optional<MetricRef> FeatureModel::find_metric(std::string_view quality_name,
                                                   std::string_view metric_name) const {
  auto q = find_quality(quality_name);
  if (!q) return std::nullopt;
  const auto& metrics = quality(*q).metrics;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    if (metrics[i].name == metric_name) return MetricRef{*q, static_cast<std::uint32_t>(i)};
  }
  return std::nullopt;
}

std::optional<EntityRef> FeatureModel::try_lookup(std::string_view path) const {
  // Names may themselves contain dots ("Child1.1"), so try every split.
  if (auto f = find_feature(path)) return EntityRef{*f};
  if (auto q = find_quality(path)) return EntityRef{*q};
  for (std::size_t dot = path.find('.'); dot != std::string_view::npos;
       dot = path.find('.', dot + 1)) {
    auto head = path.substr(0, dot);
    auto tail = path.substr(dot + 1);
    if (auto a = find_attribute(head, tail)) return EntityRef{*a};
    if (auto m = find_metric(head, tail)) return EntityRef{*m};
  }
  return std::nullopt;
}

EntityRef FeatureModel::lookup(std::string_view path) const {
  if (auto found = try_lookup(path)) return *found;
  throw NotFound(std::string(path));
}

bool FeatureModel::is_ancestor(FeatureId ancestor, FeatureId id) const {
  auto current = feature(id).parent;
  while (current) {
    if (*current == ancestor) return true;
    current = feature(*current).parent;
  }
  return false;
}

std::vector<FeatureId> FeatureModel::subtree(FeatureId id) const {
  // Pre-order ids make every subtree a contiguous range.
  std::vector<FeatureId> out{id};
  for (std::uint32_t i = id.value + 1; i < features_.size(); ++i) {
    if (!is_ancestor(id, FeatureId{i})) break;
    out.push_back(FeatureId{i});
  }
  return out;
}

std::string FeatureModel::describe(AttributeRef ref) const {
  return feature(ref.owner).name + "." + attribute(ref).name;
}

std::string FeatureModel::describe(const AttributeBinding& b) const {
  return describe(b.attribute) + " = " + attribute(b.attribute).values.at(b.value);
}

std::string FeatureModel::describe(MetricRef ref) const {
  return quality(ref.quality).name + "." + metric(ref).name;
}

std::string FeatureModel::describe(const ConstraintObject& object) const {
  return std::visit(
      [this](const auto& o) -> std::string {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, FeatureId>) {
          return feature(o).name;
        } else {
          return describe(o);
        }
      },
      object);
}

std::string FeatureModel::describe(const CrossTreeConstraint& c) const {
  return feature(c.subject).name + " " + std::string(to_string(c.polarity)) + " " +
         describe(c.object);
}

FeatureModel FeatureModel::with_requirement(std::optional<Requirement> requirement,
                                            RequirementSpans spans) const {
  FeatureModel copy = *this;
  copy.requirement_ = std::move(requirement);
  copy.sources_.requirement = std::move(spans);
  return copy;
}

void FeatureModel::index_names() {
  feature_index_.clear();
  quality_index_.clear();
  for (std::uint32_t i = 0; i < features_.size(); ++i) {
    feature_index_.emplace(features_[i].name, FeatureId{i});
  }
  for (std::uint32_t i = 0; i < qualities_.size(); ++i) {
    quality_index_.emplace(qualities_[i].name, QualityId{i});
  }
}

bool operator==(const FeatureModel& a, const FeatureModel& b) {
  return a.name_ == b.name_ && a.features_ == b.features_ && a.qualities_ == b.qualities_ &&
         a.constraints_ == b.constraints_ && a.requirement_ == b.requirement_;
}

}  // namespace qfm
