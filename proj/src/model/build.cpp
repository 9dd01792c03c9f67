#include <cmath>
#include <algorithm>
#include <set>
#include <unordered_set>

#include "common/suggest.hpp"
#include "qfm/decl.hpp"

namespace qfm {

std::string_view to_string(BuildErrorKind kind) {
  switch (kind) {
    case BuildErrorKind::DuplicateName: return "DuplicateName";
    case BuildErrorKind::UnresolvedReference: return "UnresolvedReference";
    case BuildErrorKind::AbstractImplementsMetric: return "AbstractImplementsMetric";
    case BuildErrorKind::ValueOutOfDomain: return "ValueOutOfDomain";
    case BuildErrorKind::InvalidStructure: return "InvalidStructure";
  }
  return "InvalidStructure";
}

std::string_view diagnostic_code(BuildErrorKind kind) {
  switch (kind) {
    case BuildErrorKind::DuplicateName: return codes::kDuplicateName;
    case BuildErrorKind::UnresolvedReference: return codes::kUnresolvedReference;
    case BuildErrorKind::AbstractImplementsMetric: return codes::kAbstractImplementsMetric;
    case BuildErrorKind::ValueOutOfDomain: return codes::kValueOutOfDomain;
    case BuildErrorKind::InvalidStructure: return codes::kInvalidStructure;
  }
  return codes::kInvalidStructure;
}

Diagnostic to_diagnostic(const BuildIssue& issue) {
  return Diagnostic{Severity::Error, std::string(diagnostic_code(issue.kind)), issue.message,
                    issue.span};
}

namespace {
std::string summarize(const std::vector<BuildIssue>& issues) {
  std::string text = "model is invalid";
  for (const auto& issue : issues) {
    text += "\n  " + std::string(to_string(issue.kind)) + ": " + issue.message;
  }
  return text;
}
}  // namespace

ModelBuildError::ModelBuildError(std::vector<BuildIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

class ModelAssembler {
 public:
  explicit ModelAssembler(const ModelDecl& decl) : decl_(decl) {
    model_.name_ = decl.name.name;
    model_.sources_.file = decl.file;
  }

  BuildResult run() {
    place_feature(decl_.root, std::nullopt);
    model_.index_names();
    collect_feature_names();
    build_qualities();
    build_constraints();
    model_.index_names();

    if (decl_.requirement) {
      auto req = try_build_requirement(model_, *decl_.requirement);
      issues_.insert(issues_.end(), req.issues.begin(), req.issues.end());
      model_.requirement_ = std::move(req.requirement);
      model_.sources_.requirement = std::move(req.spans);
    }

    BuildResult result;
    result.issues = std::move(issues_);
    if (result.issues.empty()) result.model = std::move(model_);
    return result;
  }

 private:
  void report(BuildErrorKind kind, const NameRef& ref, std::string message) {
    issues_.push_back(BuildIssue{kind, ref.name, ref.span, std::move(message)});
  }

  FeatureId place_feature(const FeatureDecl& decl, std::optional<FeatureId> parent) {
    const FeatureId id{static_cast<std::uint32_t>(model_.features_.size())};
    if (!feature_names_.insert(decl.name.name).second) {
      report(BuildErrorKind::DuplicateName, decl.name,
             "feature `" + decl.name.name + "` is declared more than once");
    }

    Feature f;
    f.name = decl.name.name;
    f.is_abstract = decl.is_abstract;
    f.is_mandatory = decl.is_mandatory;
    f.is_hidden = decl.is_hidden;
    f.parent = parent;

    std::set<std::string> attribute_names;
    for (const auto& attr : decl.attributes) {
      if (!attribute_names.insert(attr.name.name).second) {
        report(BuildErrorKind::DuplicateName, attr.name,
               "feature `" + f.name + "` declares attribute `" + attr.name.name + "` twice");
      }
      if (attr.values.empty()) {
        report(BuildErrorKind::InvalidStructure, attr.name,
               "attribute `" + attr.name.name + "` has no values");
      }
      Attribute a{attr.name.name, {}};
      for (const auto& value : attr.values) {
        if (value.name.empty()) {
          report(BuildErrorKind::InvalidStructure, value,
                 "attribute `" + attr.name.name + "` has an empty value");
        }
        if (a.value_index(value.name)) {
          report(BuildErrorKind::DuplicateName, value,
                 "attribute `" + attr.name.name + "` lists value `" + value.name + "` twice");
          continue;
        }
        a.values.push_back(value.name);
      }
      f.attributes.push_back(std::move(a));
    }

    model_.features_.push_back(std::move(f));
    model_.sources_.features.push_back(decl.name.span);

    std::vector<FeatureId> plain;
    for (const auto& child : decl.children) plain.push_back(place_feature(child, id));
    std::vector<Group> groups;
    for (const auto& group_decl : decl.groups) {
      if (group_decl.members.size() < 2) {
        report(BuildErrorKind::InvalidStructure, NameRef{decl.name.name, group_decl.span},
               "group under `" + decl.name.name + "` needs at least two members");
      }
      Group g{group_decl.kind, {}};
      for (const auto& member : group_decl.members) g.members.push_back(place_feature(member, id));
      groups.push_back(std::move(g));
    }
    model_.features_[id.value].plain_children = std::move(plain);
    model_.features_[id.value].groups = std::move(groups);
    return id;
  }

  void collect_feature_names() {
    for (const auto& f : model_.features_) all_feature_names_.push_back(f.name);
  }

  std::optional<FeatureId> resolve_feature(const NameRef& ref) {
    if (auto id = model_.find_feature(ref.name)) return id;
    report(BuildErrorKind::UnresolvedReference, ref,
           "unknown feature `" + ref.name + "`" +
               detail::did_you_mean(ref.name, all_feature_names_));
    return std::nullopt;
  }

  void build_qualities() {
    std::vector<std::string> quality_names;
    std::set<std::string> seen;
    for (const auto& q : decl_.qualities) {
      if (!seen.insert(q.name.name).second) {
        report(BuildErrorKind::DuplicateName, q.name,
               "quality `" + q.name.name + "` is declared more than once");
      }
      QualityProperty p;
      p.name = q.name.name;
      p.kind = q.kind;
      p.nature = q.nature.value_or(default_nature(q.kind));
      p.variant_tag = q.variant_tag;
      model_.qualities_.push_back(std::move(p));
      model_.sources_.qualities.push_back(q.name.span);
      quality_names.push_back(q.name.name);
    }
    model_.index_names();

    for (std::uint32_t qi = 0; qi < decl_.qualities.size(); ++qi) {
      const QualityDecl& q = decl_.qualities[qi];
      QualityProperty& p = model_.qualities_[qi];

      for (const auto& ref : q.implemented_by) {
        auto id = resolve_feature(ref);
        if (!id) continue;
        if (std::find(p.implemented_by.begin(), p.implemented_by.end(), *id) !=
            p.implemented_by.end()) {
          report(BuildErrorKind::InvalidStructure, ref,
                 "`" + ref.name + "` is listed twice in implemented_by of `" + p.name + "`");
          continue;
        }
        p.implemented_by.push_back(*id);
      }
      for (const auto& inv : q.involves) {
        auto id = resolve_feature(inv.feature);
        if (!id) continue;
        bool duplicate = std::any_of(p.involvements.begin(), p.involvements.end(),
                                     [&](const Involvement& x) { return x.feature == *id; });
        if (duplicate) {
          report(BuildErrorKind::InvalidStructure, inv.feature,
                 "`" + inv.feature.name + "` is involved twice in `" + p.name + "`");
          continue;
        }
        if (std::find(p.implemented_by.begin(), p.implemented_by.end(), *id) !=
            p.implemented_by.end()) {
          report(BuildErrorKind::InvalidStructure, inv.feature,
                 "`" + inv.feature.name + "` both implements and is involved in `" + p.name +
                     "`");
          continue;
        }
        p.involvements.push_back(Involvement{*id, inv.level});
      }
      for (const auto& ref : q.influenced_by) {
        auto other = model_.find_quality(ref.name);
        if (!other) {
          report(BuildErrorKind::UnresolvedReference, ref,
                 "unknown quality `" + ref.name + "`" + detail::did_you_mean(ref.name, quality_names));
          continue;
        }
        if (other->value == qi) {
          report(BuildErrorKind::InvalidStructure, ref,
                 "quality `" + p.name + "` cannot be influenced by itself");
          continue;
        }
        if (std::find(p.influenced_by.begin(), p.influenced_by.end(), *other) !=
            p.influenced_by.end()) {
          report(BuildErrorKind::InvalidStructure, ref,
                 "`" + ref.name + "` is listed twice in influenced_by of `" + p.name + "`");
          continue;
        }
        p.influenced_by.push_back(*other);
      }

      std::set<std::string> metric_names;
      for (const auto& m : q.metrics) {
        if (!metric_names.insert(m.name.name).second) {
          report(BuildErrorKind::DuplicateName, m.name,
                 "quality `" + p.name + "` declares metric `" + m.name.name + "` twice");
        }
        auto implementer = resolve_feature(m.implementer);
        if (!implementer) continue;
        if (model_.feature(*implementer).is_abstract) {
          report(BuildErrorKind::AbstractImplementsMetric, m.implementer,
                 "abstract feature `" + m.implementer.name + "` cannot implement metric `" +
                     m.name.name + "`");
          continue;
        }
        p.metrics.push_back(Metric{m.name.name, QualityId{qi}, *implementer});
      }
    }
  }

  void build_constraints() {
    for (const auto& c : decl_.constraints) {
      auto subject = resolve_feature(c.subject);
      auto owner = resolve_feature(c.object.feature);
      if (!subject || !owner) continue;

      CrossTreeConstraint constraint{*subject, c.polarity, *owner};
      if (!c.object.attribute) {
        if (*subject == *owner) {
          report(BuildErrorKind::InvalidStructure, c.subject,
                 "`" + c.subject.name + "` cannot " +
                     (c.polarity == Polarity::Require ? "require" : "exclude") + " itself");
          continue;
        }
      } else {
        auto attr = model_.find_attribute(c.object.feature.name, c.object.attribute->name);
        if (!attr) {
          std::vector<std::string> names;
          for (const auto& a : model_.feature(*owner).attributes) names.push_back(a.name);
          report(BuildErrorKind::UnresolvedReference, *c.object.attribute,
                 "feature `" + c.object.feature.name + "` has no attribute `" +
                     c.object.attribute->name + "`" +
                     detail::did_you_mean(c.object.attribute->name, names));
          continue;
        }
        if (!c.object.value) {
          constraint.object = *attr;
        } else {
          const Attribute& a = model_.attribute(*attr);
          auto value = a.value_index(c.object.value->name);
          if (!value) {
            report(BuildErrorKind::ValueOutOfDomain, *c.object.value,
                   "`" + c.object.value->name + "` is not a value of " + model_.describe(*attr) +
                       detail::did_you_mean(c.object.value->name, a.values));
            continue;
          }
          constraint.object = AttributeBinding{*attr, *value};
        }
      }
      model_.constraints_.push_back(constraint);
      model_.sources_.constraints.push_back(c.span);
    }
  }

  const ModelDecl& decl_;
  FeatureModel model_;
  std::vector<BuildIssue> issues_;
  std::unordered_set<std::string> feature_names_;
  std::vector<std::string> all_feature_names_;
};

BuildResult try_build_model(const ModelDecl& decl) { return ModelAssembler(decl).run(); }

FeatureModel build_model(const ModelDecl& decl) {
  auto result = try_build_model(decl);
  if (!result.model) throw ModelBuildError(std::move(result.issues));
  return std::move(*result.model);
}

RequirementBuildResult try_build_requirement(const FeatureModel& model,
                                             const RequirementDecl& decl) {
  RequirementBuildResult out;
  auto report = [&](BuildErrorKind kind, const NameRef& ref, std::string message) {
    out.issues.push_back(BuildIssue{kind, ref.name, ref.span, std::move(message)});
  };
  std::vector<std::string> feature_names;
  for (const auto& f : model.features()) feature_names.push_back(f.name);
  std::vector<std::string> quality_names;
  for (const auto& q : model.qualities()) quality_names.push_back(q.name);

  Requirement req;
  req.task = decl.task.name;
  out.spans.block = decl.span;

  for (const auto& spec : decl.specs) {
    auto owner = model.find_feature(spec.feature.name);
    if (!owner) {
      report(BuildErrorKind::UnresolvedReference, spec.feature,
             "unknown feature `" + spec.feature.name + "`" +
                 detail::did_you_mean(spec.feature.name, feature_names));
      continue;
    }
    auto attr = model.find_attribute(spec.feature.name, spec.attribute.name);
    if (!attr) {
      std::vector<std::string> names;
      for (const auto& a : model.feature(*owner).attributes) names.push_back(a.name);
      report(BuildErrorKind::UnresolvedReference, spec.attribute,
             "feature `" + spec.feature.name + "` has no attribute `" + spec.attribute.name +
                 "`" + detail::did_you_mean(spec.attribute.name, names));
      continue;
    }
    const Attribute& a = model.attribute(*attr);
    auto value = a.value_index(spec.value.name);
    if (!value) {
      report(BuildErrorKind::ValueOutOfDomain, spec.value,
             "`" + spec.value.name + "` is not a value of " + model.describe(*attr) +
                 detail::did_you_mean(spec.value.name, a.values));
      continue;
    }
    if (req.bound_value(*attr)) {
      report(BuildErrorKind::DuplicateName, spec.attribute,
             "requirement sets " + model.describe(*attr) + " more than once");
      continue;
    }
    req.attribute_specs.push_back(AttributeSpecification{*attr, *value});
    out.spans.attribute_specs.push_back(spec.span);
  }

  for (const auto& qr_decl : decl.quality_reqs) {
    auto property = model.find_quality(qr_decl.quality.name);
    if (!property) {
      report(BuildErrorKind::UnresolvedReference, qr_decl.quality,
             "unknown quality `" + qr_decl.quality.name + "`" +
                 detail::did_you_mean(qr_decl.quality.name, quality_names));
      continue;
    }
    if (req.find(*property)) {
      report(BuildErrorKind::DuplicateName, qr_decl.quality,
             "quality `" + qr_decl.quality.name + "` is required more than once");
      continue;
    }
    QualityRequirement qr{*property, {}, qr_decl.level};
    std::vector<SourceSpan> threshold_spans;
    for (const auto& t : qr_decl.thresholds) {
      // Metrics are looked up in the required property first. A metric of
      // another property still resolves so that validation can flag the
      // mismatch with a precise message.
      std::optional<MetricRef> metric = model.find_metric(qr_decl.quality.name, t.metric.name);
      if (!metric) {
        std::vector<MetricRef> elsewhere;
        for (std::uint32_t qi = 0; qi < model.qualities().size(); ++qi) {
          if (auto m = model.find_metric(model.quality(QualityId{qi}).name, t.metric.name)) {
            elsewhere.push_back(*m);
          }
        }
        if (elsewhere.size() == 1) metric = elsewhere.front();
      }
      if (!metric) {
        std::vector<std::string> names;
        for (const auto& m : model.quality(*property).metrics) names.push_back(m.name);
        report(BuildErrorKind::UnresolvedReference, t.metric,
               "quality `" + qr_decl.quality.name + "` has no metric `" + t.metric.name + "`" +
                   detail::did_you_mean(t.metric.name, names));
        continue;
      }
      if (!std::isfinite(t.value)) {
        report(BuildErrorKind::InvalidStructure, t.metric,
               "threshold on `" + t.metric.name + "` is not a finite number");
        continue;
      }
      qr.thresholds.push_back(Threshold{*metric, t.comparator, t.value});
      threshold_spans.push_back(t.span);
    }
    req.quality_reqs.push_back(std::move(qr));
    out.spans.quality_reqs.push_back(qr_decl.span);
    out.spans.thresholds.push_back(std::move(threshold_spans));
  }

  if (out.issues.empty()) out.requirement = std::move(req);
  return out;
}

}  // namespace qfm
