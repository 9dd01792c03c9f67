// Direct rule checking over selection sets. Deliberately independent of
// constraints.cpp and search.cpp so the two routes can be compared.

#include <map>
#include <set>

#include "configurator/closure.hpp"
#include "qfm/configurator.hpp"

namespace qfm::config {

namespace detail {

void add_invisible_closure(const FeatureModel& model, std::vector<bool>& selected) {
  auto add = [&](FeatureId f) {
    if (selected[f.value] || model.feature(f).is_visible()) return false;
    selected[f.value] = true;
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t i = 0; i < model.feature_count(); ++i) {
      if (!selected[i]) continue;
      const Feature& f = model.feature(FeatureId{i});
      if (f.parent) changed |= add(*f.parent);
      for (FeatureId c : f.plain_children) {
        if (model.feature(c).is_mandatory) changed |= add(c);
      }
      for (const auto& g : f.groups) {
        for (FeatureId c : g.members) {
          if (model.feature(c).is_mandatory) changed |= add(c);
        }
      }
    }
    for (const auto& c : model.constraints()) {
      if (c.polarity != Polarity::Require || !selected[c.subject.value]) continue;
      if (const auto* f = std::get_if<FeatureId>(&c.object)) {
        changed |= add(*f);
      } else if (const auto* b = std::get_if<AttributeBinding>(&c.object)) {
        changed |= add(b->attribute.owner);
      }
    }
  }
}

}  // namespace detail

namespace {

class Checker {
 public:
  Checker(const FeatureModel& model, const std::optional<Requirement>& requirement)
      : model_(model), requirement_(requirement) {
    for (std::uint32_t i = 0; i < model.feature_count(); ++i) {
      const auto& attrs = model.feature(FeatureId{i}).attributes;
      for (std::uint32_t a = 0; a < attrs.size(); ++a) {
        attribute_ids_[AttributeRef{FeatureId{i}, a}] = attributes_.size();
        attributes_.push_back(AttributeRef{FeatureId{i}, a});
      }
    }
  }

  /// True when the selection satisfies every rule. With `out`, every
  /// violation is appended; without it the check stops at the first one.
  bool check(const std::vector<bool>& sel, std::vector<Violation>* out) const {
    Run run{out};
    check_tree(sel, run) && check_constraints(sel, run) && check_bindings(sel, run) &&
        check_requirement(sel, run);
    return run.ok;
  }

 private:
  struct Run {
    std::vector<Violation>* out;
    bool ok = true;

    // Returns whether checking should go on.
    bool fail(std::string rule, std::vector<EntityRef> entities, std::string message) {
      ok = false;
      if (!out) return false;
      out->push_back(Violation{std::move(rule), std::move(entities), std::move(message)});
      return true;
    }
  };

  std::string q(FeatureId f) const { return "`" + model_.feature(f).name + "`"; }

  bool check_tree(const std::vector<bool>& sel, Run& run) const {
    const FeatureId root = model_.root();
    if (!sel[root.value] && !run.fail("ROOT", {root}, "root " + q(root) + " is not selected")) {
      return false;
    }
    for (std::uint32_t i = 0; i < model_.feature_count(); ++i) {
      const FeatureId id{i};
      const Feature& f = model_.feature(id);
      if (!sel[i]) continue;
      if (f.parent && !sel[f.parent->value] &&
          !run.fail("PARENT", {id, *f.parent},
                    q(id) + " is selected but its parent " + q(*f.parent) + " is not")) {
        return false;
      }
      auto mandatory = [&](FeatureId c) {
        if (model_.feature(c).is_mandatory && !sel[c.value]) {
          return run.fail("MANDATORY", {id, c},
                          "mandatory " + q(c) + " is missing under " + q(id));
        }
        return true;
      };
      for (FeatureId c : f.plain_children) {
        if (!mandatory(c)) return false;
      }
      for (const auto& g : f.groups) {
        std::size_t count = 0;
        for (FeatureId c : g.members) {
          if (!mandatory(c)) return false;
          count += sel[c.value] ? 1 : 0;
        }
        if (g.kind == GroupKind::Or && count == 0 &&
            !run.fail("OR_GROUP", {id}, "or-group under " + q(id) + " has no selected member")) {
          return false;
        }
        if (g.kind == GroupKind::Alt && count != 1 &&
            !run.fail("ALT_GROUP", {id},
                      "alt-group under " + q(id) + " has " + std::to_string(count) +
                          " selected members instead of one")) {
          return false;
        }
      }
    }
    return true;
  }

  bool check_constraints(const std::vector<bool>& sel, Run& run) const {
    for (const auto& c : model_.constraints()) {
      const auto* f = std::get_if<FeatureId>(&c.object);
      if (!f || !sel[c.subject.value]) continue;
      if (c.polarity == Polarity::Require && !sel[f->value] &&
          !run.fail("REQUIRES", {c.subject, *f}, model_.describe(c) + " is violated")) {
        return false;
      }
      if (c.polarity == Polarity::Exclude && sel[f->value] &&
          !run.fail("EXCLUDES", {c.subject, *f}, model_.describe(c) + " is violated")) {
        return false;
      }
    }
    return true;
  }

  bool check_bindings(const std::vector<bool>& sel, Run& run) const {
    struct Bound {
      std::optional<std::uint32_t> value;
      bool from_requirement = false;
    };
    std::vector<Bound> bound(attributes_.size());
    auto slot = [&](AttributeRef a) -> Bound& { return bound[attribute_ids_.at(a)]; };

    if (requirement_) {
      for (const auto& spec : requirement_->attribute_specs) {
        slot(spec.attribute) = Bound{spec.value, true};
      }
    }

    for (const auto& c : model_.constraints()) {
      const auto* b = std::get_if<AttributeBinding>(&c.object);
      if (!b || c.polarity != Polarity::Require || !sel[c.subject.value]) continue;
      const FeatureId owner = b->attribute.owner;
      if (!sel[owner.value] &&
          !run.fail("REQUIRES", {c.subject, owner},
                    model_.describe(c) + " but " + q(owner) + " is not selected")) {
        return false;
      }
      Bound& current = slot(b->attribute);
      if (!current.value) {
        current.value = b->value;
      } else if (*current.value != b->value) {
        const std::string rule = current.from_requirement ? "CONSTRAINT_CONFLICT" : "BINDING_CONFLICT";
        const std::string msg = model_.describe(c) + " conflicts with " +
                                model_.describe(AttributeBinding{b->attribute, *current.value});
        if (!run.fail(rule, {c.subject, b->attribute}, msg)) return false;
      }
    }

    for (const auto& c : model_.constraints()) {
      if (!sel[c.subject.value]) continue;
      if (const auto* b = std::get_if<AttributeBinding>(&c.object)) {
        if (c.polarity != Polarity::Exclude) continue;
        const Bound& current = slot(b->attribute);
        if (current.value == b->value &&
            !run.fail(current.from_requirement ? "CONSTRAINT_CONFLICT" : "EXCLUDES",
                      {c.subject, b->attribute}, model_.describe(c) + " is violated")) {
          return false;
        }
      } else if (const auto* a = std::get_if<AttributeRef>(&c.object)) {
        if (!check_unvalued(sel, c, *a, slot(*a).value.has_value(), run)) return false;
      }
    }
    return true;
  }

  bool check_unvalued(const std::vector<bool>& sel, const CrossTreeConstraint& c, AttributeRef a,
                      bool is_bound, Run& run) const {
    const bool fixed = requirement_ && requirement_->bound_value(a);
    if (c.polarity == Polarity::Require) {
      if (requirement_) {
        if (fixed) return true;
        return run.fail("CONSTRAINT_CONFLICT", {c.subject, a},
                        model_.describe(c) + " but the requirement does not set it");
      }
      if (is_bound || has_free_value(sel, a)) return true;
      return run.fail("REQUIRES", {c.subject, a},
                      model_.describe(c) + " but every value is excluded");
    }
    if (fixed) {
      return run.fail("CONSTRAINT_CONFLICT", {c.subject, a},
                      model_.describe(c) + " but the requirement sets it");
    }
    if (is_bound || required_elsewhere(sel, a)) {
      return run.fail("EXCLUDES", {c.subject, a}, model_.describe(c) + " but it is bound");
    }
    return true;
  }

  // Some value of `a` is not ruled out by a selected feature.
  bool has_free_value(const std::vector<bool>& sel, AttributeRef a) const {
    const auto count = model_.attribute(a).values.size();
    for (std::uint32_t v = 0; v < count; ++v) {
      bool excluded = false;
      for (const auto& c : model_.constraints()) {
        if (c.polarity != Polarity::Exclude || !sel[c.subject.value]) continue;
        if (const auto* b = std::get_if<AttributeBinding>(&c.object)) {
          excluded |= b->attribute == a && b->value == v;
        } else if (const auto* r = std::get_if<AttributeRef>(&c.object)) {
          excluded |= *r == a;
        }
      }
      if (!excluded) return true;
    }
    return false;
  }

  bool required_elsewhere(const std::vector<bool>& sel, AttributeRef a) const {
    for (const auto& c : model_.constraints()) {
      if (c.polarity != Polarity::Require || !sel[c.subject.value]) continue;
      if (const auto* r = std::get_if<AttributeRef>(&c.object); r && *r == a) return true;
    }
    return false;
  }

  bool check_requirement(const std::vector<bool>& sel, Run& run) const {
    if (!requirement_) return true;
    const Requirement& r = *requirement_;
    for (const auto& spec : r.attribute_specs) {
      const FeatureId owner = spec.attribute.owner;
      if (!sel[owner.value] &&
          !run.fail("ATTR_SPEC", {owner, spec.attribute},
                    "requirement sets " + model_.describe(spec.binding()) + " but " + q(owner) +
                        " is not selected")) {
        return false;
      }
    }
    for (std::uint32_t qi = 0; qi < model_.qualities().size(); ++qi) {
      const QualityId qid{qi};
      const auto& quality = model_.quality(qid);
      const bool required = r.find(qid) != nullptr;
      for (FeatureId f : quality.implemented_by) {
        if (required && !sel[f.value] &&
            !run.fail("QUALITY_IMPLEMENTER", {f, qid},
                      q(f) + " implements required quality `" + quality.name + "` but is not selected")) {
          return false;
        }
        if (!required && sel[f.value] &&
            !run.fail("UNREQUESTED_QUALITY", {f, qid},
                      q(f) + " implements quality `" + quality.name + "`, which is not required")) {
          return false;
        }
      }
      for (std::uint32_t mi = 0; mi < quality.metrics.size(); ++mi) {
        const MetricRef m{qid, mi};
        const FeatureId f = quality.metrics[mi].implementer;
        const bool thresholded = r.has_threshold_on(m);
        if (thresholded && !sel[f.value] &&
            !run.fail("THRESHOLD_METRIC", {f, m},
                      q(f) + " implements " + model_.describe(m) +
                          ", which has a threshold, but is not selected")) {
          return false;
        }
        if (!thresholded && sel[f.value] &&
            !run.fail("UNREQUESTED_METRIC", {f, m},
                      q(f) + " implements " + model_.describe(m) + ", which has no threshold")) {
          return false;
        }
      }
    }
    return true;
  }

  const FeatureModel& model_;
  const std::optional<Requirement>& requirement_;
  std::vector<AttributeRef> attributes_;
  std::map<AttributeRef, std::size_t> attribute_ids_;
};

constexpr std::size_t kCompletionLimit = 20;

}  // namespace

TooLarge::TooLarge(std::size_t feature_count)
    : std::length_error("exhaustive search over " + std::to_string(feature_count) +
                        " features is too large"),
      feature_count_(feature_count) {}

std::vector<Violation> check_selection(const FeatureModel& model,
                                       const std::optional<Requirement>& requirement,
                                       const std::vector<bool>& selected) {
  std::vector<bool> sel = selected;
  sel.resize(model.feature_count(), false);
  std::vector<Violation> out;
  Checker(model, requirement).check(sel, &out);
  return out;
}

std::vector<Violation> verify_configuration(const FeatureModel& model,
                                            const std::optional<Requirement>& requirement,
                                            const Configuration& config) {
  std::vector<Violation> out;
  std::vector<bool> sel(model.feature_count(), false);
  for (FeatureId f : config.selected) {
    if (f.value >= model.feature_count()) {
      out.push_back({"UNKNOWN_FEATURE", {}, "feature #" + std::to_string(f.value) + " does not exist"});
    } else if (!model.feature(f).is_visible()) {
      out.push_back({"NOT_VISIBLE", {f},
                     "`" + model.feature(f).name + "` is abstract or hidden and cannot be listed"});
    } else {
      sel[f.value] = true;
    }
  }
  if (!out.empty()) return out;

  detail::add_invisible_closure(model, sel);
  std::vector<FeatureId> free;
  for (std::uint32_t i = 0; i < model.feature_count(); ++i) {
    if (!sel[i] && !model.feature(FeatureId{i}).is_visible()) free.push_back(FeatureId{i});
  }
  if (free.size() > kCompletionLimit) throw TooLarge(free.size());

  const Checker checker(model, requirement);
  const std::uint64_t completions = std::uint64_t{1} << free.size();
  auto complete = [&](std::uint64_t mask) {
    std::vector<bool> s = sel;
    for (std::size_t i = 0; i < free.size(); ++i) s[free[i].value] = (mask >> i) & 1;
    return s;
  };
  for (std::uint64_t mask = 0; mask < completions; ++mask) {
    if (checker.check(complete(mask), nullptr)) return {};
  }
  std::optional<std::vector<Violation>> best;
  for (std::uint64_t mask = 0; mask < completions; ++mask) {
    std::vector<Violation> v;
    checker.check(complete(mask), &v);
    if (!best || v.size() < best->size()) best = std::move(v);
  }
  return *best;
}

void for_each_valid_selection(const FeatureModel& model,
                              const std::optional<Requirement>& requirement,
                              const std::function<void(const std::vector<bool>&)>& visit) {
  const std::size_t n = model.feature_count();
  if (n > kBruteForceLimit) throw TooLarge(n);
  const Checker checker(model, requirement);
  std::vector<bool> sel(n, false);
  sel[model.root().value] = true;  // anything else fails ROOT
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    for (std::size_t i = 1; i < n; ++i) sel[i] = (mask >> (i - 1)) & 1;
    if (checker.check(sel, nullptr)) visit(sel);
  }
}

std::vector<Configuration> brute_force_enumerate(const PrunedProblem& problem) {
  const FeatureModel& model = *problem.model;
  const auto order = visible_features(model);
  std::set<std::vector<bool>> seen;
  for_each_valid_selection(model, problem.requirement, [&](const std::vector<bool>& sel) {
    std::vector<bool> projected;
    projected.reserve(order.size());
    for (FeatureId f : order) projected.push_back(sel[f.value]);
    seen.insert(std::move(projected));
  });
  std::vector<Configuration> out;
  for (const auto& bits : seen) {
    Configuration c;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (bits[i]) c.selected.push_back(order[i]);
    }
    c.bindings = effective_bindings(model, problem.requirement, c.selected);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace qfm::config
