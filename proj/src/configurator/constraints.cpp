#include <algorithm>

#include "qfm/configurator.hpp"

namespace qfm::config {

std::string_view to_string(ClauseRule rule) {
  switch (rule) {
    case ClauseRule::Root: return "ROOT";
    case ClauseRule::ChildImpliesParent: return "PARENT";
    case ClauseRule::Mandatory: return "MANDATORY";
    case ClauseRule::OrGroup: return "OR_GROUP";
    case ClauseRule::AltAtLeastOne: return "ALT_GROUP";
    case ClauseRule::AltAtMostOne: return "ALT_GROUP";
    case ClauseRule::Requires: return "REQUIRES";
    case ClauseRule::Excludes: return "EXCLUDES";
    case ClauseRule::AttributeAtMostOne: return "ATTRIBUTE_DOMAIN";
  }
  return "ROOT";
}

ConstraintSet::ConstraintSet(const FeatureModel& model)
    : model_(&model), feature_count_(model.feature_count()) {
  variables_.reserve(feature_count_);
  for (std::uint32_t i = 0; i < feature_count_; ++i) {
    variables_.push_back(Variable{VariableKind::Selected, FeatureId{i}, {}});
  }
  for (std::uint32_t i = 0; i < feature_count_; ++i) {
    const auto& attrs = model.feature(FeatureId{i}).attributes;
    for (std::uint32_t a = 0; a < attrs.size(); ++a) {
      AttributeRef ref{FeatureId{i}, a};
      attribute_base_[ref] = static_cast<std::uint32_t>(variables_.size());
      for (std::uint32_t v = 0; v < attrs[a].values.size(); ++v) {
        variables_.push_back(Variable{VariableKind::Binding, FeatureId{i}, AttributeBinding{ref, v}});
      }
    }
  }
}

std::uint32_t ConstraintSet::binding(const AttributeBinding& b) const {
  return attribute_base_.at(b.attribute) + b.value;
}

std::vector<std::uint32_t> ConstraintSet::attribute_variables(AttributeRef attribute) const {
  std::vector<std::uint32_t> out;
  const std::uint32_t base = attribute_base_.at(attribute);
  const auto count = model_->attribute(attribute).values.size();
  for (std::uint32_t v = 0; v < count; ++v) out.push_back(base + v);
  return out;
}

std::string ConstraintSet::describe(Literal literal) const {
  const Variable& v = variable(literal.var);
  std::string text = v.kind == VariableKind::Selected
                         ? "selected(" + model_->feature(v.feature).name + ")"
                         : "binding(" + model_->describe(v.binding) + ")";
  return literal.positive ? text : "not " + text;
}

void ConstraintSet::add_clause(std::vector<Literal> literals, ClauseRule rule,
                               std::string origin) {
  clauses_.push_back(Clause{std::move(literals), rule, std::move(origin)});
}

void ConstraintSet::force(Literal literal) {
  if (is_forced(literal)) return;
  (literal.positive ? forced_true_ : forced_false_).push_back(literal);
}

bool ConstraintSet::is_forced(Literal literal) const {
  const auto& set = literal.positive ? forced_true_ : forced_false_;
  return std::find(set.begin(), set.end(), literal) != set.end();
}

ConstraintSet derive_constraints(const FeatureModel& model) {
  ConstraintSet cs(model);
  auto sel = [&](FeatureId f, bool positive = true) { return cs.selected_literal(f, positive); };
  auto quoted = [&](FeatureId f) { return "`" + model.feature(f).name + "`"; };

  cs.add_clause({sel(model.root())}, ClauseRule::Root,
                "root " + quoted(model.root()) + " is always selected");

  for (FeatureId id : model.preorder_features()) {
    const Feature& f = model.feature(id);
    if (f.parent) {
      cs.add_clause({sel(id, false), sel(*f.parent)}, ClauseRule::ChildImpliesParent,
                    quoted(id) + " is a child of " + quoted(*f.parent));
      if (f.is_mandatory) {
        cs.add_clause({sel(*f.parent, false), sel(id)}, ClauseRule::Mandatory,
                      quoted(id) + " is a mandatory child of " + quoted(*f.parent));
      }
    }
    for (const Group& g : f.groups) {
      std::vector<Literal> at_least_one{sel(id, false)};
      for (FeatureId m : g.members) at_least_one.push_back(sel(m));
      if (g.kind == GroupKind::Or) {
        cs.add_clause(std::move(at_least_one), ClauseRule::OrGroup,
                      "or-group under " + quoted(id) + " needs at least one member");
        continue;
      }
      const std::string origin = "alt-group under " + quoted(id) + " needs exactly one member";
      cs.add_clause(std::move(at_least_one), ClauseRule::AltAtLeastOne, origin);
      for (std::size_t i = 0; i < g.members.size(); ++i) {
        for (std::size_t j = i + 1; j < g.members.size(); ++j) {
          cs.add_clause({sel(g.members[i], false), sel(g.members[j], false)},
                        ClauseRule::AltAtMostOne, origin);
        }
      }
    }
  }

  for (const auto& c : model.constraints()) {
    const std::string origin = model.describe(c);
    const Literal subject_off = sel(c.subject, false);
    const bool require = c.polarity == Polarity::Require;
    const ClauseRule rule = require ? ClauseRule::Requires : ClauseRule::Excludes;

    if (const auto* f = std::get_if<FeatureId>(&c.object)) {
      cs.add_clause({subject_off, sel(*f, require)}, rule, origin);
    } else if (const auto* b = std::get_if<AttributeBinding>(&c.object)) {
      cs.add_clause({subject_off, cs.binding_literal(*b, require)}, rule, origin);
      if (require && b->attribute.owner != c.subject) {
        cs.add_clause({subject_off, sel(b->attribute.owner)}, rule, origin);
      }
    } else {
      const auto& attr = std::get<AttributeRef>(c.object);
      if (require) {
        std::vector<Literal> some_value{subject_off};
        for (std::uint32_t var : cs.attribute_variables(attr)) some_value.push_back({var, true});
        cs.add_clause(std::move(some_value), rule, origin);
      } else {
        for (std::uint32_t var : cs.attribute_variables(attr)) {
          cs.add_clause({subject_off, {var, false}}, rule, origin);
        }
      }
    }
  }

  for (FeatureId id : model.preorder_features()) {
    const auto& attrs = model.feature(id).attributes;
    for (std::uint32_t a = 0; a < attrs.size(); ++a) {
      AttributeRef ref{id, a};
      auto vars = cs.attribute_variables(ref);
      const std::string origin = "`" + model.describe(ref) + "` takes at most one value";
      for (std::size_t i = 0; i < vars.size(); ++i) {
        for (std::size_t j = i + 1; j < vars.size(); ++j) {
          cs.add_clause({{vars[i], false}, {vars[j], false}}, ClauseRule::AttributeAtMostOne,
                        origin);
        }
      }
    }
  }
  return cs;
}

}  // namespace qfm::config
