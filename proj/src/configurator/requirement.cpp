#include <set>

#include "configurator/search.hpp"
#include "qfm/configurator.hpp"

namespace qfm::config {

std::string_view to_string(ReasonCode code) {
  switch (code) {
    case ReasonCode::MandatoryRoot: return "MANDATORY_ROOT";
    case ReasonCode::AttrSpec: return "ATTR_SPEC";
    case ReasonCode::QualityImplementer: return "QUALITY_IMPLEMENTER";
    case ReasonCode::ThresholdMetric: return "THRESHOLD_METRIC";
    case ReasonCode::UnrequestedQuality: return "UNREQUESTED_QUALITY";
    case ReasonCode::UnrequestedMetric: return "UNREQUESTED_METRIC";
    case ReasonCode::ConstraintConflict: return "CONSTRAINT_CONFLICT";
  }
  return "MANDATORY_ROOT";
}

const Provenance* PrunedProblem::reason(Literal literal) const {
  auto it = provenance.find(literal);
  return it == provenance.end() ? nullptr : &it->second;
}

namespace {

std::string render_chain(const std::vector<ChainStep>& chain) {
  std::string out;
  for (const auto& step : chain) {
    out += "    " + step.literal + " [" + step.reason + "] " + step.detail + "\n";
  }
  return out;
}

// Builds derivation chains from the forced-literal provenance and, after
// propagation, from the reason clauses recorded by the search engine.
class Explainer {
 public:
  Explainer(const PrunedProblem& problem, const detail::SearchEngine* engine)
      : problem_(problem), engine_(engine) {}

  std::vector<ChainStep> explain(Literal literal) {
    std::vector<ChainStep> chain;
    std::set<Literal> seen;
    walk(literal, chain, seen);
    return chain;
  }

  // Chain for a literal that the clause demands while all of its other
  // literals are false.
  std::vector<ChainStep> explain_by_clause(Literal literal, int clause) {
    std::vector<ChainStep> chain;
    std::set<Literal> seen{literal};
    const Clause& c = problem_.base.clauses().at(clause);
    chain.push_back({problem_.base.describe(literal), std::string(to_string(c.rule)), c.origin});
    for (Literal other : c.literals) {
      if (other.var != literal.var) walk(~other, chain, seen);
    }
    return chain;
  }

 private:
  void walk(Literal literal, std::vector<ChainStep>& chain, std::set<Literal>& seen) {
    if (!seen.insert(literal).second) return;
    const std::string text = problem_.base.describe(literal);
    if (const Provenance* p = problem_.reason(literal)) {
      chain.push_back({text, std::string(to_string(p->code)), p->detail});
      for (Literal a : p->antecedents) walk(a, chain, seen);
      return;
    }
    if (engine_ && engine_->is_true(literal)) {
      const int r = engine_->reason(literal.var);
      if (r >= 0) {
        const Clause& c = problem_.base.clauses().at(r);
        chain.push_back({text, std::string(to_string(c.rule)), c.origin});
        for (Literal other : c.literals) {
          if (other.var != literal.var) walk(~other, chain, seen);
        }
        return;
      }
    }
    chain.push_back({text, "ASSUMED", "no recorded reason"});
  }

  const PrunedProblem& problem_;
  const detail::SearchEngine* engine_;
};

[[noreturn]] void throw_unsatisfiable(const PrunedProblem& problem, Literal literal,
                                      std::vector<ChainStep> when_true,
                                      std::vector<ChainStep> when_false) {
  Literal positive{literal.var, true};
  throw RequirementUnsatisfiable(problem.base.describe(positive), std::move(when_true),
                                 std::move(when_false));
}

class RequirementApplier {
 public:
  explicit RequirementApplier(PrunedProblem& problem) : p_(problem), model_(*problem.model) {}

  void run(const Requirement& r) {
    const Provenance root{ReasonCode::MandatoryRoot,
                          "`" + model_.feature(model_.root()).name + "` is the root feature", {}};
    force(sel(model_.root()), root);

    for (const auto& spec : r.attribute_specs) {
      const Literal bound = p_.base.binding_literal(spec.binding());
      const std::string text = model_.describe(spec.binding());
      force(bound, {ReasonCode::AttrSpec, "requirement sets " + text, {}});
      force(sel(spec.attribute.owner),
            {ReasonCode::AttrSpec,
             "`" + model_.feature(spec.attribute.owner).name + "` owns " + text, {bound}});
    }

    for (const auto& qr : r.quality_reqs) {
      const auto& q = model_.quality(qr.property);
      for (FeatureId f : q.implemented_by) {
        force(sel(f), {ReasonCode::QualityImplementer,
                       "`" + model_.feature(f).name + "` implements required quality `" + q.name +
                           "`",
                       {}});
      }
      for (const auto& t : qr.thresholds) {
        const Metric& m = model_.metric(t.metric);
        force(sel(m.implementer),
              {ReasonCode::ThresholdMetric,
               "`" + model_.feature(m.implementer).name + "` implements metric " +
                   model_.describe(t.metric) + ", which has a threshold",
               {}});
      }
    }

    for (std::uint32_t qi = 0; qi < model_.qualities().size(); ++qi) {
      const QualityId qid{qi};
      const auto& q = model_.quality(qid);
      if (!r.find(qid)) {
        for (FeatureId f : q.implemented_by) {
          force(sel(f, false), {ReasonCode::UnrequestedQuality,
                                "`" + model_.feature(f).name + "` implements quality `" + q.name +
                                    "`, which is not required",
                                {}});
        }
      }
      for (std::uint32_t mi = 0; mi < q.metrics.size(); ++mi) {
        const MetricRef mref{qid, mi};
        if (r.has_threshold_on(mref)) continue;
        const FeatureId f = q.metrics[mi].implementer;
        force(sel(f, false), {ReasonCode::UnrequestedMetric,
                              "`" + model_.feature(f).name + "` implements metric " +
                                  model_.describe(mref) + ", which has no threshold",
                              {}});
      }
    }

    for (const auto& c : model_.constraints()) conflict(r, c);
  }

 private:
  Literal sel(FeatureId f, bool positive = true) const {
    return p_.base.selected_literal(f, positive);
  }

  void force(Literal literal, Provenance why) {
    if (p_.base.is_forced(~literal)) {
      Explainer ex(p_, nullptr);
      std::vector<ChainStep> here{{p_.base.describe(literal), std::string(to_string(why.code)),
                                   why.detail}};
      for (Literal a : why.antecedents) {
        auto sub = ex.explain(a);
        here.insert(here.end(), sub.begin(), sub.end());
      }
      auto there = ex.explain(~literal);
      if (literal.positive) throw_unsatisfiable(p_, literal, std::move(here), std::move(there));
      throw_unsatisfiable(p_, literal, std::move(there), std::move(here));
    }
    if (p_.base.is_forced(literal)) return;
    p_.base.force(literal);
    p_.provenance.emplace(literal, std::move(why));
  }

  void conflict(const Requirement& r, const CrossTreeConstraint& c) {
    const std::string subject = "`" + model_.feature(c.subject).name + "`";
    const bool require = c.polarity == Polarity::Require;
    if (const auto* b = std::get_if<AttributeBinding>(&c.object)) {
      const auto w = r.bound_value(b->attribute);
      if (!w) return;
      const AttributeBinding fixed{b->attribute, *w};
      const std::string clash = subject + (require ? " requires " : " excludes ") +
                                model_.describe(*b) + " but the requirement sets " +
                                model_.describe(fixed);
      if ((require && *w != b->value) || (!require && *w == b->value)) {
        force(sel(c.subject, false),
              {ReasonCode::ConstraintConflict, clash, {p_.base.binding_literal(fixed)}});
      }
    } else if (const auto* a = std::get_if<AttributeRef>(&c.object)) {
      const auto w = r.bound_value(*a);
      if (require && !w) {
        force(sel(c.subject, false),
              {ReasonCode::ConstraintConflict,
               subject + " requires " + model_.describe(*a) + ", which the requirement does not set",
               {}});
      } else if (!require && w) {
        force(sel(c.subject, false),
              {ReasonCode::ConstraintConflict,
               subject + " excludes " + model_.describe(*a) + ", which the requirement sets",
               {p_.base.binding_literal({*a, *w})}});
      }
    }
  }

  PrunedProblem& p_;
  const FeatureModel& model_;
};

void propagate_forced(const PrunedProblem& problem) {
  detail::SearchEngine engine(problem.base);
  std::vector<Literal> forced = problem.base.forced_true();
  forced.insert(forced.end(), problem.base.forced_false().begin(),
                problem.base.forced_false().end());
  bool ok = true;
  for (Literal l : forced) ok = ok && engine.assign(l, detail::SearchEngine::kForced);
  if (ok && engine.initialize()) return;

  const int c = engine.conflict();
  Explainer ex(problem, &engine);
  const Clause& clause = problem.base.clauses().at(c);
  // The literal of the conflict clause that was assigned last.
  Literal last = clause.literals.front();
  for (Literal l : clause.literals) {
    if (engine.assigned(l.var) &&
        (!engine.assigned(last.var) || engine.trail_position(l.var) > engine.trail_position(last.var))) {
      last = l;
    }
  }
  const Literal actual = ~last;  // what the assignment holds
  auto held = ex.explain(actual);
  auto demanded = ex.explain_by_clause(last, c);
  if (actual.positive) throw_unsatisfiable(problem, actual, std::move(held), std::move(demanded));
  throw_unsatisfiable(problem, actual, std::move(demanded), std::move(held));
}

}  // namespace

RequirementUnsatisfiable::RequirementUnsatisfiable(std::string literal,
                                                   std::vector<ChainStep> positive,
                                                   std::vector<ChainStep> negative)
    : std::runtime_error("requirement is unsatisfiable: " + literal + " is forced both ways"),
      literal_(std::move(literal)),
      positive_(std::move(positive)),
      negative_(std::move(negative)) {}

std::string RequirementUnsatisfiable::render() const {
  std::string out = std::string(what()) + "\n";
  out += "  " + literal_ + " holds because:\n" + render_chain(positive_);
  out += "  not " + literal_ + " holds because:\n" + render_chain(negative_);
  return out;
}

PrunedProblem unconstrained_problem(const FeatureModel& model) {
  auto shared = std::make_shared<const FeatureModel>(model);
  PrunedProblem p{shared, std::nullopt, derive_constraints(*shared), {}};
  const Literal root = p.base.selected_literal(shared->root());
  p.base.force(root);
  p.provenance.emplace(
      root, Provenance{ReasonCode::MandatoryRoot,
                       "`" + shared->feature(shared->root()).name + "` is the root feature", {}});
  return p;
}

PrunedProblem apply_requirement(const FeatureModel& model, const Requirement& requirement) {
  auto shared = std::make_shared<const FeatureModel>(model);
  PrunedProblem p{shared, requirement, derive_constraints(*shared), {}};
  RequirementApplier(p).run(requirement);
  propagate_forced(p);
  return p;
}

}  // namespace qfm::config
