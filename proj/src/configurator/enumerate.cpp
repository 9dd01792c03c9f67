#include <algorithm>
#include <functional>

#include "configurator/closure.hpp"
#include "configurator/search.hpp"
#include "qfm/configurator.hpp"

namespace qfm::config {

namespace {

// Depth-first over the visible features, unselected branch first. Every
// branch is checked for a completion before descending, so each leaf is a
// distinct configuration and the leaves come out in ascending order.
class Enumerator {
 public:
  using Visit = std::function<bool(const std::vector<FeatureId>&)>;

  explicit Enumerator(const PrunedProblem& problem)
      : problem_(problem), engine_(problem.base), order_(visible_features(*problem.model)) {}

  void run(const Visit& visit) {
    bool ok = true;
    for (Literal l : problem_.base.forced_true()) ok = ok && engine_.assign(l, detail::SearchEngine::kForced);
    for (Literal l : problem_.base.forced_false()) ok = ok && engine_.assign(l, detail::SearchEngine::kForced);
    if (!ok || !engine_.initialize() || !engine_.satisfiable()) return;
    descend(0, visit);
  }

 private:
  bool descend(std::size_t pos, const Visit& visit) {
    if (pos == order_.size()) {
      current_.clear();
      for (FeatureId f : order_) {
        if (engine_.value(problem_.base.selected(f))) current_.push_back(f);
      }
      return visit(current_);
    }
    const std::uint32_t var = problem_.base.selected(order_[pos]);
    if (engine_.assigned(var)) return descend(pos + 1, visit);
    for (bool value : {false, true}) {
      const std::size_t m = engine_.mark();
      if (engine_.assign({var, value}, detail::SearchEngine::kDecision) && engine_.propagate() &&
          engine_.satisfiable()) {
        if (!descend(pos + 1, visit)) {
          engine_.undo(m);
          return false;
        }
      }
      engine_.undo(m);
    }
    return true;
  }

  const PrunedProblem& problem_;
  detail::SearchEngine engine_;
  std::vector<FeatureId> order_;
  std::vector<FeatureId> current_;
};

}  // namespace

std::vector<FeatureId> visible_features(const FeatureModel& model) {
  std::vector<FeatureId> out;
  for (FeatureId f : model.preorder_features()) {
    if (model.feature(f).is_visible()) out.push_back(f);
  }
  return out;
}

std::vector<AttributeBinding> effective_bindings(const FeatureModel& model,
                                                 const std::optional<Requirement>& requirement,
                                                 const std::vector<FeatureId>& selected) {
  std::vector<bool> chosen(model.feature_count(), false);
  for (FeatureId f : selected) {
    if (f.value < chosen.size()) chosen[f.value] = true;
  }
  detail::add_invisible_closure(model, chosen);

  std::vector<AttributeBinding> out;
  if (requirement) {
    for (const auto& spec : requirement->attribute_specs) out.push_back(spec.binding());
  }
  for (const auto& c : model.constraints()) {
    if (c.polarity != Polarity::Require || !chosen[c.subject.value]) continue;
    if (const auto* b = std::get_if<AttributeBinding>(&c.object)) out.push_back(*b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool configuration_less(const FeatureModel& model, const Configuration& a,
                        const Configuration& b) {
  for (FeatureId f : visible_features(model)) {
    const bool in_a = a.contains(f);
    const bool in_b = b.contains(f);
    if (in_a != in_b) return in_b;
  }
  return false;
}

EnumerationResult enumerate_configurations(const PrunedProblem& problem,
                                           std::optional<std::size_t> limit) {
  EnumerationResult result;
  Enumerator(problem).run([&](const std::vector<FeatureId>& selected) {
    if (limit && result.configurations.size() >= *limit) {
      result.truncated = true;
      return false;
    }
    result.configurations.push_back(
        Configuration{selected, effective_bindings(*problem.model, problem.requirement, selected)});
    return true;
  });
  return result;
}

std::uint64_t count_configurations(const PrunedProblem& problem) {
  std::uint64_t count = 0;
  Enumerator(problem).run([&](const std::vector<FeatureId>&) {
    ++count;
    return true;
  });
  return count;
}

}  // namespace qfm::config
