#include "configurator/search.hpp"
#include "qfm/analysis.hpp"
#include "qfm/configurator.hpp"

namespace qfm::analysis {

namespace {

bool optional_feature(const FeatureModel& model, FeatureId f) {
  return f != model.root() && !model.feature(f).is_mandatory;
}

}  // namespace

SearchBudgetExceeded::SearchBudgetExceeded(std::uint64_t limit)
    : std::runtime_error("anomaly search exceeded its budget of " + std::to_string(limit) +
                         " decisions"),
      limit_(limit) {}

AnomalyReport detect_anomalies_exhaustive(const FeatureModel& model) {
  const std::size_t n = model.feature_count();
  std::vector<std::uint64_t> hits(n, 0);
  std::uint64_t solutions = 0;
  config::for_each_valid_selection(model, std::nullopt, [&](const std::vector<bool>& sel) {
    ++solutions;
    for (std::size_t i = 0; i < n; ++i) hits[i] += sel[i] ? 1 : 0;
  });

  AnomalyReport report;
  if (solutions == 0) {
    report.is_void = true;
    return report;
  }
  for (FeatureId f : model.preorder_features()) {
    if (hits[f.value] == 0) report.dead.push_back(f);
    if (hits[f.value] == solutions && optional_feature(model, f)) report.false_optional.push_back(f);
  }
  return report;
}

AnomalyReport detect_anomalies_by_search(const FeatureModel& model, std::uint64_t budget) {
  const auto problem = config::unconstrained_problem(model);
  config::detail::SearchEngine engine(problem.base);
  std::uint64_t left = budget;
  auto sat_with = [&](std::optional<config::Literal> assumption) {
    const std::size_t m = engine.mark();
    bool ok = !assumption ||
              (engine.assign(*assumption, config::detail::SearchEngine::kDecision) && engine.propagate());
    try {
      ok = ok && engine.satisfiable(&left);
    } catch (const config::detail::BudgetExhausted&) {
      engine.undo(m);
      throw SearchBudgetExceeded(budget);
    }
    engine.undo(m);
    return ok;
  };

  AnomalyReport report;
  bool consistent = true;
  for (config::Literal l : problem.base.forced_true()) {
    consistent = consistent && engine.assign(l, config::detail::SearchEngine::kForced);
  }
  if (!consistent || !engine.initialize() || !sat_with(std::nullopt)) {
    report.is_void = true;
    return report;
  }
  for (FeatureId f : model.preorder_features()) {
    const std::uint32_t var = problem.base.selected(f);
    if (!sat_with(config::Literal{var, true})) {
      report.dead.push_back(f);
    } else if (optional_feature(model, f) && !sat_with(config::Literal{var, false})) {
      report.false_optional.push_back(f);
    }
  }
  return report;
}

AnomalyReport detect_anomalies(const FeatureModel& model, std::uint64_t budget) {
  if (model.feature_count() <= config::kBruteForceLimit) return detect_anomalies_exhaustive(model);
  return detect_anomalies_by_search(model, budget);
}

}  // namespace qfm::analysis
