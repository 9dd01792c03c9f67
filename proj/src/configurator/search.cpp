#include "configurator/search.hpp"

#include <optional>

namespace qfm::config::detail {

namespace {

std::size_t index(Literal l) { return 2 * static_cast<std::size_t>(l.var) + (l.positive ? 0 : 1); }

}  // namespace

SearchEngine::SearchEngine(const ConstraintSet& constraints)
    : constraints_(constraints),
      occurrences_(2 * constraints.variable_count()),
      values_(constraints.variable_count(), 0),
      reasons_(constraints.variable_count(), kDecision),
      positions_(constraints.variable_count(), 0) {
  const auto& clauses = constraints.clauses();
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    for (Literal l : clauses[c].literals) occurrences_[index(l)].push_back(static_cast<int>(c));
  }
}

bool SearchEngine::assign(Literal literal, int reason) {
  if (is_true(literal)) return true;
  if (is_false(literal)) return false;
  values_[literal.var] = literal.positive ? 1 : -1;
  reasons_[literal.var] = reason;
  positions_[literal.var] = trail_.size();
  trail_.push_back(literal);
  return true;
}

bool SearchEngine::propagate() {
  const auto& clauses = constraints_.clauses();
  while (head_ < trail_.size()) {
    const Literal now_true = trail_[head_++];
    for (int c : occurrences_[index(~now_true)]) {
      std::size_t open = 0;
      Literal last{};
      bool satisfied = false;
      for (Literal l : clauses[c].literals) {
        if (is_true(l)) {
          satisfied = true;
          break;
        }
        if (!assigned(l.var)) {
          ++open;
          last = l;
        }
      }
      if (satisfied) continue;
      if (open == 0) {
        conflict_ = c;
        return false;
      }
      if (open == 1) assign(last, c);
    }
  }
  return true;
}

bool SearchEngine::initialize() {
  const auto& clauses = constraints_.clauses();
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    if (clauses[c].literals.empty()) {
      conflict_ = static_cast<int>(c);
      return false;
    }
    if (clauses[c].literals.size() == 1 && !assign(clauses[c].literals.front(), static_cast<int>(c))) {
      conflict_ = static_cast<int>(c);
      return false;
    }
  }
  return propagate();
}

void SearchEngine::undo(std::size_t mark) {
  while (trail_.size() > mark) {
    const Literal l = trail_.back();
    trail_.pop_back();
    values_[l.var] = 0;
    reasons_[l.var] = kDecision;
  }
  if (head_ > mark) head_ = mark;
}

bool SearchEngine::satisfiable(std::uint64_t* budget) {
  const std::size_t start = mark();
  const bool result = search(budget);
  undo(start);
  return result;
}

bool SearchEngine::search(std::uint64_t* budget) {
  // Branch on an open literal of the first clause not yet satisfied.
  std::optional<Literal> branch;
  for (const auto& clause : constraints_.clauses()) {
    bool satisfied = false;
    std::optional<Literal> open;
    for (Literal l : clause.literals) {
      if (is_true(l)) {
        satisfied = true;
        break;
      }
      if (!open && !assigned(l.var)) open = l;
    }
    if (!satisfied && open) {
      branch = open;
      break;
    }
  }
  if (!branch) return true;

  if (budget) {
    if (*budget == 0) throw BudgetExhausted();
    --*budget;
  }
  for (Literal choice : {*branch, ~*branch}) {
    const std::size_t m = mark();
    if (assign(choice, kDecision) && propagate() && search(budget)) return true;
    undo(m);
  }
  return false;
}

}  // namespace qfm::config::detail
