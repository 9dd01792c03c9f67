#pragma once

// Unit propagation and DPLL over a ConstraintSet. Internal to the
// configurator; reasons are kept so that conflicts can be explained.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qfm/configurator.hpp"

namespace qfm::config::detail {

class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted() : std::runtime_error("search budget exhausted") {}
};

class SearchEngine {
 public:
  static constexpr int kForced = -1;
  static constexpr int kDecision = -2;

  explicit SearchEngine(const ConstraintSet& constraints);

  /// Assigns the literal. False when the variable already has the opposite
  /// value. `reason` is a clause index, kForced or kDecision.
  bool assign(Literal literal, int reason);
  /// Propagates pending assignments; false on conflict (see conflict()).
  bool propagate();
  /// Enqueues unit clauses and propagates. Call once before searching.
  bool initialize();

  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t mark);

  /// Whether the current partial assignment extends to a full model. The
  /// assignment is left unchanged. Each decision consumes one unit of
  /// `budget` when given; BudgetExhausted is thrown when it runs out.
  bool satisfiable(std::uint64_t* budget = nullptr);

  bool assigned(std::uint32_t var) const { return values_[var] != 0; }
  bool value(std::uint32_t var) const { return values_[var] > 0; }
  bool is_true(Literal l) const { return values_[l.var] == (l.positive ? 1 : -1); }
  bool is_false(Literal l) const { return values_[l.var] == (l.positive ? -1 : 1); }
  int reason(std::uint32_t var) const { return reasons_[var]; }
  int conflict() const { return conflict_; }
  const std::vector<Literal>& trail() const { return trail_; }
  std::size_t trail_position(std::uint32_t var) const { return positions_[var]; }

 private:
  bool search(std::uint64_t* budget);

  const ConstraintSet& constraints_;
  std::vector<std::vector<int>> occurrences_;  // by literal index
  std::vector<std::int8_t> values_;
  std::vector<int> reasons_;
  std::vector<std::size_t> positions_;
  std::vector<Literal> trail_;
  std::size_t head_ = 0;
  int conflict_ = -1;
};

}  // namespace qfm::config::detail
