#pragma once

#include <vector>

#include "qfm/model.hpp"

namespace qfm::config::detail {

/// Adds to `selected` the abstract and hidden features that the current
/// selection cannot do without: ancestors, mandatory children, targets of
/// `requires` and owners of required attribute values. Iterates to a
/// fixpoint. Visible features are never added.
void add_invisible_closure(const FeatureModel& model, std::vector<bool>& selected);

}  // namespace qfm::config::detail
