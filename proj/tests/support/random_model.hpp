#pragma once

#include <cstdint>
#include <optional>

#include "qfm/decl.hpp"
#include "qfm/model.hpp"

namespace qfm::testing {

struct RandomModelOptions {
  std::size_t max_features = 12;
  std::size_t max_constraints = 4;
  bool qualities = true;
  bool requirement = true;
};

/// Seeded random model that builds without errors. The requirement, when
/// requested, is embedded in the model.
FeatureModel random_model(std::uint64_t seed, const RandomModelOptions& options = {});

/// Model declaration for a root with `n` optional concrete children.
ModelDecl flat_optional_decl(std::size_t n);

}  // namespace qfm::testing
