#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qfm::detail {

std::size_t edit_distance(std::string_view a, std::string_view b);

/// Closest candidate within a small edit distance, ties broken by order.
std::optional<std::string> best_match(std::string_view wanted,
                                      const std::vector<std::string>& candidates);

/// " (did you mean `X`?)" or empty.
std::string did_you_mean(std::string_view wanted, const std::vector<std::string>& candidates);

}  // namespace qfm::detail
