#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qfm {

/// 1-based position of a token or declaration in a .qfm file.
struct SourceSpan {
  std::string file;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Error, Warning };

std::string_view to_string(Severity severity);

// Diagnostic codes. The set is closed; docs/formats.md lists the meaning
// of each one.
namespace codes {
inline constexpr std::string_view kLexical = "E001";
inline constexpr std::string_view kSyntax = "E002";
inline constexpr std::string_view kUnknownKeyword = "E003";
inline constexpr std::string_view kDuplicateName = "E010";
inline constexpr std::string_view kUnresolvedReference = "E011";
inline constexpr std::string_view kAbstractImplementsMetric = "E012";
inline constexpr std::string_view kValueOutOfDomain = "E013";
inline constexpr std::string_view kInvalidStructure = "E014";
inline constexpr std::string_view kContradictoryConstraint = "E020";
inline constexpr std::string_view kThresholdMetricMismatch = "E021";
inline constexpr std::string_view kDuplicateQualityKind = "E022";
inline constexpr std::string_view kExcludeUnvaluedAttribute = "E024";
inline constexpr std::string_view kAbstractLeaf = "W010";
inline constexpr std::string_view kUnboundRequiredAttribute = "W023";
}  // namespace codes

/// Every code above, in ascending order.
const std::vector<std::string_view>& all_diagnostic_codes();

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace qfm
