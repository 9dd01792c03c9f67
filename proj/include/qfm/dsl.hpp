#pragma once

// Textual concrete syntax (.qfm) for Quality-and-Feature Models.
//
//   model "ML Pipeline" {
//     abstract mandatory feature "ML Pipeline" {
//       mandatory feature Dataset {
//         attribute Label in { binary, multi-class }
//       }
//       group alt { feature KNN  feature "Decision Trees" }
//     }
//     quality fairness Fairness variant "PREPROCESSING" { ... }
//     Reweighing requires Dataset.Label = binary
//     requirement classification { set Dataset.Label = binary }
//   }
//
// docs/formats.md holds the full grammar and the diagnostic code table.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfm/decl.hpp"
#include "qfm/model.hpp"
#include "qfm/source.hpp"

namespace qfm::dsl {

struct DeclParseResult {
  std::optional<ModelDecl> decl;
  std::vector<Diagnostic> diagnostics;
};

struct RequirementParseResult {
  std::optional<RequirementDecl> decl;
  std::vector<Diagnostic> diagnostics;
};

struct ParseResult {
  std::optional<FeatureModel> model;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return model.has_value(); }
};

/// Syntax only. Recovers at declaration boundaries, so one call can report
/// several independent errors.
DeclParseResult parse_declarations(std::string_view text, const std::string& file);

/// A file holding a single `requirement <task> { ... }` block.
RequirementParseResult parse_requirement(std::string_view text, const std::string& file);

/// Parses and resolves. On failure `model` is empty and at least one ERROR
/// diagnostic is present.
ParseResult parse_model(std::string_view text, const std::string& file);

/// Canonical text: two-space indentation, declaration order preserved,
/// attributes before plain children before groups. Re-parses to an equal
/// model.
std::string serialize_model(const FeatureModel& model);

/// One line per diagnostic, `file:line:col: severity[code]: message`,
/// ordered by (file, line, column, code).
std::string format_diagnostics(std::vector<Diagnostic> diagnostics, bool color = false);

/// Bare word when the grammar allows it, double-quoted otherwise.
std::string quote_identifier(std::string_view name);

bool is_keyword(std::string_view word);

}  // namespace qfm::dsl
