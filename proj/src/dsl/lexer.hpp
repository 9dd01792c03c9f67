#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qfm/source.hpp"

namespace qfm::dsl::detail {

enum class TokenKind {
  Word,    // bare identifier or keyword
  Quoted,  // "..." with escapes resolved
  Number,
  LBrace,
  RBrace,
  Comma,
  Dot,
  Eq,
  Le,
  Ge,
  Lt,
  Gt,
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t length = 0;
  bool first_on_line = false;
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by an End token
  std::vector<Diagnostic> diagnostics;
};

LexResult lex(std::string_view text, const std::string& file);

std::string describe(const Token& token);

}  // namespace qfm::dsl::detail
