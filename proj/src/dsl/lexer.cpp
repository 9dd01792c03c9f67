#include "dsl/lexer.hpp"

#include <cctype>

namespace qfm::dsl::detail {

namespace {

bool is_word_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  LexResult run() {
    while (true) {
      skip_trivia();
      if (pos_ >= text_.size()) break;
      lex_token();
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line_;
    end.column = column_;
    end.first_on_line = line_has_no_token_;
    out_.tokens.push_back(end);
    return std::move(out_);
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
      line_has_no_token_ = true;
    } else if (!is_continuation(c)) {
      ++column_;
    }
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void error(std::uint32_t line, std::uint32_t column, std::uint32_t length, std::string message) {
    out_.diagnostics.push_back(Diagnostic{Severity::Error, std::string(codes::kLexical),
                                          std::move(message), SourceSpan{file_, line, column, length}});
  }

  void emit(Token token) {
    token.first_on_line = line_has_no_token_;
    line_has_no_token_ = false;
    out_.tokens.push_back(std::move(token));
  }

  void lex_token() {
    Token t;
    t.line = line_;
    t.column = column_;
    const std::uint32_t start_column = column_;
    const char c = peek();

    auto single = [&](TokenKind kind) {
      t.kind = kind;
      t.text = std::string(1, c);
      advance();
      t.length = 1;
      emit(std::move(t));
    };

    switch (c) {
      case '{': return single(TokenKind::LBrace);
      case '}': return single(TokenKind::RBrace);
      case ',': return single(TokenKind::Comma);
      case '.': return single(TokenKind::Dot);
      case '=': return single(TokenKind::Eq);
      case '<':
      case '>': {
        const bool less = c == '<';
        advance();
        if (peek() == '=') {
          advance();
          t.kind = less ? TokenKind::Le : TokenKind::Ge;
          t.text = less ? "<=" : ">=";
          t.length = 2;
        } else {
          t.kind = less ? TokenKind::Lt : TokenKind::Gt;
          t.text = less ? "<" : ">";
          t.length = 1;
        }
        return emit(std::move(t));
      }
      case '"': return lex_quoted(std::move(t));
      default: break;
    }

    if (is_digit(c) || ((c == '-' || c == '+') && is_digit(peek(1)))) {
      return lex_number(std::move(t));
    }
    if (is_word_start(c)) {
      std::size_t begin = pos_;
      while (pos_ < text_.size() && is_word_char(peek())) advance();
      t.kind = TokenKind::Word;
      t.text = std::string(text_.substr(begin, pos_ - begin));
      t.length = column_ - start_column;
      return emit(std::move(t));
    }

    // Unknown character: consume the whole code point and report it.
    std::size_t begin = pos_;
    advance();
    while (pos_ < text_.size() && is_continuation(peek())) advance();
    error(t.line, t.column, 1,
          "unexpected character `" + std::string(text_.substr(begin, pos_ - begin)) + "`");
  }

  void lex_number(Token t) {
    const std::uint32_t start_column = column_;
    std::size_t begin = pos_;
    if (peek() == '-' || peek() == '+') advance();
    while (is_digit(peek())) advance();
    if (peek() == '.' && is_digit(peek(1))) {
      advance();
      while (is_digit(peek())) advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (is_digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && is_digit(peek(2))))) {
      advance();
      if (peek() == '-' || peek() == '+') advance();
      while (is_digit(peek())) advance();
    }
    t.kind = TokenKind::Number;
    t.text = std::string(text_.substr(begin, pos_ - begin));
    t.length = column_ - start_column;
    emit(std::move(t));
  }

  void lex_quoted(Token t) {
    const std::uint32_t start_column = column_;
    advance();  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || peek() == '\n') {
        error(t.line, t.column, column_ - start_column, "unterminated string");
        break;
      }
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        char next = peek(1);
        std::uint32_t esc_col = column_;
        advance();
        if (next == '"' || next == '\\') {
          value.push_back(next);
          advance();
        } else if (next == 'n') {
          value.push_back('\n');
          advance();
        } else if (next == 't') {
          value.push_back('\t');
          advance();
        } else {
          error(t.line, esc_col, 2, "unknown escape sequence");
        }
        continue;
      }
      value.push_back(c);
      advance();
    }
    t.kind = TokenKind::Quoted;
    t.text = std::move(value);
    t.length = column_ - start_column;
    emit(std::move(t));
  }

  std::string_view text_;
  const std::string& file_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t column_ = 1;
  bool line_has_no_token_ = true;
  LexResult out_;
};

}  // namespace

LexResult lex(std::string_view text, const std::string& file) { return Lexer(text, file).run(); }

std::string describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::Quoted: return "\"" + token.text + "\"";
    default: return "`" + token.text + "`";
  }
}

}  // namespace qfm::dsl::detail
