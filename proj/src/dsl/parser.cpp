#include <algorithm>
#include <charconv>
#include <cmath>
#include <initializer_list>

#include "common/suggest.hpp"
#include "dsl/lexer.hpp"
#include "qfm/dsl.hpp"

namespace qfm::dsl {

namespace {

using detail::Token;
using detail::TokenKind;

const std::vector<std::string> kFeatureBodyWords = {"attribute", "group", "feature",
                                                    "abstract",  "mandatory", "hidden"};
const std::vector<std::string> kModelWords = {"feature", "abstract", "mandatory",
                                              "hidden",  "quality",  "requirement"};
const std::vector<std::string> kQualityBodyWords = {"implemented_by", "involves",
                                                    "influenced_by", "metric"};
const std::vector<std::string> kRequirementWords = {"set", "require"};
const std::vector<std::string> kThresholdWords = {"level", "threshold"};
const std::vector<std::string> kKindWords = {"fairness", "interpretability", "privacy",
                                             "prediction_correctness",
                                             "computational_complexity"};
const std::vector<std::string> kLevelWords = {"low", "medium", "high"};

struct SyntaxError {};

bool contains(const std::vector<std::string>& words, std::string_view w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::string file)
      : tokens_(std::move(tokens)), file_(std::move(file)) {}

  std::optional<ModelDecl> parse_model() {
    ModelDecl decl;
    decl.file = file_;
    try {
      expect_word("model");
      decl.name = ident("a model name");
      expect(TokenKind::LBrace, "`{`");
    } catch (const SyntaxError&) {
      return std::nullopt;
    }

    bool have_root = false;
    bool have_requirement = false;
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      const std::size_t start = pos_;
      try {
        if (at_feature_start()) {
          const Token& first = cur();
          FeatureDecl f = parse_feature();
          if (have_root) {
            syntax_error(first, "a model has exactly one root feature");
          } else {
            decl.root = std::move(f);
            have_root = true;
          }
        } else if (at_word("quality")) {
          decl.qualities.push_back(parse_quality());
        } else if (at_word("requirement")) {
          const Token& first = cur();
          RequirementDecl r = parse_requirement_block();
          if (have_requirement) {
            syntax_error(first, "a model has at most one requirement");
          } else {
            decl.requirement = std::move(r);
            have_requirement = true;
          }
        } else if (at_constraint_start()) {
          decl.constraints.push_back(parse_constraint());
        } else if (at(TokenKind::Word)) {
          unknown_keyword(kModelWords);
        } else {
          fail("a declaration");
        }
      } catch (const SyntaxError&) {
        recover(start, kModelWords, /*constraints=*/true);
      }
    }
    close_brace();
    if (!have_root) {
      syntax_error(tokens_.front(), "model `" + decl.name.name + "` has no root feature");
    }
    expect_end();
    return decl;
  }

  std::optional<RequirementDecl> parse_requirement_file() {
    std::optional<RequirementDecl> out;
    try {
      if (!at_word("requirement")) fail("`requirement`");
      out = parse_requirement_block();
    } catch (const SyntaxError&) {
      return std::nullopt;
    }
    expect_end();
    return out;
  }

  std::vector<Diagnostic> take_diagnostics() { return std::move(diagnostics_); }

 private:
  const Token& cur() const { return tokens_[pos_]; }
  const Token& peek(std::size_t ahead) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at(TokenKind kind) const { return cur().kind == kind; }
  bool at_word(std::string_view word) const { return at(TokenKind::Word) && cur().text == word; }
  bool at_ident() const { return at(TokenKind::Word) || at(TokenKind::Quoted); }

  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  SourceSpan span_of(const Token& t) const { return SourceSpan{file_, t.line, t.column, t.length}; }

  void syntax_error(const Token& at_token, std::string message) {
    diagnostics_.push_back(Diagnostic{Severity::Error, std::string(codes::kSyntax),
                                      std::move(message), span_of(at_token)});
  }

  [[noreturn]] void fail(const std::string& expected) {
    if (at(TokenKind::End)) {
      if (eof_reported_) throw SyntaxError{};
      eof_reported_ = true;
    }
    syntax_error(cur(), "expected " + expected + ", found " + detail::describe(cur()));
    throw SyntaxError{};
  }

  [[noreturn]] void unknown(const std::string& what, const std::vector<std::string>& options) {
    diagnostics_.push_back(
        Diagnostic{Severity::Error, std::string(codes::kUnknownKeyword),
                   "unknown " + what + " `" + cur().text + "`" +
                       qfm::detail::did_you_mean(cur().text, options),
                   span_of(cur())});
    throw SyntaxError{};
  }

  [[noreturn]] void unknown_keyword(const std::vector<std::string>& options) {
    unknown("keyword", options);
  }

  void expect(TokenKind kind, const std::string& what) {
    if (!at(kind)) fail(what);
    take();
  }

  void expect_word(std::string_view word) {
    if (!at_word(word)) fail("`" + std::string(word) + "`");
    take();
  }

  NameRef ident(const std::string& what) {
    if (!at_ident()) fail(what);
    const Token& t = take();
    return NameRef{t.text, span_of(t)};
  }

  void close_brace() {
    if (at(TokenKind::RBrace)) {
      take();
      return;
    }
    if (!eof_reported_) {
      eof_reported_ = true;
      syntax_error(cur(), "expected `}`, found " + detail::describe(cur()));
    }
  }

  void expect_end() {
    if (!at(TokenKind::End)) {
      syntax_error(cur(), "unexpected " + detail::describe(cur()) + " after the end of the block");
    }
  }

  bool at_feature_start() const {
    return at_word("feature") || at_word("abstract") || at_word("mandatory") ||
           at_word("hidden");
  }

  bool at_constraint_start() const {
    const Token& next = peek(1);
    return at_ident() && next.kind == TokenKind::Word &&
           (next.text == "requires" || next.text == "excludes");
  }

  // Skips to the next plausible item start at the current nesting level.
  // Braces opened by the failed item are balanced first.
  void recover(std::size_t start, const std::vector<std::string>& starters,
               bool constraints = false) {
    int depth = 0;
    for (std::size_t i = start; i < pos_; ++i) {
      if (tokens_[i].kind == TokenKind::LBrace) ++depth;
      if (tokens_[i].kind == TokenKind::RBrace && depth > 0) --depth;
    }
    if (pos_ == start && !at(TokenKind::End)) take();
    while (!at(TokenKind::End)) {
      if (depth == 0) {
        if (at(TokenKind::RBrace)) return;
        if (at(TokenKind::Word) && contains(starters, cur().text)) return;
        if (constraints && cur().first_on_line && at_constraint_start()) return;
      }
      if (at(TokenKind::LBrace)) ++depth;
      if (at(TokenKind::RBrace)) --depth;
      take();
    }
  }

  FeatureDecl parse_feature() {
    FeatureDecl f;
    while (true) {
      if (at_word("abstract")) {
        f.is_abstract = true;
      } else if (at_word("mandatory")) {
        f.is_mandatory = true;
      } else if (at_word("hidden")) {
        f.is_hidden = true;
      } else {
        break;
      }
      take();
    }
    expect_word("feature");
    f.name = ident("a feature name");
    if (!at(TokenKind::LBrace)) return f;
    take();
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      const std::size_t start = pos_;
      try {
        if (at_word("attribute")) {
          f.attributes.push_back(parse_attribute());
        } else if (at_word("group")) {
          f.groups.push_back(parse_group());
        } else if (at_feature_start()) {
          f.children.push_back(parse_feature());
        } else if (at(TokenKind::Word)) {
          unknown_keyword(kFeatureBodyWords);
        } else {
          fail("`attribute`, `group` or `feature`");
        }
      } catch (const SyntaxError&) {
        recover(start, kFeatureBodyWords);
      }
    }
    close_brace();
    return f;
  }

  AttributeDecl parse_attribute() {
    expect_word("attribute");
    AttributeDecl a;
    a.name = ident("an attribute name");
    expect_word("in");
    expect(TokenKind::LBrace, "`{`");
    a.values.push_back(ident("an attribute value"));
    while (at(TokenKind::Comma)) {
      take();
      a.values.push_back(ident("an attribute value"));
    }
    expect(TokenKind::RBrace, "`,` or `}`");
    return a;
  }

  GroupDecl parse_group() {
    GroupDecl g;
    g.span = span_of(cur());
    expect_word("group");
    if (at_word("or")) {
      g.kind = GroupKind::Or;
    } else if (at_word("alt")) {
      g.kind = GroupKind::Alt;
    } else if (at(TokenKind::Word)) {
      unknown("group kind", {"or", "alt"});
    } else {
      fail("`or` or `alt`");
    }
    take();
    expect(TokenKind::LBrace, "`{`");
    const std::vector<std::string> starters = {"feature", "abstract", "mandatory", "hidden"};
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      const std::size_t start = pos_;
      try {
        if (at_feature_start()) {
          g.members.push_back(parse_feature());
        } else if (at(TokenKind::Word)) {
          unknown_keyword(starters);
        } else {
          fail("`feature`");
        }
      } catch (const SyntaxError&) {
        recover(start, starters);
      }
    }
    if (g.members.empty() && at(TokenKind::RBrace)) {
      syntax_error(cur(), "expected `feature`, found `}`");
    }
    close_brace();
    return g;
  }

  ConstraintDecl parse_constraint() {
    ConstraintDecl c;
    c.span = span_of(cur());
    c.subject = ident("a feature name");
    if (at_word("requires")) {
      c.polarity = Polarity::Require;
    } else if (at_word("excludes")) {
      c.polarity = Polarity::Exclude;
    } else {
      fail("`requires` or `excludes`");
    }
    take();
    c.object.feature = ident("a feature name");
    if (at(TokenKind::Dot)) {
      take();
      c.object.attribute = ident("an attribute name");
      if (at(TokenKind::Eq)) {
        take();
        c.object.value = ident("an attribute value");
      }
    }
    return c;
  }

  Level parse_level() {
    if (!at(TokenKind::Word)) fail("`low`, `medium` or `high`");
    Level level = Level::Low;
    if (cur().text == "low") {
      level = Level::Low;
    } else if (cur().text == "medium") {
      level = Level::Medium;
    } else if (cur().text == "high") {
      level = Level::High;
    } else {
      unknown("level", kLevelWords);
    }
    take();
    return level;
  }

  std::vector<NameRef> ident_list(const std::string& what) {
    std::vector<NameRef> out{ident(what)};
    while (at(TokenKind::Comma)) {
      take();
      out.push_back(ident(what));
    }
    return out;
  }

  QualityDecl parse_quality() {
    expect_word("quality");
    QualityDecl q;
    if (!at(TokenKind::Word)) fail("a quality kind");
    const std::string& kind = cur().text;
    if (kind == "fairness") {
      q.kind = QualityKind::Fairness;
    } else if (kind == "interpretability") {
      q.kind = QualityKind::Interpretability;
    } else if (kind == "privacy") {
      q.kind = QualityKind::Privacy;
    } else if (kind == "prediction_correctness") {
      q.kind = QualityKind::PredictionCorrectness;
    } else if (kind == "computational_complexity") {
      q.kind = QualityKind::ComputationalComplexity;
    } else {
      unknown("quality kind", kKindWords);
    }
    take();
    q.name = ident("a quality name");
    q.span = q.name.span;
    if (at_word("qualitative")) {
      q.nature = Nature::Qualitative;
      take();
    } else if (at_word("quantitative")) {
      q.nature = Nature::Quantitative;
      take();
    }
    if (at_word("variant")) {
      take();
      q.variant_tag = ident("a variant string").name;
    }
    expect(TokenKind::LBrace, "`{`");
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      const std::size_t start = pos_;
      try {
        if (at_word("implemented_by")) {
          take();
          auto list = ident_list("a feature name");
          q.implemented_by.insert(q.implemented_by.end(), list.begin(), list.end());
        } else if (at_word("involves")) {
          take();
          do {
            if (at(TokenKind::Comma)) take();
            InvolvementDecl inv{ident("a feature name"), std::nullopt};
            if (at_word("level")) {
              take();
              inv.level = parse_level();
            }
            q.involves.push_back(std::move(inv));
          } while (at(TokenKind::Comma));
        } else if (at_word("influenced_by")) {
          take();
          auto list = ident_list("a quality name");
          q.influenced_by.insert(q.influenced_by.end(), list.begin(), list.end());
        } else if (at_word("metric")) {
          take();
          MetricDecl m;
          m.name = ident("a metric name");
          expect_word("implemented_by");
          m.implementer = ident("a feature name");
          q.metrics.push_back(std::move(m));
        } else if (at(TokenKind::Word)) {
          unknown_keyword(kQualityBodyWords);
        } else {
          fail("`implemented_by`, `involves`, `influenced_by` or `metric`");
        }
      } catch (const SyntaxError&) {
        recover(start, kQualityBodyWords);
      }
    }
    close_brace();
    return q;
  }

  double parse_number() {
    if (!at(TokenKind::Number)) fail("a number");
    const Token& t = cur();
    double value = 0.0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
      syntax_error(t, "`" + t.text + "` is not a finite number");
      take();
      throw SyntaxError{};
    }
    take();
    return value;
  }

  RequirementDecl parse_requirement_block() {
    RequirementDecl r;
    r.span = span_of(cur());
    expect_word("requirement");
    r.task = ident("a task name");
    expect(TokenKind::LBrace, "`{`");
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      const std::size_t start = pos_;
      try {
        if (at_word("set")) {
          take();
          AttributeSpecDecl s;
          s.span = span_of(cur());
          s.feature = ident("a feature name");
          expect(TokenKind::Dot, "`.`");
          s.attribute = ident("an attribute name");
          expect(TokenKind::Eq, "`=`");
          s.value = ident("an attribute value");
          r.specs.push_back(std::move(s));
        } else if (at_word("require")) {
          take();
          r.quality_reqs.push_back(parse_quality_requirement());
        } else if (at(TokenKind::Word)) {
          unknown_keyword(kRequirementWords);
        } else {
          fail("`set` or `require`");
        }
      } catch (const SyntaxError&) {
        recover(start, kRequirementWords);
      }
    }
    close_brace();
    return r;
  }

  QualityRequirementDecl parse_quality_requirement() {
    QualityRequirementDecl qr;
    qr.quality = ident("a quality name");
    qr.span = qr.quality.span;
    if (!at(TokenKind::LBrace)) return qr;
    take();
    while (!at(TokenKind::RBrace) && !at(TokenKind::End)) {
      if (at_word("level")) {
        take();
        qr.level = parse_level();
      } else if (at_word("threshold")) {
        take();
        ThresholdDecl t;
        t.span = span_of(cur());
        t.metric = ident("a metric name");
        switch (cur().kind) {
          case TokenKind::Le: t.comparator = Comparator::LE; break;
          case TokenKind::Ge: t.comparator = Comparator::GE; break;
          case TokenKind::Lt: t.comparator = Comparator::LT; break;
          case TokenKind::Gt: t.comparator = Comparator::GT; break;
          case TokenKind::Eq: t.comparator = Comparator::EQ; break;
          default: fail("a comparator (`<=`, `>=`, `<`, `>` or `=`)");
        }
        take();
        t.value = parse_number();
        qr.thresholds.push_back(std::move(t));
      } else if (at(TokenKind::Word)) {
        unknown_keyword(kThresholdWords);
      } else {
        fail("`level` or `threshold`");
      }
    }
    close_brace();
    return qr;
  }

  std::vector<Token> tokens_;
  std::string file_;
  std::size_t pos_ = 0;
  bool eof_reported_ = false;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

DeclParseResult parse_declarations(std::string_view text, const std::string& file) {
  auto lexed = detail::lex(text, file);
  Parser parser(std::move(lexed.tokens), file);
  DeclParseResult out;
  auto decl = parser.parse_model();
  out.diagnostics = std::move(lexed.diagnostics);
  auto syntax = parser.take_diagnostics();
  out.diagnostics.insert(out.diagnostics.end(), syntax.begin(), syntax.end());
  if (!has_errors(out.diagnostics)) out.decl = std::move(decl);
  return out;
}

RequirementParseResult parse_requirement(std::string_view text, const std::string& file) {
  auto lexed = detail::lex(text, file);
  Parser parser(std::move(lexed.tokens), file);
  RequirementParseResult out;
  auto decl = parser.parse_requirement_file();
  out.diagnostics = std::move(lexed.diagnostics);
  auto syntax = parser.take_diagnostics();
  out.diagnostics.insert(out.diagnostics.end(), syntax.begin(), syntax.end());
  if (!has_errors(out.diagnostics)) out.decl = std::move(decl);
  return out;
}

ParseResult parse_model(std::string_view text, const std::string& file) {
  ParseResult out;
  auto parsed = parse_declarations(text, file);
  out.diagnostics = std::move(parsed.diagnostics);
  if (!parsed.decl) return out;
  auto built = try_build_model(*parsed.decl);
  for (const auto& issue : built.issues) out.diagnostics.push_back(to_diagnostic(issue));
  out.model = std::move(built.model);
  return out;
}

}  // namespace qfm::dsl
