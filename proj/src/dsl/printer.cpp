#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>
#include <tuple>

#include "qfm/dsl.hpp"

namespace qfm::dsl {

namespace {

const char* const kKeywords[] = {
    "model",         "feature",       "abstract",
    "mandatory",     "hidden",        "attribute",
    "in",            "group",         "or",
    "alt",           "requires",      "excludes",
    "quality",       "qualitative",   "quantitative",
    "variant",       "implemented_by", "involves",
    "influenced_by", "level",         "low",
    "medium",        "high",          "metric",
    "requirement",   "set",           "require",
    "threshold",     "fairness",      "interpretability",
    "privacy",       "prediction_correctness", "computational_complexity",
};

bool is_bare_word(std::string_view name) {
  if (name.empty()) return false;
  auto c0 = static_cast<unsigned char>(name.front());
  if (!(std::isalpha(c0) || c0 == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char ch) {
    auto c = static_cast<unsigned char>(ch);
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

std::string format_number(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  if (ec != std::errc{}) return "0";
  return std::string(buffer, ptr);
}

std::string quote_string(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out += "\"";
  return out;
}

class Printer {
 public:
  explicit Printer(const FeatureModel& model) : model_(model) {}

  std::string run() {
    out_ << "model " << quote_identifier(model_.name()) << " {\n";
    print_feature(model_.root(), 1);
    for (std::uint32_t i = 0; i < model_.qualities().size(); ++i) {
      out_ << "\n";
      print_quality(model_.quality(QualityId{i}));
    }
    if (!model_.constraints().empty()) {
      out_ << "\n";
      for (const auto& c : model_.constraints()) {
        indent(1);
        out_ << quote_identifier(model_.feature(c.subject).name) << " " << to_string(c.polarity)
             << " " << reference(c.object) << "\n";
      }
    }
    if (model_.requirement()) {
      out_ << "\n";
      print_requirement(*model_.requirement());
    }
    out_ << "}\n";
    return out_.str();
  }

 private:
  void indent(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "  ";
  }

  std::string name(FeatureId id) const { return quote_identifier(model_.feature(id).name); }

  std::string reference(const ConstraintObject& object) const {
    if (const auto* f = std::get_if<FeatureId>(&object)) return name(*f);
    if (const auto* a = std::get_if<AttributeRef>(&object)) {
      return name(a->owner) + "." + quote_identifier(model_.attribute(*a).name);
    }
    const auto& b = std::get<AttributeBinding>(object);
    const Attribute& attr = model_.attribute(b.attribute);
    return name(b.attribute.owner) + "." + quote_identifier(attr.name) + " = " +
           quote_identifier(attr.values.at(b.value));
  }

  void print_feature(FeatureId id, int depth) {
    const Feature& f = model_.feature(id);
    indent(depth);
    if (f.is_abstract) out_ << "abstract ";
    if (f.is_mandatory) out_ << "mandatory ";
    if (f.is_hidden) out_ << "hidden ";
    out_ << "feature " << quote_identifier(f.name);
    if (f.attributes.empty() && f.plain_children.empty() && f.groups.empty()) {
      out_ << "\n";
      return;
    }
    out_ << " {\n";
    for (const auto& attr : f.attributes) {
      indent(depth + 1);
      out_ << "attribute " << quote_identifier(attr.name) << " in { ";
      for (std::size_t i = 0; i < attr.values.size(); ++i) {
        if (i) out_ << ", ";
        out_ << quote_identifier(attr.values[i]);
      }
      out_ << " }\n";
    }
    for (FeatureId child : f.plain_children) print_feature(child, depth + 1);
    for (const auto& group : f.groups) {
      indent(depth + 1);
      out_ << "group " << to_string(group.kind) << " {\n";
      for (FeatureId member : group.members) print_feature(member, depth + 2);
      indent(depth + 1);
      out_ << "}\n";
    }
    indent(depth);
    out_ << "}\n";
  }

  void print_quality(const QualityProperty& q) {
    indent(1);
    out_ << "quality " << keyword(q.kind) << " " << quote_identifier(q.name) << " "
         << to_string(q.nature);
    if (q.variant_tag) out_ << " variant " << quote_string(*q.variant_tag);
    out_ << " {\n";
    if (!q.implemented_by.empty()) {
      indent(2);
      out_ << "implemented_by ";
      for (std::size_t i = 0; i < q.implemented_by.size(); ++i) {
        if (i) out_ << ", ";
        out_ << name(q.implemented_by[i]);
      }
      out_ << "\n";
    }
    if (!q.involvements.empty()) {
      indent(2);
      out_ << "involves ";
      for (std::size_t i = 0; i < q.involvements.size(); ++i) {
        if (i) out_ << ", ";
        out_ << name(q.involvements[i].feature);
        if (q.involvements[i].level) out_ << " level " << to_string(*q.involvements[i].level);
      }
      out_ << "\n";
    }
    if (!q.influenced_by.empty()) {
      indent(2);
      out_ << "influenced_by ";
      for (std::size_t i = 0; i < q.influenced_by.size(); ++i) {
        if (i) out_ << ", ";
        out_ << quote_identifier(model_.quality(q.influenced_by[i]).name);
      }
      out_ << "\n";
    }
    for (const auto& m : q.metrics) {
      indent(2);
      out_ << "metric " << quote_identifier(m.name) << " implemented_by " << name(m.implementer)
           << "\n";
    }
    indent(1);
    out_ << "}\n";
  }

  void print_requirement(const Requirement& r) {
    indent(1);
    out_ << "requirement " << quote_identifier(r.task) << " {\n";
    for (const auto& spec : r.attribute_specs) {
      const Attribute& attr = model_.attribute(spec.attribute);
      indent(2);
      out_ << "set " << name(spec.attribute.owner) << "." << quote_identifier(attr.name) << " = "
           << quote_identifier(attr.values.at(spec.value)) << "\n";
    }
    for (const auto& qr : r.quality_reqs) {
      indent(2);
      out_ << "require " << quote_identifier(model_.quality(qr.property).name);
      if (!qr.required_level && qr.thresholds.empty()) {
        out_ << "\n";
        continue;
      }
      out_ << " {\n";
      if (qr.required_level) {
        indent(3);
        out_ << "level " << to_string(*qr.required_level) << "\n";
      }
      for (const auto& t : qr.thresholds) {
        indent(3);
        out_ << "threshold " << quote_identifier(model_.metric(t.metric).name) << " "
             << to_string(t.comparator) << " " << format_number(t.value) << "\n";
      }
      indent(2);
      out_ << "}\n";
    }
    indent(1);
    out_ << "}\n";
  }

  const FeatureModel& model_;
  std::ostringstream out_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::any_of(std::begin(kKeywords), std::end(kKeywords),
                     [&](const char* k) { return word == k; });
}

std::string quote_identifier(std::string_view name) {
  if (is_bare_word(name) && !is_keyword(name)) return std::string(name);
  return quote_string(name);
}

std::string serialize_model(const FeatureModel& model) { return Printer(model).run(); }

std::string format_diagnostics(std::vector<Diagnostic> diagnostics, bool color) {
  std::stable_sort(diagnostics.begin(), diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::tie(a.span.file, a.span.line, a.span.column, a.code) <
                            std::tie(b.span.file, b.span.line, b.span.column, b.code);
                   });
  std::string out;
  for (const auto& d : diagnostics) {
    out += d.span.file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) +
           ": ";
    std::string severity(to_string(d.severity));
    if (color) {
      const char* ansi = d.severity == Severity::Error ? "\x1b[1;31m" : "\x1b[1;33m";
      out += ansi + severity + "\x1b[0m";
    } else {
      out += severity;
    }
    out += "[" + d.code + "]: " + d.message + "\n";
  }
  return out;
}

}  // namespace qfm::dsl
