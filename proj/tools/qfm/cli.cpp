#include "cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>

#include "qfm/analysis.hpp"
#include "qfm/configurator.hpp"
#include "qfm/dsl.hpp"

namespace qfm::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string path;
  std::string requirement_path;
  bool quiet = false;
  std::string format = "table";
  std::size_t limit = 0;
  bool has_limit = false;
  bool count_only = false;
  bool builtin = false;
  bool write = false;
};

// Raised for conditions that end the command with a fixed exit code after
// the message has been printed.
struct Exit {
  int code;
};

std::string plural(std::size_t n, const char* one, const char* many) {
  return std::to_string(n) + " " + (n == 1 ? one : many);
}

bool use_color(const std::ostream& err) {
  const char* env = std::getenv("QFM_COLOR");
  const std::string mode = env ? env : "auto";
  if (mode == "always") return true;
  if (mode == "never") return false;
  return &err == &std::cerr && ::isatty(STDERR_FILENO);
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return text.str();
}

class Command {
 public:
  Command(const Options& options, std::ostream& out, std::ostream& err)
      : opt_(options), out_(out), err_(err), color_(use_color(err)) {}

  int check() {
    FeatureModel model = load();
    auto findings = analysis::validate(model);
    report(findings);
    if (has_errors(findings)) return kDiagnostics;
    if (!opt_.quiet) {
      out_ << opt_.path << ": " << plural(model.feature_count(), "feature", "features") << ", "
           << plural(model.qualities().size(), "quality", "qualities") << ", "
           << plural(model.constraints().size(), "constraint", "constraints") << "\n";
      out_ << anomaly_summary(model);
    }
    return kOk;
  }

  int configs() {
    FeatureModel model = load_validated();
    if (!model.requirement()) {
      err_ << "error: `" << opt_.path << "` has no `requirement` block; add one or pass "
           << "--requirement <file>\n";
      return kUsage;
    }
    const Requirement& requirement = *model.requirement();
    config::PrunedProblem problem = prune(model, requirement);

    if (opt_.count_only) {
      const auto count = config::count_configurations(problem);
      out_ << count << "\n";
      return count == 0 ? no_configuration() : kOk;
    }

    std::optional<std::size_t> limit;
    if (opt_.has_limit) limit = opt_.limit;
    auto result = config::enumerate_configurations(problem, limit);
    if (result.configurations.empty() && !result.truncated) return no_configuration();

    if (opt_.format == "csv") {
      write_csv(model, result);
    } else if (opt_.format == "json") {
      write_json(model, requirement, result);
    } else {
      write_table(model, result);
    }
    if (result.truncated) {
      err_ << "note: output truncated to the first " << result.configurations.size()
           << " configurations (--limit " << opt_.limit << ")\n";
    }
    return kOk;
  }

  int explain() {
    FeatureModel model = load_validated();
    if (model.qualities().empty()) {
      out_ << "no quality properties declared\n";
      return kOk;
    }
    const auto report = analysis::influence_report(model, model.requirement(), opt_.builtin);
    out_ << "influence:\n";
    if (report.edges.empty()) out_ << "  (none)\n";
    std::set<std::size_t> merged;
    for (std::size_t i = 0; i < report.edges.size(); ++i) {
      if (merged.count(i)) continue;
      const auto& e = report.edges[i];
      std::string arrow = "->";
      for (std::size_t j = i + 1; j < report.edges.size(); ++j) {
        const auto& r = report.edges[j];
        if (r.source == e.target && r.target == e.source && r.origin == e.origin) {
          arrow = "<->";
          merged.insert(j);
          break;
        }
      }
      out_ << "  " << e.source.name << " " << arrow << " " << e.target.name << " ["
           << analysis::to_string(e.origin) << "]\n";
    }
    if (!report.warnings.empty()) {
      out_ << "warnings for requirement `" << model.requirement()->task << "`:\n";
      for (const auto& w : report.warnings) out_ << "  " << w << "\n";
    }
    out_ << "pipeline steps:\n";
    std::vector<QualityKind> kinds;
    for (const auto& q : model.qualities()) {
      if (std::find(kinds.begin(), kinds.end(), q.kind) == kinds.end()) kinds.push_back(q.kind);
    }
    for (QualityKind kind : kinds) {
      out_ << "  " << display_name(kind) << ":";
      const char* sep = " ";
      for (auto step : analysis::step_impact(kind)) {
        out_ << sep << analysis::to_string(step);
        sep = ", ";
      }
      out_ << "\n";
    }
    return kOk;
  }

  int fmt() {
    FeatureModel model = load();
    const std::string text = dsl::serialize_model(model);
    if (!opt_.write) {
      out_ << text;
      return kOk;
    }
    std::error_code ec;
    const auto perms = fs::status(opt_.path, ec).permissions();
    const auto writable = fs::perms::owner_write | fs::perms::group_write | fs::perms::others_write;
    if (ec || (perms & writable) == fs::perms::none) {
      err_ << "error: `" << opt_.path << "` is not writable\n";
      return kUsage;
    }
    std::ofstream file(opt_.path, std::ios::binary | std::ios::trunc);
    file << text;
    file.flush();
    if (!file) {
      err_ << "error: failed to write `" << opt_.path << "`\n";
      return kUsage;
    }
    return kOk;
  }

 private:
  void report(const std::vector<Diagnostic>& diagnostics) {
    std::vector<Diagnostic> shown;
    for (const auto& d : diagnostics) {
      if (!opt_.quiet || d.severity == Severity::Error) shown.push_back(d);
    }
    err_ << dsl::format_diagnostics(std::move(shown), color_);
  }

  FeatureModel load() {
    auto text = read_file(opt_.path);
    if (!text) {
      err_ << "error: cannot read `" << opt_.path << "`\n";
      throw Exit{kUsage};
    }
    auto parsed = dsl::parse_model(*text, opt_.path);
    if (!parsed.ok()) {
      report(parsed.diagnostics);
      throw Exit{kDiagnostics};
    }
    FeatureModel model = std::move(*parsed.model);
    if (opt_.requirement_path.empty()) return model;

    auto req_text = read_file(opt_.requirement_path);
    if (!req_text) {
      err_ << "error: cannot read `" << opt_.requirement_path << "`\n";
      throw Exit{kUsage};
    }
    auto req = dsl::parse_requirement(*req_text, opt_.requirement_path);
    if (!req.decl) {
      report(req.diagnostics);
      throw Exit{kDiagnostics};
    }
    auto built = try_build_requirement(model, *req.decl);
    if (!built.requirement) {
      std::vector<Diagnostic> diagnostics;
      for (const auto& issue : built.issues) diagnostics.push_back(to_diagnostic(issue));
      report(diagnostics);
      throw Exit{kDiagnostics};
    }
    return model.with_requirement(std::move(built.requirement), std::move(built.spans));
  }

  FeatureModel load_validated() {
    FeatureModel model = load();
    auto findings = analysis::validate(model);
    report(findings);
    if (has_errors(findings)) throw Exit{kDiagnostics};
    return model;
  }

  config::PrunedProblem prune(const FeatureModel& model, const Requirement& requirement) {
    try {
      return config::apply_requirement(model, requirement);
    } catch (const config::RequirementUnsatisfiable& e) {
      err_ << "error: " << e.render();
      throw Exit{kUnsatisfiable};
    }
  }

  int no_configuration() {
    err_ << "error: requirement admits no configuration\n";
    return kUnsatisfiable;
  }

  std::string anomaly_summary(const FeatureModel& model) {
    analysis::AnomalyReport a;
    try {
      a = analysis::detect_anomalies(model);
    } catch (const analysis::SearchBudgetExceeded& e) {
      return std::string("anomalies: not computed (") + e.what() + ")\n";
    }
    if (a.is_void) return "anomalies: model admits no configuration\n";
    auto names = [&](const std::vector<FeatureId>& ids) {
      std::string s;
      for (FeatureId f : ids) s += (s.empty() ? "" : ", ") + model.feature(f).name;
      return s;
    };
    std::string out;
    if (!a.dead.empty()) out += "dead features: " + names(a.dead) + "\n";
    if (!a.false_optional.empty()) out += "false-optional features: " + names(a.false_optional) + "\n";
    return out.empty() ? "anomalies: none\n" : out;
  }

  static std::string csv_cell(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }

  void write_csv(const FeatureModel& model, const config::EnumerationResult& result) {
    const auto columns = config::visible_features(model);
    std::string text;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      text += (i ? "," : "") + csv_cell(model.feature(columns[i]).name);
    }
    text += "\n";
    for (const auto& c : result.configurations) {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) text += ",";
        if (c.contains(columns[i])) text += "x";
      }
      text += "\n";
    }
    out_ << text;
  }

  void write_table(const FeatureModel& model, const config::EnumerationResult& result) {
    const auto columns = config::visible_features(model);
    const std::string index_header = "#";
    std::size_t index_width = std::max(index_header.size(),
                                       std::to_string(result.configurations.size()).size());
    auto pad = [](std::string s, std::size_t width) {
      if (s.size() < width) s.append(width - s.size(), ' ');
      return s;
    };
    std::string line = pad(index_header, index_width);
    for (FeatureId f : columns) line += "  " + model.feature(f).name;
    out_ << line << "\n";
    for (std::size_t r = 0; r < result.configurations.size(); ++r) {
      const auto& c = result.configurations[r];
      line = pad(std::to_string(r + 1), index_width);
      for (FeatureId f : columns) {
        line += "  " + pad(c.contains(f) ? "x" : "", model.feature(f).name.size());
      }
      while (!line.empty() && line.back() == ' ') line.pop_back();
      out_ << line << "\n";
    }
  }

  void write_json(const FeatureModel& model, const Requirement& requirement,
                  const config::EnumerationResult& result) {
    json doc;
    doc["model"] = model.name();
    doc["task"] = requirement.task;
    doc["truncated"] = result.truncated;
    doc["count"] = result.configurations.size();
    json configurations = json::array();
    for (std::size_t i = 0; i < result.configurations.size(); ++i) {
      const auto& c = result.configurations[i];
      json features = json::array();
      for (FeatureId f : c.selected) features.push_back(model.feature(f).name);
      json bindings = json::array();
      for (const auto& b : c.bindings) {
        bindings.push_back({{"attribute", model.describe(b.attribute)},
                            {"value", model.attribute(b.attribute).values.at(b.value)}});
      }
      configurations.push_back(
          {{"index", i + 1}, {"features", features}, {"bindings", bindings}});
    }
    doc["configurations"] = configurations;
    json thresholds = json::array();
    for (const auto& qr : requirement.quality_reqs) {
      for (const auto& t : qr.thresholds) {
        const Metric& m = model.metric(t.metric);
        thresholds.push_back({{"quality", model.quality(qr.property).name},
                              {"metric", m.name},
                              {"implementer", model.feature(m.implementer).name},
                              {"comparator", to_string(t.comparator)},
                              {"value", t.value}});
      }
    }
    doc["thresholds"] = thresholds;
    out_ << doc.dump(2) << "\n";
  }

  const Options& opt_;
  std::ostream& out_;
  std::ostream& err_;
  bool color_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Validate quality-aware feature models and derive ML pipeline configurations",
               "qfm"};
  app.require_subcommand(1, 1);
  app.add_option("--requirement", opt.requirement_path,
                 "Requirement file that replaces the model's requirement block");
  app.add_flag("-q,--quiet", opt.quiet, "Print errors only");

  auto file_arg = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->add_option("file", opt.path, "Model file (.qfm)")->required();
    return sub;
  };
  auto* check = file_arg(app.add_subcommand("check", "Parse and validate a model"));
  auto* configs = file_arg(app.add_subcommand("configs", "List the configurations a requirement admits"));
  configs->add_option("--format", opt.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  auto* limit = configs->add_option("--limit", opt.limit, "Stop after N configurations")
                    ->check(CLI::NonNegativeNumber);
  configs->add_flag("--count-only", opt.count_only, "Print only the number of configurations");
  auto* count = file_arg(app.add_subcommand("count", "Same as configs --count-only"));
  auto* explain = file_arg(app.add_subcommand("explain", "Quality influence and pipeline steps"));
  explain->add_flag("--builtin", opt.builtin, "Add the built-in influence table");
  auto* fmt = file_arg(app.add_subcommand("fmt", "Print the model in canonical form"));
  fmt->add_flag("--write", opt.write, "Rewrite the file in place");

  std::vector<const char*> argv{"qfm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  opt.has_limit = limit->count() > 0;

  Command command(opt, out, err);
  try {
    if (check->parsed()) return command.check();
    if (configs->parsed()) return command.configs();
    if (count->parsed()) {
      opt.count_only = true;
      return command.configs();
    }
    if (explain->parsed()) return command.explain();
    if (fmt->parsed()) return command.fmt();
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace qfm::cli
