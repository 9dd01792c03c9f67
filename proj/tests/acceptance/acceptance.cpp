// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <unistd.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "files.hpp"
#include "qfm/configurator.hpp"
#include "qfm/dsl.hpp"
#include "random_model.hpp"

using namespace qfm;
using qfm::testing::load_example;
using qfm::testing::read_text;
using qfm::testing::source_path;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun qfm_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream cols(line);
    while (std::getline(cols, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

// The eight rows of the classification case study: every classifier paired
// with each of the two remaining fairness methods.
Outcome criterion_table() {
  Outcome o;
  const auto start = Clock::now();
  auto r = qfm_cli({"configs", source_path("examples/classification.qfm"), "--format", "csv"});
  const double elapsed = seconds_since(start);
  if (r.code != 0) {
    o.fail("exit code " + std::to_string(r.code));
    return o;
  }
  const auto rows = csv_rows(r.out);
  if (rows.empty()) {
    o.fail("no output");
    return o;
  }
  const auto& header = rows[0];
  std::set<std::set<std::string>> got;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::set<std::string> selected;
    for (std::size_t c = 0; c < rows[i].size() && c < header.size(); ++c) {
      if (rows[i][c] == "x") selected.insert(header[c]);
    }
    got.insert(selected);
  }
  std::set<std::set<std::string>> expected;
  for (const char* classifier : {"KNN", "Logistic Regression", "Neural Networks", "Decision Trees"}) {
    for (const char* method : {"EG", "Blackbox"}) {
      expected.insert({"Dataset", "SP", "DI", "Zero One Loss", "Accuracy", classifier, method});
    }
  }
  if (rows.size() - 1 != 8) o.fail(std::to_string(rows.size() - 1) + " rows instead of 8");
  if (got != expected) o.fail("selection patterns differ from the expected table");
  if (elapsed >= 1.0) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "8 rows, " + std::to_string(elapsed * 1000).substr(0, 5) + " ms";
  return o;
}

Outcome criterion_provenance() {
  Outcome o;
  auto m = load_example("classification.qfm");
  auto p = config::apply_requirement(m, *m.requirement());
  auto expect = [&](const char* name, config::ReasonCode code) {
    const auto f = m.find_feature(name);
    if (!f) return o.fail(std::string("missing feature ") + name);
    const auto* why = p.reason(p.base.selected_literal(*f, false));
    if (!why) return o.fail(std::string(name) + " is not forced false");
    if (why->code != code) {
      o.fail(std::string(name) + " has reason " + std::string(config::to_string(why->code)));
    }
  };
  expect("Reweighing", config::ReasonCode::ConstraintConflict);
  expect("DIR", config::ReasonCode::ConstraintConflict);
  expect("EO", config::ReasonCode::UnrequestedMetric);
  expect("Precision", config::ReasonCode::UnrequestedMetric);
  expect("Recall", config::ReasonCode::UnrequestedMetric);
  if (o.pass) o.detail = "Reweighing, DIR: CONSTRAINT_CONFLICT; EO, Precision, Recall: UNREQUESTED_METRIC";
  return o;
}

struct Emitted {
  const FeatureModel* model;
  std::optional<Requirement> requirement;
  std::vector<Configuration> configurations;
  std::vector<Configuration> oracle;
};

Outcome criterion_oracle(std::vector<Emitted>& emitted, std::vector<FeatureModel>& keep) {
  Outcome o;
  const auto start = Clock::now();
  constexpr std::uint64_t kModels = 250;
  std::size_t problems = 0, mismatches = 0;
  keep.reserve(kModels);
  for (std::uint64_t seed = 0; seed < kModels; ++seed) {
    keep.push_back(qfm::testing::random_model(seed));
    const FeatureModel& m = keep.back();
    auto compare = [&](const config::PrunedProblem& p) {
      auto got = config::enumerate_configurations(p).configurations;
      auto want = config::brute_force_enumerate(p);
      ++problems;
      if (got != want) ++mismatches;
      emitted.push_back({&m, p.requirement, std::move(got), std::move(want)});
    };
    compare(config::unconstrained_problem(m));
    try {
      compare(config::apply_requirement(m, *m.requirement()));
    } catch (const config::RequirementUnsatisfiable&) {
      std::size_t valid = 0;
      config::for_each_valid_selection(m, m.requirement(), [&](const std::vector<bool>&) { ++valid; });
      ++problems;
      if (valid != 0) ++mismatches;
    }
  }
  const double elapsed = seconds_since(start);
  if (mismatches) o.fail(std::to_string(mismatches) + " mismatches");
  if (elapsed >= 60.0) o.fail("took " + std::to_string(elapsed) + " s");
  if (o.pass) {
    o.detail = std::to_string(kModels) + " models, " + std::to_string(problems) +
               " problems, 0 mismatches, " + std::to_string(elapsed).substr(0, 4) + " s";
  }
  return o;
}

// Every emitted configuration must verify. Each one then gets one random
// flip of a visible feature; a flip that lands outside the oracle's set
// must be rejected, one that lands on another valid configuration must be
// accepted.
Outcome criterion_verifier(std::vector<Emitted>& emitted) {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::size_t checked = 0, rejected = 0, still_valid = 0;
  for (const auto& e : emitted) {
    const FeatureModel& m = *e.model;
    const auto visible = config::visible_features(m);
    std::set<std::vector<FeatureId>> valid;
    for (const auto& c : e.oracle) valid.insert(c.selected);
    for (const auto& c : e.configurations) {
      ++checked;
      if (!config::verify_configuration(m, e.requirement, c).empty()) {
        o.fail("an emitted configuration fails verification");
        continue;
      }
      if (visible.empty()) continue;
      const FeatureId flip = visible[std::uniform_int_distribution<std::size_t>(0, visible.size() - 1)(rng)];
      Configuration mutated;
      for (FeatureId f : visible) {
        if (c.contains(f) != (f == flip)) mutated.selected.push_back(f);
      }
      mutated.bindings = config::effective_bindings(m, e.requirement, mutated.selected);
      const bool violated = !config::verify_configuration(m, e.requirement, mutated).empty();
      if (valid.count(mutated.selected)) {
        ++still_valid;
        if (violated) o.fail("a mutation onto a valid configuration was rejected");
      } else {
        ++rejected;
        if (!violated) o.fail("a mutated configuration passed verification");
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(checked) + " verified, " + std::to_string(rejected) +
               " mutants rejected, " + std::to_string(still_valid) + " mutants landed on valid configurations";
  }
  return o;
}

Outcome criterion_golden() {
  Outcome o;
  auto r = qfm_cli({"configs", source_path("examples/child_features.qfm"), "--format", "csv"});
  const std::string golden = read_text(source_path("tests/golden/child_features.csv"));
  if (r.code != 0) o.fail("exit code " + std::to_string(r.code));
  if (r.out != golden) o.fail("output differs from tests/golden/child_features.csv");
  auto m = load_example("child_features.qfm");
  if (m.feature_count() != 7) o.fail("model has " + std::to_string(m.feature_count()) + " features");
  auto p = config::apply_requirement(m, *m.requirement());
  if (config::enumerate_configurations(p).configurations != config::brute_force_enumerate(p)) {
    o.fail("enumerator differs from the oracle");
  }
  if (o.pass) o.detail = std::to_string(csv_rows(golden).size() - 1) + " configurations, byte-identical";
  return o;
}

Outcome criterion_round_trip() {
  Outcome o;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(source_path("examples"))) {
    if (e.path().extension() == ".qfm" && e.path().parent_path().filename() != "requirements") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 10) o.fail("only " + std::to_string(files.size()) + " corpus files");
  const fs::path scratch = fs::temp_directory_path() / ("qfm_acceptance_" + std::to_string(::getpid()) + ".qfm");
  for (const auto& path : files) {
    const std::string name = path.filename().string();
    auto first = dsl::parse_model(read_text(path.string()), path.string());
    if (!first.ok()) {
      o.fail(name + " does not parse");
      continue;
    }
    auto second = dsl::parse_model(dsl::serialize_model(*first.model), name);
    if (!second.ok() || !(*second.model == *first.model)) o.fail(name + " does not round-trip");

    auto once = qfm_cli({"fmt", path.string()});
    std::ofstream(scratch, std::ios::binary) << once.out;
    auto twice = qfm_cli({"fmt", scratch.string()});
    if (once.code != 0 || twice.code != 0 || once.out != twice.out) o.fail("fmt is not idempotent on " + name);
  }
  std::error_code ec;
  fs::remove(scratch, ec);
  if (o.pass) o.detail = std::to_string(files.size()) + " files";
  return o;
}

Outcome criterion_unsatisfiable() {
  Outcome o;
  const std::string path = source_path("examples/unsatisfiable.qfm");
  auto m = load_example("unsatisfiable.qfm");
  const auto label = m.find_attribute("Dataset", "Label");
  if (!label || m.requirement()->bound_value(*label) != m.attribute(*label).value_index("binary")) {
    o.fail("the example does not set Dataset.Label = binary");
  }
  auto first = qfm_cli({"configs", path});
  auto second = qfm_cli({"configs", path});
  if (first.code != 2) o.fail("exit code " + std::to_string(first.code));
  if (first.err != second.err) o.fail("message is not deterministic");
  std::size_t chains = 0;
  for (std::size_t at = first.err.find(" holds because:\n"); at != std::string::npos;
       at = first.err.find(" holds because:\n", at + 1)) {
    ++chains;
  }
  if (chains != 2) o.fail(std::to_string(chains) + " provenance chains");
  if (first.err.find("[ATTR_SPEC]") == std::string::npos) o.fail("chain does not reach the attribute specification");
  if (o.pass) o.detail = "exit 2, two chains, stable message";
  return o;
}

Outcome criterion_desk_scale() {
  Outcome o;
  auto m = load_example("desk_scale.qfm");
  if (m.feature_count() != 30) o.fail(std::to_string(m.feature_count()) + " features");
  auto p = config::apply_requirement(m, *m.requirement());
  const auto start = Clock::now();
  auto all = config::enumerate_configurations(p);
  const double elapsed = seconds_since(start);
  const auto count = config::count_configurations(p);
  if (all.configurations.size() != 10240 || all.truncated) {
    o.fail("enumerated " + std::to_string(all.configurations.size()));
  }
  if (count != 10240) o.fail("counted " + std::to_string(count));
  if (elapsed >= 2.0) o.fail("took " + std::to_string(elapsed) + " s");
  auto cli_count = qfm_cli({"count", source_path("examples/desk_scale.qfm")});
  if (cli_count.out != "10240\n") o.fail("qfm count printed " + cli_count.out);
  if (o.pass) o.detail = "10240 configurations in " + std::to_string(elapsed * 1000).substr(0, 5) + " ms";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int number, const char* title, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << number << " " << title << ": " << o.detail << "\n";
  };

  std::vector<Emitted> emitted;
  std::vector<FeatureModel> models;
  FeatureModel study = load_example("classification.qfm");

  report(1, "classification table", criterion_table);
  report(2, "pruning provenance", criterion_provenance);
  report(3, "oracle equivalence", [&] { return criterion_oracle(emitted, models); });
  report(4, "verifier soundness", [&] {
    auto p = config::apply_requirement(study, *study.requirement());
    emitted.push_back({&study, p.requirement, config::enumerate_configurations(p).configurations,
                       config::brute_force_enumerate(p)});
    Outcome o = criterion_verifier(emitted);
    // On the case study no single flip leads to another valid configuration.
    const auto visible = config::visible_features(study);
    std::size_t flips = 0;
    for (const auto& c : emitted.back().configurations) {
      for (FeatureId flip : visible) {
        Configuration mutated;
        for (FeatureId f : visible) {
          if (c.contains(f) != (f == flip)) mutated.selected.push_back(f);
        }
        mutated.bindings = config::effective_bindings(study, study.requirement(), mutated.selected);
        ++flips;
        if (config::verify_configuration(study, study.requirement(), mutated).empty()) {
          o.fail("a flip of `" + study.feature(flip).name + "` passes on the case study");
        }
      }
    }
    if (o.pass) o.detail += "; all " + std::to_string(flips) + " case-study flips rejected";
    return o;
  });
  report(5, "child features golden", criterion_golden);
  report(6, "round-trip", criterion_round_trip);
  report(7, "unsatisfiable requirement", criterion_unsatisfiable);
  report(8, "desk scale", criterion_desk_scale);
  return failures == 0 ? 0 : 1;
}
