#include <doctest.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "files.hpp"

using qfm::testing::read_text;
using qfm::testing::source_path;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run qfm_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = qfm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string example(const std::string& name) { return source_path("examples/" + name); }

// A scratch copy that is removed when the test ends.
class TempFile {
 public:
  TempFile(const std::string& name, const std::string& text)
      : path_(fs::temp_directory_path() / ("qfm_test_" + std::to_string(::getpid()) + "_" + name)) {
    std::ofstream(path_, std::ios::binary) << text;
  }
  ~TempFile() {
    std::error_code ec;
    fs::permissions(path_, fs::perms::owner_all, ec);
    fs::remove(path_, ec);
  }
  std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

std::size_t count_lines(const std::string& s) { return std::count(s.begin(), s.end(), '\n'); }

}  // namespace

TEST_CASE("check summarizes a valid model") {
  auto r = qfm_run({"check", example("classification.qfm")});
  CHECK(r.code == 0);
  CHECK(r.out == example("classification.qfm") +
                     ": 21 features, 3 qualities, 5 constraints\nanomalies: none\n");
  CHECK(r.err.empty());
}

TEST_CASE("check reports diagnostics with exit 1") {
  TempFile bad("bad.qfm", "model M { abstract feature R { feature A feature A } }\n");
  auto r = qfm_run({"check", bad.path()});
  CHECK(r.code == 1);
  CHECK(r.out.empty());
  CHECK(r.err.find("error[E010]") != std::string::npos);
  CHECK(r.err.find("\x1b[") == std::string::npos);
}

TEST_CASE("warnings alone keep exit 0 and --quiet hides them") {
  TempFile warn("warn.qfm", "model M { abstract feature R { abstract feature E feature A } }\n");
  auto r = qfm_run({"check", warn.path()});
  CHECK(r.code == 0);
  CHECK(r.err.find("warning[W010]") != std::string::npos);
  r = qfm_run({"--quiet", "check", warn.path()});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.empty());
}

TEST_CASE("usage errors exit 3") {
  CHECK(qfm_run({}).code == 3);
  CHECK(qfm_run({"frobnicate"}).code == 3);
  CHECK(qfm_run({"check"}).code == 3);
  CHECK(qfm_run({"configs", "--format", "xml", example("classification.qfm")}).code == 3);
  auto r = qfm_run({"check", "/nonexistent/model.qfm"});
  CHECK(r.code == 3);
  CHECK(r.err == "error: cannot read `/nonexistent/model.qfm`\n");
  CHECK(qfm_run({"--help"}).code == 0);
}

TEST_CASE("configs lists the classification configurations") {
  auto r = qfm_run({"configs", "--format", "csv", example("classification.qfm")});
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 9);
  CHECK(r.out.rfind(
            "Dataset,SP,DI,EO,Reweighing,DIR,EG,Blackbox,Precision,Recall,Zero One Loss,Accuracy,KNN,"
            "Logistic Regression,Neural Networks,Decision Trees\n",
            0) == 0);

  auto table = qfm_run({"configs", example("classification.qfm")});
  CHECK(table.code == 0);
  CHECK(count_lines(table.out) == 9);
  CHECK(table.out.rfind("#  Dataset  SP", 0) == 0);
}

TEST_CASE("json output") {
  auto r = qfm_run({"configs", "--format", "json", example("classification.qfm")});
  REQUIRE(r.code == 0);
  auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["model"] == "ML Pipeline");
  CHECK(doc["task"] == "classification");
  CHECK(doc["truncated"] == false);
  CHECK(doc["count"] == 8);
  REQUIRE(doc["configurations"].size() == 8);
  const auto& first = doc["configurations"][0];
  CHECK(first["index"] == 1);
  CHECK(first["features"][0] == "Dataset");
  CHECK(first["bindings"].size() == 2);
  CHECK(first["bindings"][0]["attribute"] == "Dataset.Label");
  CHECK(first["bindings"][0]["value"] == "multi-class");
  REQUIRE(doc["thresholds"].size() == 4);
  CHECK(doc["thresholds"][0]["quality"] == "Fairness");
  CHECK(doc["thresholds"][0]["metric"] == "DI");
  CHECK(doc["thresholds"][0]["implementer"] == "DI");
  CHECK(doc["thresholds"][0]["comparator"] == ">=");
  CHECK(doc["thresholds"][0]["value"] == 0.8);
}

TEST_CASE("--limit truncates with a notice") {
  auto r = qfm_run({"configs", "--format", "csv", "--limit", "3", example("classification.qfm")});
  CHECK(r.code == 0);
  CHECK(count_lines(r.out) == 4);
  CHECK(r.err == "note: output truncated to the first 3 configurations (--limit 3)\n");

  auto all = qfm_run({"configs", "--format", "csv", "--limit", "8", example("classification.qfm")});
  CHECK(all.err.empty());
  CHECK(count_lines(all.out) == 9);
}

TEST_CASE("count and --count-only agree") {
  auto a = qfm_run({"count", example("classification.qfm")});
  auto b = qfm_run({"configs", "--count-only", example("classification.qfm")});
  CHECK(a.code == 0);
  CHECK(a.out == "8\n");
  CHECK(b.out == a.out);
  CHECK(qfm_run({"count", example("desk_scale.qfm")}).out == "10240\n");
}

TEST_CASE("a separate requirement file replaces the embedded one") {
  auto r = qfm_run({"--requirement", example("requirements/binary_label.qfm"), "count",
                    example("classification.qfm")});
  CHECK(r.code == 0);
  CHECK(r.out == "16\n");
  r = qfm_run({"count", "--requirement", example("requirements/binary_label.qfm"),
               example("classification.qfm")});
  CHECK(r.out == "16\n");
}

TEST_CASE("a model without a requirement cannot be configured") {
  auto r = qfm_run({"configs", example("minimal.qfm")});
  CHECK(r.code == 3);
  CHECK(r.err == "error: `" + example("minimal.qfm") +
                     "` has no `requirement` block; add one or pass --requirement <file>\n");
}

TEST_CASE("an unsatisfiable requirement exits 2 with both chains") {
  auto r = qfm_run({"configs", example("unsatisfiable.qfm")});
  CHECK(r.code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.rfind("error: requirement is unsatisfiable: ", 0) == 0);
  CHECK(r.err.find(" holds because:\n") != std::string::npos);
  CHECK(r.err.find("  not ") != std::string::npos);
  CHECK(qfm_run({"configs", example("unsatisfiable.qfm")}).err == r.err);
  CHECK(qfm_run({"count", example("unsatisfiable.qfm")}).code == 2);
}

TEST_CASE("explain") {
  auto r = qfm_run({"explain", example("classification.qfm")});
  CHECK(r.code == 0);
  CHECK(r.out.find("influence:\n  Prediction Correctness <-> Fairness [MODEL]\n") != std::string::npos);
  CHECK(r.out.find("warnings for requirement `classification`:\n") != std::string::npos);
  CHECK(r.out.find("pipeline steps:\n  Fairness: ") != std::string::npos);

  auto none = qfm_run({"explain", example("no_qualities.qfm")});
  CHECK(none.code == 0);
  CHECK(none.out == "no quality properties declared\n");

  auto builtin = qfm_run({"explain", "--builtin", example("privacy_only.qfm")});
  CHECK(builtin.out.find("Privacy <-> Interpretability [BUILTIN]") != std::string::npos);
}

TEST_CASE("fmt prints canonical text and is idempotent") {
  auto once = qfm_run({"fmt", example("classification.qfm")});
  REQUIRE(once.code == 0);
  TempFile copy("fmt.qfm", once.out);
  auto twice = qfm_run({"fmt", copy.path()});
  CHECK(twice.out == once.out);
}

TEST_CASE("fmt --write rewrites in place") {
  TempFile file("write.qfm", read_text(example("child_features.qfm")));
  auto r = qfm_run({"fmt", "--write", file.path()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const std::string first = read_text(file.path());
  CHECK(first == qfm_run({"fmt", example("child_features.qfm")}).out);
  CHECK(qfm_run({"fmt", "--write", file.path()}).code == 0);
  CHECK(read_text(file.path()) == first);
}

TEST_CASE("fmt --write refuses a read-only file") {
  const std::string original = read_text(example("minimal.qfm"));
  TempFile file("readonly.qfm", original);
  fs::permissions(file.path(), fs::perms::owner_read | fs::perms::group_read | fs::perms::others_read);
  auto r = qfm_run({"fmt", "--write", file.path()});
  CHECK(r.code == 3);
  CHECK(r.err == "error: `" + file.path() + "` is not writable\n");
  CHECK(read_text(file.path()) == original);
}

TEST_CASE("colored diagnostics are opt-in") {
  TempFile bad("color.qfm", "model M { abstract feature R { feature A feature A } }\n");
  ::setenv("QFM_COLOR", "always", 1);
  auto colored = qfm_run({"check", bad.path()});
  ::setenv("QFM_COLOR", "never", 1);
  auto plain = qfm_run({"check", bad.path()});
  ::unsetenv("QFM_COLOR");
  CHECK(colored.err.find("\x1b[") != std::string::npos);
  CHECK(plain.err.find("\x1b[") == std::string::npos);
}
