#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qfm/dsl.hpp"

namespace qfm::testing {

inline std::string source_path(const std::string& relative) {
  return std::string(QFM_SOURCE_DIR) + "/" + relative;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline FeatureModel load_example(const std::string& name) {
  const std::string path = source_path("examples/" + name);
  auto parsed = dsl::parse_model(read_text(path), path);
  if (!parsed.ok()) throw std::runtime_error(dsl::format_diagnostics(parsed.diagnostics));
  return std::move(*parsed.model);
}

}  // namespace qfm::testing

namespace qfm::testing {

inline FeatureModel parse_text(const std::string& text) {
  auto parsed = dsl::parse_model(text, "test.qfm");
  if (!parsed.ok()) throw std::runtime_error(dsl::format_diagnostics(parsed.diagnostics));
  return std::move(*parsed.model);
}

}  // namespace qfm::testing
