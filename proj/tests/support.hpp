#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "smellcheck/smellcheck.hpp"

namespace fixtures {

inline std::filesystem::path dir() { return SMELLCHECK_FIXTURES; }
inline std::filesystem::path corpus() { return dir() / "corpus"; }

inline smellcheck::ProjectModel corpus_model() {
  return smellcheck::load_project(smellcheck::collect_java_files({corpus().string()}));
}

inline smellcheck::ProjectModel model_of(const std::vector<std::string>& sources) {
  std::vector<smellcheck::SourceUnit> units;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    units.push_back(smellcheck::parse_unit(sources[i], "U" + std::to_string(i) + ".java"));
  }
  return smellcheck::resolve_project(std::move(units));
}

// A clock that ticks one second per call, from a fixed origin.
inline smellcheck::Clock ticking_clock() {
  auto n = std::make_shared<int>(0);
  return [n] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2024-01-01T00:%02d:%02dZ", (*n / 60) % 60, *n % 60);
    ++*n;
    return std::string(buf);
  };
}

}  // namespace fixtures

namespace fixtures {

// Code of the smellcheck::Error thrown by f, or nullopt if nothing was thrown.
template <class F>
std::optional<smellcheck::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const smellcheck::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace fixtures
