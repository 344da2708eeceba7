#pragma once

#include <algorithm>
#include <filesystem>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "smellcheck/error.hpp"
#include "smellcheck/review_session.hpp"
#include "smellcheck/source_model.hpp"

namespace smellcheck {

/// Java files under each root, in a stable order. A root may be a single
/// file. Missing or unreadable roots raise Io.
inline std::vector<std::string> collect_java_files(const std::vector<std::string>& roots) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& root : roots) {
    std::error_code ec;
    const fs::path p(root);
    auto status = fs::status(p, ec);
    if (ec || !fs::exists(status)) throw Error(ErrorCode::Io, "no such path: " + root);
    if (fs::is_regular_file(status)) {
      out.push_back(p.generic_string());
      continue;
    }
    if (!fs::is_directory(status)) throw Error(ErrorCode::Io, "not a file or directory: " + root);
    std::vector<std::string> found;
    fs::recursive_directory_iterator it(p, ec), end;
    if (ec) throw Error(ErrorCode::Io, "cannot read directory " + root + ": " + ec.message());
    for (; it != end; it.increment(ec)) {
      if (ec) throw Error(ErrorCode::Io, "cannot read directory " + root + ": " + ec.message());
      if (it->is_regular_file() && it->path().extension() == ".java") {
        found.push_back((p / fs::relative(it->path(), p)).generic_string());
      }
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  // a file named twice is parsed once
  std::vector<std::string> unique;
  for (auto& f : out) {
    if (std::find(unique.begin(), unique.end(), f) == unique.end()) unique.push_back(f);
  }
  return unique;
}

/// Parses files on a few worker threads; result order follows `paths`.
inline std::vector<SourceUnit> parse_files(const std::vector<std::string>& paths,
                                           const ParseOptions& options = {}) {
  std::vector<SourceUnit> units(paths.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < paths.size(); i += workers) {
        units[i] = parse_unit(read_file(paths[i]), paths[i], options);
      }
    }));
  }
  for (auto& j : jobs) j.get();  // rethrows the first failure
  return units;
}

inline ProjectModel load_project(const std::vector<std::string>& paths,
                                 const ParseOptions& options = {}) {
  return resolve_project(parse_files(paths, options));
}

/// Lines [from, to] of a file, clamped to what exists.
inline std::vector<std::string> source_lines(const std::string& path, std::size_t from,
                                             std::size_t to) {
  const std::string text = read_file(path);
  std::vector<std::string> lines;
  std::size_t line = 1, start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      if (i == text.size() && start == i) break;
      if (line >= from && line <= to) {
        std::string l = text.substr(start, i - start);
        if (!l.empty() && l.back() == '\r') l.pop_back();
        lines.push_back(std::move(l));
      }
      ++line;
      start = i + 1;
    }
  }
  return lines;
}

}  // namespace smellcheck
