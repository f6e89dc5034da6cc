#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lab/config.hpp"
#include "szego/parallel.hpp"

namespace szego::lab {

inline constexpr const char* kToolVersion = "szego-lab 0.3.0";

struct OutputFile {
  std::string name;
  std::string content;
};

/// What a command computes: the payload plus plot-ready data files.
struct CommandOutput {
  Json payload;
  std::vector<OutputFile> files;
  bool suitePassed = true;  ///< false only for a failing `suite`
};

/// Pure computation; no disk access.
CommandOutput execute(const ExperimentConfig& config, Exec exec);

struct ResultEnvelope {
  std::string configHash;
  std::string toolVersion = kToolVersion;
  double wallTime = 0.0;  ///< seconds
  Json payload;
  [[nodiscard]] Json toJson() const;
};

struct RunOptions {
  std::filesystem::path outDir = "szego-out";
  bool useCache = true;
  unsigned threads = 0;
  std::ostream* log = nullptr;  ///< warnings and progress; nullptr = silent
};

struct RunReport {
  ResultEnvelope envelope;
  bool cacheHit = false;
  bool suitePassed = true;
  std::vector<std::filesystem::path> written;
  std::vector<std::string> warnings;
};

/// Executes (or replays from the cache) and writes result.json, payload.json
/// and the command's CSV files into options.outDir.
RunReport run(const ExperimentConfig& config, const RunOptions& options);

/// Writes `content` to a sibling temp file and renames it over `path`.
void writeAtomically(const std::filesystem::path& path, const std::string& content);

/// Cache entry location for a config hash.
std::filesystem::path cachePath(const std::filesystem::path& outDir, const std::string& hash);

}  // namespace szego::lab
