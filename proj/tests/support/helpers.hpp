#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cogrel/synth.hpp"
#include "cogrel/types.hpp"

namespace cogrel::testing {

// Self-deleting scratch directory for file round-trip and CLI tests.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

// Runs the command-line tool with the given arguments. The ambient
// HYBRID_ID_SEED is stripped unless env (e.g. "HYBRID_ID_SEED=7") asks
// otherwise, so tests see a fixed default seed.
CliResult run_cli(const std::vector<std::string>& args,
                  const std::string& env = {});

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

// The recoverable reference participant used across suites.
SynthSpec default_spec();

// Dense trajectory with reports every `period` steps taken verbatim from a
// caller-supplied state table.
Trajectory make_trajectory(std::vector<double> d, std::vector<int> q,
                           std::vector<std::pair<int, CognitiveState>> reports);

}  // namespace cogrel::testing
