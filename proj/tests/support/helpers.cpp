#include "helpers.hpp"

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cogrel::testing {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto base = fs::temp_directory_path();
  path_ = base / ("cogrel-test-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);  // best effort
}

CliResult run_cli(const std::vector<std::string>& args,
                  const std::string& env) {
  static std::atomic<int> counter{0};
  const auto capture = fs::temp_directory_path() /
                       ("cogrel-cli-out-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++) + ".txt");

  std::ostringstream cmd;
  cmd << "env -u HYBRID_ID_SEED";
  if (!env.empty()) cmd << " " << env;
  cmd << " '" << COGREL_CLI_PATH << "'";
  for (const auto& a : args) cmd << " '" << a << "'";
  cmd << " > '" << capture.string() << "' 2>&1";

  const int status = std::system(cmd.str().c_str());

  CliResult r;
  r.output = read_file(capture);
  std::error_code ec;
  fs::remove(capture, ec);
  if (status == -1)
    r.exit_code = -1;
  else if (WIFEXITED(status))
    r.exit_code = WEXITSTATUS(status);
  else
    r.exit_code = 128;
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

SynthSpec default_spec() {
  SynthSpec spec;
  spec.horizon = 400;
  spec.report_period = 10;
  for (int s = 50; s <= 400; s += 50) spec.complexity_switches.push_back(s);
  spec.initial = {0.55, 0.45, 0.3};
  spec.initial_q = 0;
  spec.model.trust = {0.90, -0.04, 0.05};
  spec.model.risk = {0.85, 0.06, 0.06};
  spec.model.workload = {0.80, 0.15, 0.05};
  spec.model.thresholds = {0.55, 0.25, 0.60};
  return spec;
}

Trajectory make_trajectory(
    std::vector<double> d, std::vector<int> q,
    std::vector<std::pair<int, CognitiveState>> reports) {
  Trajectory t;
  t.complexity = std::move(d);
  t.reliance = std::move(q);
  for (auto& [k, x] : reports) t.self_reports.emplace(k, x);
  return t;
}

}  // namespace cogrel::testing
