#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cogrel/types.hpp"

namespace cogrel {

// Recipe for a synthetic participant: a ground-truth model driven by a
// square-wave complexity signal, observed through periodic self-reports.
struct SynthSpec {
  int horizon = 0;        // N; the trajectory covers k = 0..N
  int report_period = 0;  // self-report every this many steps, starting at 0
  // d starts at 0 and toggles at each listed index (ascending, within [1, N]).
  std::vector<int> complexity_switches;
  CognitiveState initial;
  int initial_q = 0;
  bool quantize = false;  // snap the generated reports to the 0.05 grid
  HybridModel model;
  std::uint64_t seed = 42;  // carried into output metadata, nothing else
};

// Nearest multiple of 0.05 (no clamping).
double quantize_report(double v);

// Rolls the ground-truth model forward and packages the result as observed
// data: dense complexity and reliance, sparse (optionally quantized)
// self-reports at k = 0, period, 2*period, ... The generating model is
// returned alongside.
std::pair<Trajectory, HybridModel> synthesize(const SynthSpec& spec);

}  // namespace cogrel
