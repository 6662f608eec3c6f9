#include "cogrel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cogrel/errors.hpp"
#include "cogrel/model.hpp"

namespace cogrel {

double quantize_report(double v) { return std::round(v * 20.0) / 20.0; }

std::pair<Trajectory, HybridModel> synthesize(const SynthSpec& spec) {
  if (spec.horizon < 1)
    throw DomainError("synthesize: horizon must be >= 1, got " +
                      std::to_string(spec.horizon));
  if (spec.report_period < 1)
    throw DomainError("synthesize: report period must be >= 1, got " +
                      std::to_string(spec.report_period));
  if (!spec.initial.is_finite())
    throw DomainError("synthesize: non-finite initial state");
  if (spec.initial_q != 0 && spec.initial_q != 1)
    throw DomainError("synthesize: initial reliance must be 0 or 1");
  if (!spec.model.is_finite())
    throw DomainError("synthesize: non-finite model");
  for (std::size_t i = 0; i < spec.complexity_switches.size(); ++i) {
    const int s = spec.complexity_switches[i];
    if (s < 1 || s > spec.horizon)
      throw DomainError("synthesize: switch index " + std::to_string(s) +
                        " outside [1, " + std::to_string(spec.horizon) + "]");
    if (i > 0 && s <= spec.complexity_switches[i - 1])
      throw DomainError("synthesize: switch indices must be strictly increasing");
  }

  const std::size_t n = static_cast<std::size_t>(spec.horizon) + 1;
  Trajectory traj;
  traj.sample_time = 1.0;
  traj.complexity.resize(n, 0.0);
  {
    std::size_t si = 0;
    int level = 0;
    for (std::size_t k = 0; k < n; ++k) {
      while (si < spec.complexity_switches.size() &&
             static_cast<std::size_t>(spec.complexity_switches[si]) == k) {
        level ^= 1;
        ++si;
      }
      traj.complexity[k] = static_cast<double>(level);
    }
  }

  const SimulatedTrajectory sim =
      simulate(spec.initial, spec.initial_q, traj.complexity, spec.model);
  traj.reliance = sim.reliance;

  for (int k = 0; k <= spec.horizon; k += spec.report_period) {
    CognitiveState x = sim.states[static_cast<std::size_t>(k)];
    if (spec.quantize) {
      x.trust = quantize_report(x.trust);
      x.risk = quantize_report(x.risk);
      x.workload = quantize_report(x.workload);
    }
    traj.self_reports.emplace(k, x);
  }

  traj.validate();
  return {traj, spec.model};
}

}  // namespace cogrel
