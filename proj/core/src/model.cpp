#include "cogrel/model.hpp"

#include <cmath>
#include <string>

#include "cogrel/errors.hpp"

namespace cogrel {

CognitiveState step_state(const CognitiveState& x, double d,
                          const HybridModel& m) {
  if (!x.is_finite()) throw DomainError("step_state: non-finite state");
  if (!std::isfinite(d)) throw DomainError("step_state: non-finite input");
  if (!m.is_finite()) throw DomainError("step_state: non-finite parameters");
  return CognitiveState{
      .trust = step_scalar(x.trust, d, m.trust),
      .risk = step_scalar(x.risk, d, m.risk),
      .workload = step_scalar(x.workload, d, m.workload),
  };
}

int reliance_of(const CognitiveState& x, const Thresholds& th) {
  if (!x.is_finite()) throw DomainError("reliance_of: non-finite state");
  if (!th.is_finite()) throw DomainError("reliance_of: non-finite thresholds");
  const bool rely = x.trust > th.trust || x.risk < th.risk ||
                    x.workload > th.workload;
  return rely ? 1 : 0;
}

SimulatedTrajectory simulate(const CognitiveState& initial, int initial_q,
                             std::span<const double> complexity,
                             const HybridModel& m) {
  if (complexity.empty())
    throw DomainError("simulate: empty complexity signal");
  if (initial_q != 0 && initial_q != 1)
    throw DomainError("simulate: initial reliance must be 0 or 1, got " +
                      std::to_string(initial_q));
  if (!initial.is_finite()) throw DomainError("simulate: non-finite initial state");
  if (!m.is_finite()) throw DomainError("simulate: non-finite parameters");

  SimulatedTrajectory out;
  out.states.reserve(complexity.size());
  out.reliance.reserve(complexity.size());
  out.states.push_back(initial);
  out.reliance.push_back(initial_q);
  for (std::size_t k = 1; k < complexity.size(); ++k) {
    out.states.push_back(step_state(out.states[k - 1], complexity[k - 1], m));
    out.reliance.push_back(reliance_of(out.states[k], m.thresholds));
  }
  return out;
}

}  // namespace cogrel
