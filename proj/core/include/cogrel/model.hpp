#pragma once

#include <span>

#include "cogrel/types.hpp"

namespace cogrel {

// One affine channel update. Every state prediction in the library goes
// through this exact expression so that chained rollouts, identification
// residuals and metrics agree bit for bit.
inline double step_scalar(double current, double d, const AffineParams& p) {
  return p.a * current + p.b * d + p.c;
}

// Advance the full continuous state one step under input d (no clamping; the
// channels are decoupled). Throws DomainError on non-finite input.
CognitiveState step_state(const CognitiveState& x, double d,
                          const HybridModel& m);

// Reliance rule: 1 iff trust > theta_T, or risk < theta_R, or
// workload > theta_W (all strict; a state exactly on a threshold does not
// trigger that term).
int reliance_of(const CognitiveState& x, const Thresholds& th);

// Open-loop rollout over a complexity signal d(0..N). states[k] and
// reliance[k] line up with complexity[k]; states[0] = initial, and
// reliance[0] = initial_q (taken from data, not from the rule, since the rule
// only defines reliance from step 1 on). complexity[N] is carried but unused.
// Throws DomainError on empty signal, non-binary initial_q, or a state that
// becomes non-finite mid-rollout.
SimulatedTrajectory simulate(const CognitiveState& initial, int initial_q,
                             std::span<const double> complexity,
                             const HybridModel& m);

}  // namespace cogrel
