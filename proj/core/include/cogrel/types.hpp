#pragma once

#include <array>
#include <map>
#include <set>
#include <vector>

namespace cogrel {

// The three continuous cognitive channels. Order matters: it is the canonical
// iteration order (T, R, W) used for tie-breaking and output formatting.
enum class Channel { trust = 0, risk = 1, workload = 2 };

inline constexpr std::array<Channel, 3> kChannels{Channel::trust, Channel::risk,
                                                  Channel::workload};

const char* channel_letter(Channel c);  // "T" / "R" / "W"
const char* channel_name(Channel c);    // "trust" / "risk" / "workload"

// Continuous state vector on the normalized self-report scale (nominally
// [0, 1], but never clamped; the dynamics may leave the box).
struct CognitiveState {
  double trust = 0.0;
  double risk = 0.0;
  double workload = 0.0;

  double component(Channel c) const;
  double& component(Channel c);
  bool is_finite() const;

  friend bool operator==(const CognitiveState&, const CognitiveState&) = default;
};

// One channel's affine update: next = a * current + b * d + c.
struct AffineParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  bool is_finite() const;
  // Fixed point c / (1 - a) for constant d = 0; only meaningful when a != 1.
  double fixed_point() const { return c / (1.0 - a); }

  friend bool operator==(const AffineParams&, const AffineParams&) = default;
};

// Switching surface of the reliance rule: rely when trust is high enough,
// perceived risk low enough, or workload high enough.
struct Thresholds {
  double trust = 0.0;
  double risk = 0.0;
  double workload = 0.0;

  double component(Channel c) const;
  double& component(Channel c);
  bool is_finite() const;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

// Full 12-parameter participant model: three decoupled affine channels plus
// the reliance thresholds.
struct HybridModel {
  AffineParams trust;
  AffineParams risk;
  AffineParams workload;
  Thresholds thresholds;

  const AffineParams& params(Channel c) const;
  AffineParams& params(Channel c);
  bool is_finite() const;

  friend bool operator==(const HybridModel&, const HybridModel&) = default;
};

// Observed data over one identification window, sampled at a fixed rate and
// re-indexed so k = 0 is the window start. complexity and reliance are dense
// (one entry per step, k = 0..N); self-reports are sparse.
struct Trajectory {
  double sample_time = 1.0;
  std::vector<double> complexity;              // d(k), each 0 or 1
  std::vector<int> reliance;                   // q(k), each 0 or 1
  std::map<int, CognitiveState> self_reports;  // keyed by sample index k

  int horizon() const { return static_cast<int>(complexity.size()) - 1; }
  int first_report_index() const;
  std::vector<int> report_indices() const;

  // Throws DomainError / InsufficientDataError on any broken invariant:
  // length mismatch, values outside {0,1}, report index out of range,
  // fewer than 2 samples or no self-report at all.
  void validate() const;
};

// Output of an open-loop model rollout, aligned with the complexity signal it
// was driven by (states[0] is the initial condition).
struct SimulatedTrajectory {
  std::vector<CognitiveState> states;
  std::vector<int> reliance;

  int size() const { return static_cast<int>(states.size()); }
};

}  // namespace cogrel
