#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <vector>

#include "cogrel/types.hpp"

namespace cogrel {

struct ConfusionCounts {
  long tp = 0;  // predicted rely, observed rely
  long tn = 0;  // predicted not, observed not
  long fp = 0;  // predicted rely, observed not
  long fn = 0;  // predicted not, observed rely

  long total() const { return tp + tn + fp + fn; }
  double accuracy() const;
};

struct ThresholdFit {
  Thresholds thresholds;
  double accuracy = 0.0;
  ConfusionCounts confusion;
  std::set<Channel> active_set;
};

struct GaOptions {
  int population = 60;
  int generations = 120;
  int tournament = 3;            // candidates per tournament draw
  double crossover_prob = 0.8;   // per offspring; uniform gene mix when hit
  double mutation_prob = 0.15;   // per gene
  double mutation_sigma_frac = 0.02;  // stddev as a fraction of box width
  int elitism = 2;
  int stagnation_limit = 25;     // stop after this many flat generations
  std::uint64_t seed = 42;
};

struct GaDiagnostics {
  // Population-best accuracy: entry 0 is the initial population, then one
  // entry per generation. Elitism makes the sequence non-decreasing.
  std::vector<double> best_accuracy;
  int generations_run = 0;
};

// Rolls the model out open-loop from the first self-report (initial reliance
// taken from the data) and scores predicted vs observed reliance over steps
// 1..end of window.
ThresholdFit rollout_accuracy(const Trajectory& traj, const HybridModel& m);

// Maximizes rollout accuracy over a per-channel threshold box
// [min simulated value - 0.05, max + 0.05] with a deterministic GA, then
// canonicalizes the winner: each active threshold is centered in its accuracy
// plateau (max-margin representative); each inactive one is parked at a box
// edge, chosen so that every predicted reliance value stays the same.
// Equal-accuracy candidates are ranked by plateau margin, then
// lexicographically (theta_T low, theta_R high, theta_W low).
ThresholdFit fit_thresholds(const Trajectory& traj,
                            const std::array<AffineParams, 3>& channels,
                            const GaOptions& opts = {},
                            GaDiagnostics* diag = nullptr);

// Exhaustive reference search on a uniform grid over the same box (values
// lo, lo+step, ...). Ties break lexicographically (theta_T low, theta_R
// high, theta_W low); the returned point is the literal grid point, with no
// plateau centering. Grids over 1e7 points are rejected.
ThresholdFit grid_oracle(const Trajectory& traj,
                         const std::array<AffineParams, 3>& channels,
                         double step);

}  // namespace cogrel
