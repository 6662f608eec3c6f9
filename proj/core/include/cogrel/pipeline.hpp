#pragma once

#include <array>
#include <set>

#include "cogrel/continuous_id.hpp"
#include "cogrel/metrics.hpp"
#include "cogrel/threshold_id.hpp"
#include "cogrel/types.hpp"

namespace cogrel {

struct IdentifyOptions {
  ContinuousFitOptions continuous;
  GaOptions ga;
  RmseMode rmse_mode = RmseMode::reset;
};

// Full identification result for one trajectory window.
struct IdentifyOutcome {
  std::array<ContinuousFit, 3> fits;  // by Channel order T, R, W
  ThresholdFit thresholds;
  HybridModel model;
  FitReport fit_report;
  bool all_converged = false;
};

// Runs the whole pipeline: per-channel affine fits, threshold search on top
// of them, and the fit report.
IdentifyOutcome identify(const Trajectory& traj,
                         const IdentifyOptions& opts = {});

// Held-out evaluation of a model identified on the front part of the window.
struct ValidationReport {
  double rmse_trust = 0.0;
  double rmse_risk = 0.0;
  double rmse_workload = 0.0;
  double accuracy = 0.0;
  // Channels whose training reports move by less than one report increment
  // (0.05); their held-out errors say little about the model.
  std::set<Channel> low_excitation;
  double split_fraction = 0.0;
  int boundary_index = 0;  // absolute index of the boundary self-report
  RmseMode rmse_mode = RmseMode::open_loop;

  double rmse(Channel c) const;
};

struct ValidationOutcome {
  ValidationReport report;
  IdentifyOutcome training;
  int train_reports = 0;    // boundary report included
  int holdout_reports = 0;  // reports after the boundary
};

// Splits at the ceil(fraction * n)-th self-report (1-indexed): that report
// and everything before it trains the model; it then seeds an open-loop
// rollout which is scored against the held-out reports and reliance. Needs
// at least 4 reports on each side.
ValidationOutcome split_half_validate(const Trajectory& traj, double fraction,
                                      const IdentifyOptions& opts = {});

}  // namespace cogrel
