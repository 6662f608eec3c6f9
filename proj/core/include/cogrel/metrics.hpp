#pragma once

#include <set>
#include <span>
#include <string>

#include "cogrel/types.hpp"

namespace cogrel {

// How continuous-state prediction errors are accumulated for reporting:
// reset chains one step ahead between self-reports and snaps back to the
// measurement at each one; open_loop never corrects.
enum class RmseMode { reset, open_loop };

const char* rmse_mode_name(RmseMode mode);

// Model-fit bar: every channel RMSE at or below this, accuracy strictly above.
inline constexpr double kRmseBar = 0.1;
inline constexpr double kAccuracyBar = 0.8;

struct FitReport {
  double rmse_trust = 0.0;
  double rmse_risk = 0.0;
  double rmse_workload = 0.0;
  double accuracy = 0.0;
  std::set<Channel> active_set;
  bool meets_bar = false;
  RmseMode rmse_mode = RmseMode::reset;

  double rmse(Channel c) const;
};

// RMSE between self-reports and a simulation, over eval_indices (absolute
// sample indices; each must carry a self-report and fall inside the
// simulation). sim_start is the absolute index of sim.states[0]. Divides by
// the number of eval indices.
double rmse(Channel channel, const Trajectory& traj,
            const SimulatedTrajectory& sim, int sim_start,
            std::span<const int> eval_indices);

// A threshold is active when its predicate toggles at some step where the
// predicted reliance flips at the same step; thresholds the rollout never
// exercises that way are inactive.
std::set<Channel> active_thresholds(const SimulatedTrajectory& sim,
                                    const Thresholds& th);

// Full per-participant fit summary against one trajectory: per-channel RMSE
// over all self-reports (the anchoring first report contributes zero error
// and is counted), rollout accuracy, active set, and the fit bar.
FitReport report(const Trajectory& traj, const HybridModel& m,
                 RmseMode mode = RmseMode::reset);

// "T,R,W" style rendering of an active set; "--" when empty.
std::string active_set_label(const std::set<Channel>& active);

// Fixed-width summary rows: RMSE to 4 decimals, accuracy in percent to 2.
std::string table_header();
std::string table_row(const FitReport& r);

}  // namespace cogrel
