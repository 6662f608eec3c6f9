#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cogrel/nelder_mead.hpp"
#include "cogrel/types.hpp"

namespace cogrel {

// One-step prediction errors for a single channel. The predictor chains
// forward from the first self-report and is reset to the measured value at
// every report, so errors[i] is the pre-reset error at indices[i] (absolute
// sample index); the anchoring first report contributes no error.
struct PredictionErrorTrace {
  std::vector<double> errors;
  std::vector<int> indices;

  double norm() const;  // 2-norm of errors
};

struct ContinuousFit {
  AffineParams params;
  double cost = 0.0;  // prediction error 2-norm at params (no penalty terms)
  int iterations = 0;
  bool converged = false;
  // Set when the channel carries no information: every self-report in the
  // window equals the same value and the input never changes.
  bool degenerate = false;
};

struct ContinuousFitOptions {
  // Extra start appended to the built-in schedule, e.g. a previous fit.
  std::optional<AffineParams> init;
  NelderMeadOptions simplex;
  // Inertia values for the start schedule; each start is (a0, 0, (1-a0)*mean
  // of the channel's reports), i.e. a fixed point at the report mean.
  std::vector<double> start_inertia{0.5, 0.7, 0.9, 0.95, 0.99};
  double stability_margin = 1e-6;  // keeps |a| <= 1 - margin
  double penalty_weight = 1e6;
};

PredictionErrorTrace error_trace(Channel channel, const Trajectory& traj,
                                 const AffineParams& params);

// Fits (a, b, c) for one channel by minimizing the prediction error 2-norm
// subject to |a| < 1. Runs Nelder-Mead from every start; the lowest cost
// wins, ties going to the smallest |a| and then to schedule order. Needs at
// least 4 self-reports.
ContinuousFit fit_channel(Channel channel, const Trajectory& traj,
                          const ContinuousFitOptions& opts = {});

// All three channels, independently (indexed by Channel order T, R, W).
std::array<ContinuousFit, 3> fit_all(const Trajectory& traj,
                                     const ContinuousFitOptions& opts = {});

}  // namespace cogrel
