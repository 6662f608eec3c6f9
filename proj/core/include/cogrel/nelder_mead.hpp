#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cogrel {

struct NelderMeadOptions {
  double initial_step = 0.05;  // simplex edge length added per coordinate
  double x_tol = 1e-8;         // simplex diameter threshold (inf-norm to best)
  double f_tol = 1e-10;        // cost spread threshold across vertices
  int max_iterations = 5000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double cost = 0.0;
  int iterations = 0;
  bool converged = false;
  // Best vertex cost before iterating, then after every iteration. Never
  // increases: the best vertex is only ever replaced by a better point.
  std::vector<double> best_cost_history;
};

// Downhill simplex with the classic fminsearch flow: reflection 1.0,
// expansion 2.0, contraction 0.5, shrink 0.5. Deterministic: same start and
// objective give the same path. Objective values that are NaN are treated as
// +infinity.
NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& opts = {});

}  // namespace cogrel
