#include "cogrel/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cogrel/errors.hpp"

namespace cogrel {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

double guarded(double v) {
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& objective,
    std::span<const double> start, const NelderMeadOptions& opts) {
  const std::size_t n = start.size();
  if (n == 0) throw DomainError("nelder_mead: empty start point");
  if (opts.max_iterations < 0)
    throw DomainError("nelder_mead: negative iteration budget");

  const auto eval = [&](const std::vector<double>& x) {
    return guarded(objective(std::span<const double>(x)));
  };

  // n+1 vertices: the start plus one step along each coordinate.
  std::vector<std::vector<double>> v(n + 1,
                                     std::vector<double>(start.begin(), start.end()));
  for (std::size_t i = 0; i < n; ++i) v[i + 1][i] += opts.initial_step;
  std::vector<double> f(n + 1);
  for (std::size_t i = 0; i <= n; ++i) f[i] = eval(v[i]);

  std::vector<std::size_t> order(n + 1);
  const auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
  };

  NelderMeadResult res;
  sort_vertices();
  res.best_cost_history.push_back(f[order[0]]);

  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    const std::size_t best = order[0];
    const std::size_t worst = order[n];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        diameter = std::max(diameter, std::abs(v[i][j] - v[best][j]));
    }
    const double spread = f[worst] - f[best];
    if (diameter < opts.x_tol && spread < opts.f_tol) {
      res.converged = true;
      break;
    }

    // Centroid of all vertices except the worst.
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += v[i][j];
    }
    for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

    for (std::size_t j = 0; j < n; ++j)
      xr[j] = centroid[j] + kReflect * (centroid[j] - v[worst][j]);
    const double fr = eval(xr);

    bool shrink = false;
    if (fr < f[order[0]]) {
      for (std::size_t j = 0; j < n; ++j)
        xe[j] = centroid[j] + kExpand * kReflect * (centroid[j] - v[worst][j]);
      const double fe = eval(xe);
      if (fe < fr) {
        v[worst] = xe;
        f[worst] = fe;
      } else {
        v[worst] = xr;
        f[worst] = fr;
      }
    } else if (fr < f[order[n - 1]]) {
      v[worst] = xr;
      f[worst] = fr;
    } else if (fr < f[worst]) {
      // Outside contraction, between the reflected point and the centroid.
      for (std::size_t j = 0; j < n; ++j)
        xc[j] = centroid[j] + kContract * kReflect * (centroid[j] - v[worst][j]);
      const double fc = eval(xc);
      if (fc <= fr) {
        v[worst] = xc;
        f[worst] = fc;
      } else {
        shrink = true;
      }
    } else {
      // Inside contraction, between the worst vertex and the centroid.
      for (std::size_t j = 0; j < n; ++j)
        xc[j] = centroid[j] - kContract * (centroid[j] - v[worst][j]);
      const double fc = eval(xc);
      if (fc < f[worst]) {
        v[worst] = xc;
        f[worst] = fc;
      } else {
        shrink = true;
      }
    }

    if (shrink) {
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == order[0]) continue;
        for (std::size_t j = 0; j < n; ++j)
          v[i][j] = v[order[0]][j] + kShrink * (v[i][j] - v[order[0]][j]);
        f[i] = eval(v[i]);
      }
    }

    sort_vertices();
    res.best_cost_history.push_back(f[order[0]]);
  }

  res.iterations = iter;
  res.x = v[order[0]];
  res.cost = f[order[0]];
  return res;
}

}  // namespace cogrel
