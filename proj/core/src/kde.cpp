#include "cogrel/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cogrel/errors.hpp"
#include "cogrel/metrics.hpp"

namespace cogrel {

namespace {

struct SampleStats {
  double mean = 0.0;
  double sigma = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
};

SampleStats analyze(std::span<const double> samples) {
  if (samples.size() < 2)
    throw InsufficientDataError("kde: need at least 2 samples, got " +
                                std::to_string(samples.size()));
  SampleStats s;
  double abs_max = 0.0;
  s.min = samples[0];
  s.max = samples[0];
  for (double y : samples) {
    if (!std::isfinite(y)) throw DomainError("kde: non-finite sample");
    s.mean += y;
    s.min = std::min(s.min, y);
    s.max = std::max(s.max, y);
    abs_max = std::max(abs_max, std::abs(y));
  }
  const double n = static_cast<double>(samples.size());
  s.mean /= n;
  double ss = 0.0;
  for (double y : samples) ss += (y - s.mean) * (y - s.mean);
  s.sigma = std::sqrt(ss / (n - 1.0));
  if (s.sigma <= 1e-8 * std::max(1.0, abs_max))
    throw DegenerateDistributionError(
        "kde: sample spread is (numerically) zero");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[m]
                                    : 0.5 * (sorted[m - 1] + sorted[m]);
  return s;
}

}  // namespace

double silverman_factor(int n) {
  if (n < 1) throw DomainError("silverman_factor: n must be >= 1");
  return std::pow(4.0 / (3.0 * static_cast<double>(n)), 0.2);
}

KdeCurve kde(std::span<const double> samples, std::span<const double> grid) {
  const SampleStats stats = analyze(samples);
  if (grid.empty()) throw DomainError("kde: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw DomainError("kde: non-finite grid point");
    if (i > 0 && !(grid[i] > grid[i - 1]))
      throw DomainError("kde: grid must be strictly increasing");
  }

  KdeCurve curve;
  curve.n_samples = static_cast<int>(samples.size());
  curve.h = silverman_factor(curve.n_samples);
  curve.sigma = stats.sigma;
  curve.mean = stats.mean;
  curve.median = stats.median;
  curve.grid.assign(grid.begin(), grid.end());
  curve.density.resize(grid.size());

  const double bw = curve.h * curve.sigma;
  const double norm = 1.0 / (static_cast<double>(curve.n_samples) * bw *
                             std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double y : samples) {
      const double z = (grid[g] - y) / bw;
      acc += std::exp(-0.5 * z * z);
    }
    curve.density[g] = norm * acc;
  }
  return curve;
}

std::vector<double> auto_grid(std::span<const double> samples, int points) {
  if (points < 2) throw DomainError("auto_grid: need at least 2 points");
  const SampleStats stats = analyze(samples);
  const double pad =
      3.0 * silverman_factor(static_cast<int>(samples.size())) * stats.sigma;
  const double lo = stats.min - pad;
  const double hi = stats.max + pad;
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] = lo + static_cast<double>(i) * step;
  return grid;
}

KdeCurve violin_data(const std::string& param,
                     std::span<const ParticipantParams> participants) {
  int which = -1;
  for (std::size_t i = 0; i < kViolinParams.size(); ++i)
    if (param == kViolinParams[i]) which = static_cast<int>(i);
  if (which < 0)
    throw DomainError("violin_data: unknown parameter name '" + param + "'");
  const int ci = which / 3;
  const int coeff = which % 3;

  std::vector<double> samples;
  for (const ParticipantParams& p : participants) {
    if (p.rmse[0] > kRmseBar || p.rmse[1] > kRmseBar || p.rmse[2] > kRmseBar)
      continue;
    const AffineParams& ch = p.channels[static_cast<std::size_t>(ci)];
    samples.push_back(coeff == 0 ? ch.a : coeff == 1 ? ch.b : ch.c);
  }
  if (samples.size() < 2)
    throw InsufficientDataError(
        "violin_data: fewer than 2 participants pass the fit bar (" +
        std::to_string(samples.size()) + ")");
  return kde(samples, auto_grid(samples));
}

}  // namespace cogrel
