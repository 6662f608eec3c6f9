#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "cogrel/types.hpp"

namespace cogrel {

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double h = 0.0;      // Silverman bandwidth factor (4 / (3n))^(1/5)
  double sigma = 0.0;  // sample standard deviation, n-1 denominator
  int n_samples = 0;
  double mean = 0.0;    // of the raw samples
  double median = 0.0;  // of the raw samples (midpoint average for even n)
};

double silverman_factor(int n);

// Gaussian kernel density with bandwidth h * sigma, evaluated on the given
// strictly increasing grid. Needs >= 2 samples with non-degenerate spread
// (sigma above 1e-8 * max(1, max |sample|)).
KdeCurve kde(std::span<const double> samples, std::span<const double> grid);

// Evenly spaced grid spanning [min - 3 h sigma, max + 3 h sigma].
std::vector<double> auto_grid(std::span<const double> samples,
                              int points = 512);

// One identified participant, reduced to what population statistics need.
struct ParticipantParams {
  std::array<AffineParams, 3> channels;  // indexed by Channel order T, R, W
  std::array<double, 3> rmse{};          // per-channel reporting RMSE
};

inline constexpr std::array<const char*, 9> kViolinParams{
    "a_T", "b_T", "c_T", "a_R", "b_R", "c_R", "a_W", "b_W", "c_W"};

// Population density of one affine parameter across participants whose fit
// passed (every channel RMSE <= 0.1), on an auto grid.
KdeCurve violin_data(const std::string& param,
                     std::span<const ParticipantParams> participants);

}  // namespace cogrel
