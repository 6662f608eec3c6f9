#include "cogrel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cogrel/errors.hpp"
#include "cogrel/model.hpp"

namespace cogrel {

double ValidationReport::rmse(Channel c) const {
  switch (c) {
    case Channel::risk: return rmse_risk;
    case Channel::workload: return rmse_workload;
    default: return rmse_trust;
  }
}

IdentifyOutcome identify(const Trajectory& traj, const IdentifyOptions& opts) {
  IdentifyOutcome out;
  out.fits = fit_all(traj, opts.continuous);
  const std::array<AffineParams, 3> channels{
      out.fits[0].params, out.fits[1].params, out.fits[2].params};
  out.thresholds = fit_thresholds(traj, channels, opts.ga);
  out.model = HybridModel{channels[0], channels[1], channels[2],
                          out.thresholds.thresholds};
  out.fit_report = report(traj, out.model, opts.rmse_mode);
  out.all_converged = out.fits[0].converged && out.fits[1].converged &&
                      out.fits[2].converged;
  return out;
}

namespace {

// Report spread per channel over the training window, for the excitation
// check (one report increment = 0.05).
double report_range(const Trajectory& traj, Channel c, int last_k) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& [k, x] : traj.self_reports) {
    if (k > last_k) break;
    const double v = x.component(c);
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  return hi - lo;
}

}  // namespace

ValidationOutcome split_half_validate(const Trajectory& traj, double fraction,
                                      const IdentifyOptions& opts) {
  traj.validate();
  if (!(fraction > 0.0 && fraction < 1.0))
    throw DomainError("split fraction must be in (0, 1)");

  const std::vector<int> ks = traj.report_indices();
  const int n = static_cast<int>(ks.size());
  const int m = static_cast<int>(
      std::ceil(fraction * static_cast<double>(n)));  // 1-indexed boundary
  if (m < 4 || n - m < 4)
    throw InsufficientDataError(
        "split-half validation needs at least 4 self-reports per side, got " +
        std::to_string(m) + " / " + std::to_string(n - m));

  const int boundary = ks[static_cast<std::size_t>(m - 1)];

  Trajectory training;
  training.sample_time = traj.sample_time;
  training.complexity.assign(traj.complexity.begin(),
                             traj.complexity.begin() + boundary + 1);
  training.reliance.assign(traj.reliance.begin(),
                           traj.reliance.begin() + boundary + 1);
  for (const auto& [k, x] : traj.self_reports)
    if (k <= boundary) training.self_reports.emplace(k, x);

  ValidationOutcome out;
  out.training = identify(training, opts);
  out.train_reports = m;
  out.holdout_reports = n - m;

  // The boundary report seeds the held-out rollout but is scored with the
  // training half, so every held-out error term is a genuine prediction.
  const SimulatedTrajectory sim = simulate(
      traj.self_reports.at(boundary),
      traj.reliance[static_cast<std::size_t>(boundary)],
      std::span<const double>(traj.complexity).subspan(
          static_cast<std::size_t>(boundary)),
      out.training.model);

  const std::vector<int> holdout(ks.begin() + m, ks.end());

  ValidationReport& rep = out.report;
  rep.split_fraction = fraction;
  rep.boundary_index = boundary;
  rep.rmse_mode = opts.rmse_mode;

  if (opts.rmse_mode == RmseMode::open_loop) {
    rep.rmse_trust = rmse(Channel::trust, traj, sim, boundary, holdout);
    rep.rmse_risk = rmse(Channel::risk, traj, sim, boundary, holdout);
    rep.rmse_workload = rmse(Channel::workload, traj, sim, boundary, holdout);
  } else {
    // Chained one-step predictions over the held-out half, reset at each
    // held-out report; the boundary report anchors the chain.
    Trajectory tail;
    tail.sample_time = traj.sample_time;
    tail.complexity.assign(traj.complexity.begin() + boundary,
                           traj.complexity.end());
    tail.reliance.assign(traj.reliance.begin() + boundary,
                         traj.reliance.end());
    for (const auto& [k, x] : traj.self_reports)
      if (k >= boundary) tail.self_reports.emplace(k - boundary, x);
    for (Channel c : kChannels) {
      const PredictionErrorTrace trace =
          error_trace(c, tail, out.training.model.params(c));
      double acc = 0.0;
      for (double e : trace.errors) acc += e * e;
      const double value =
          std::sqrt(acc / static_cast<double>(out.holdout_reports));
      switch (c) {
        case Channel::trust: rep.rmse_trust = value; break;
        case Channel::risk: rep.rmse_risk = value; break;
        case Channel::workload: rep.rmse_workload = value; break;
      }
    }
  }

  long agree = 0, scored = 0;
  for (int k = boundary + 1; k <= traj.horizon(); ++k) {
    const int j = k - boundary;
    agree += sim.reliance[static_cast<std::size_t>(j)] ==
                     traj.reliance[static_cast<std::size_t>(k)]
                 ? 1
                 : 0;
    ++scored;
  }
  if (scored == 0)
    throw InsufficientDataError(
        "split-half validation: no samples after the boundary report");
  rep.accuracy = static_cast<double>(agree) / static_cast<double>(scored);

  for (Channel c : kChannels)
    if (report_range(traj, c, boundary) < 0.05) rep.low_excitation.insert(c);

  return out;
}

}  // namespace cogrel
