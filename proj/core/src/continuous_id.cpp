#include "cogrel/continuous_id.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cogrel/errors.hpp"
#include "cogrel/model.hpp"

namespace cogrel {

namespace {

// Flattened per-channel view of a trajectory for the optimizer hot path.
struct ChannelData {
  const std::vector<double>* d = nullptr;
  std::vector<int> report_k;     // ascending; report_k[0] anchors the chain
  std::vector<double> report_x;
};

ChannelData make_channel_data(Channel ch, const Trajectory& traj) {
  ChannelData data;
  data.d = &traj.complexity;
  data.report_k.reserve(traj.self_reports.size());
  data.report_x.reserve(traj.self_reports.size());
  for (const auto& [k, x] : traj.self_reports) {
    data.report_k.push_back(k);
    data.report_x.push_back(x.component(ch));
  }
  return data;
}

// Chained one-step predictions with reset-to-measurement at every report;
// returns the squared 2-norm of the pre-reset errors.
double residual_sq(const ChannelData& data, const AffineParams& p) {
  const std::vector<double>& d = *data.d;
  double acc = 0.0;
  double xhat = data.report_x[0];
  std::size_t next = 1;
  for (int k = data.report_k[0] + 1; next < data.report_k.size(); ++k) {
    xhat = step_scalar(xhat, d[static_cast<std::size_t>(k) - 1], p);
    if (k == data.report_k[next]) {
      const double e = xhat - data.report_x[next];
      acc += e * e;
      xhat = data.report_x[next];
      ++next;
    }
  }
  return acc;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

bool constant_input(const ChannelData& data) {
  const std::vector<double>& d = *data.d;
  const int k0 = data.report_k.front();
  const int k1 = data.report_k.back();
  for (int k = k0; k < k1; ++k)
    if (d[static_cast<std::size_t>(k)] != d[static_cast<std::size_t>(k0)])
      return false;
  return true;
}

bool constant_reports(const ChannelData& data) {
  for (double x : data.report_x)
    if (x != data.report_x.front()) return false;
  return true;
}

}  // namespace

double PredictionErrorTrace::norm() const {
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc);
}

PredictionErrorTrace error_trace(Channel channel, const Trajectory& traj,
                                 const AffineParams& params) {
  traj.validate();
  if (!params.is_finite())
    throw DomainError("error_trace: non-finite parameters");
  if (traj.self_reports.size() < 2)
    throw InsufficientDataError(
        "error_trace: need at least 2 self-reports, got " +
        std::to_string(traj.self_reports.size()));

  const ChannelData data = make_channel_data(channel, traj);
  PredictionErrorTrace trace;
  trace.errors.reserve(data.report_k.size() - 1);
  trace.indices.assign(data.report_k.begin() + 1, data.report_k.end());

  const std::vector<double>& d = *data.d;
  double xhat = data.report_x[0];
  std::size_t next = 1;
  for (int k = data.report_k[0] + 1; next < data.report_k.size(); ++k) {
    xhat = step_scalar(xhat, d[static_cast<std::size_t>(k) - 1], params);
    if (k == data.report_k[next]) {
      trace.errors.push_back(xhat - data.report_x[next]);
      xhat = data.report_x[next];
      ++next;
    }
  }
  return trace;
}

ContinuousFit fit_channel(Channel channel, const Trajectory& traj,
                          const ContinuousFitOptions& opts) {
  traj.validate();
  if (traj.self_reports.size() < 4)
    throw InsufficientDataError(
        "fit_channel: need at least 4 self-reports, got " +
        std::to_string(traj.self_reports.size()));
  if (opts.start_inertia.empty() && !opts.init)
    throw DomainError("fit_channel: no starts configured");
  if (!(opts.stability_margin > 0.0) || opts.stability_margin >= 1.0)
    throw DomainError("fit_channel: stability margin must be in (0, 1)");

  const ChannelData data = make_channel_data(channel, traj);
  const double xbar = mean(data.report_x);
  const double a_lim = 1.0 - opts.stability_margin;

  // Outside |a| < 1 - margin the cost is evaluated at the projected a plus a
  // quadratic pull-back, so the landscape stays continuous at the wall.
  const auto penalized = [&](std::span<const double> p) {
    const double a = p[0], b = p[1], c = p[2];
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
      return std::numeric_limits<double>::infinity();
    if (std::abs(a) >= a_lim) {
      const double aproj = std::clamp(a, -a_lim, a_lim);
      const double excess = std::abs(a) - a_lim;
      return std::sqrt(residual_sq(data, {aproj, b, c})) +
             opts.penalty_weight * excess * excess;
    }
    return std::sqrt(residual_sq(data, {a, b, c}));
  };

  std::vector<AffineParams> starts;
  starts.reserve(opts.start_inertia.size() + 1);
  for (double a0 : opts.start_inertia)
    starts.push_back({a0, 0.0, (1.0 - a0) * xbar});
  if (opts.init) starts.push_back(*opts.init);

  NelderMeadResult best;
  bool have_best = false;
  for (const AffineParams& s : starts) {
    const double x0[3] = {s.a, s.b, s.c};
    NelderMeadResult r = nelder_mead(penalized, x0, opts.simplex);
    const bool better =
        !have_best || r.cost < best.cost ||
        (r.cost == best.cost && std::abs(r.x[0]) < std::abs(best.x[0]));
    if (better) {
      best = std::move(r);
      have_best = true;
    }
  }

  ContinuousFit fit;
  fit.params.a = std::clamp(best.x[0], -a_lim, a_lim);
  fit.params.b = best.x[1];
  fit.params.c = best.x[2];
  fit.cost = std::sqrt(residual_sq(data, fit.params));
  fit.iterations = best.iterations;
  fit.converged = best.converged;
  fit.degenerate = constant_reports(data) && constant_input(data);
  return fit;
}

std::array<ContinuousFit, 3> fit_all(const Trajectory& traj,
                                     const ContinuousFitOptions& opts) {
  return {fit_channel(Channel::trust, traj, opts),
          fit_channel(Channel::risk, traj, opts),
          fit_channel(Channel::workload, traj, opts)};
}

}  // namespace cogrel
