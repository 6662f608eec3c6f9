#include "cogrel/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "cogrel/continuous_id.hpp"
#include "cogrel/errors.hpp"
#include "cogrel/model.hpp"
#include "cogrel/threshold_id.hpp"

namespace cogrel {

const char* rmse_mode_name(RmseMode mode) {
  return mode == RmseMode::reset ? "reset" : "open_loop";
}

double FitReport::rmse(Channel c) const {
  switch (c) {
    case Channel::risk: return rmse_risk;
    case Channel::workload: return rmse_workload;
    default: return rmse_trust;
  }
}

double rmse(Channel channel, const Trajectory& traj,
            const SimulatedTrajectory& sim, int sim_start,
            std::span<const int> eval_indices) {
  if (eval_indices.empty())
    throw DomainError("rmse: empty evaluation index set");
  double acc = 0.0;
  for (int k : eval_indices) {
    const auto it = traj.self_reports.find(k);
    if (it == traj.self_reports.end())
      throw DomainError("rmse: no self-report at k=" + std::to_string(k));
    const int j = k - sim_start;
    if (j < 0 || j >= sim.size())
      throw DomainError("rmse: k=" + std::to_string(k) +
                        " outside the simulated range");
    const double e =
        sim.states[static_cast<std::size_t>(j)].component(channel) -
        it->second.component(channel);
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(eval_indices.size()));
}

std::set<Channel> active_thresholds(const SimulatedTrajectory& sim,
                                    const Thresholds& th) {
  if (!th.is_finite())
    throw DomainError("active_thresholds: non-finite thresholds");
  std::set<Channel> active;
  const auto predicate = [&](Channel c, const CognitiveState& x) {
    switch (c) {
      case Channel::trust: return x.trust > th.trust;
      case Channel::risk: return x.risk < th.risk;
      case Channel::workload: return x.workload > th.workload;
    }
    return false;
  };
  for (Channel c : kChannels) {
    for (int k = 1; k < sim.size(); ++k) {
      const bool toggled = predicate(c, sim.states[static_cast<std::size_t>(k)]) !=
                           predicate(c, sim.states[static_cast<std::size_t>(k) - 1]);
      const bool flipped = sim.reliance[static_cast<std::size_t>(k)] !=
                           sim.reliance[static_cast<std::size_t>(k) - 1];
      if (toggled && flipped) {
        active.insert(c);
        break;
      }
    }
  }
  return active;
}

FitReport report(const Trajectory& traj, const HybridModel& m, RmseMode mode) {
  traj.validate();
  if (!m.is_finite()) throw DomainError("report: non-finite model");

  const ThresholdFit tf = rollout_accuracy(traj, m);
  const std::vector<int> ks = traj.report_indices();
  const double n = static_cast<double>(ks.size());

  FitReport r;
  r.rmse_mode = mode;
  r.accuracy = tf.accuracy;
  r.active_set = tf.active_set;

  if (mode == RmseMode::reset) {
    for (Channel c : kChannels) {
      const PredictionErrorTrace trace = error_trace(c, traj, m.params(c));
      double acc = 0.0;
      for (double e : trace.errors) acc += e * e;
      // The anchoring report predicts itself exactly; it adds a zero error
      // term and still counts in the denominator.
      const double value = std::sqrt(acc / n);
      switch (c) {
        case Channel::trust: r.rmse_trust = value; break;
        case Channel::risk: r.rmse_risk = value; break;
        case Channel::workload: r.rmse_workload = value; break;
      }
    }
  } else {
    const int k0 = traj.first_report_index();
    const SimulatedTrajectory sim =
        simulate(traj.self_reports.at(k0),
                 traj.reliance[static_cast<std::size_t>(k0)],
                 std::span<const double>(traj.complexity).subspan(
                     static_cast<std::size_t>(k0)),
                 m);
    r.rmse_trust = rmse(Channel::trust, traj, sim, k0, ks);
    r.rmse_risk = rmse(Channel::risk, traj, sim, k0, ks);
    r.rmse_workload = rmse(Channel::workload, traj, sim, k0, ks);
  }

  r.meets_bar = r.rmse_trust <= kRmseBar && r.rmse_risk <= kRmseBar &&
                r.rmse_workload <= kRmseBar && r.accuracy > kAccuracyBar;
  return r;
}

std::string active_set_label(const std::set<Channel>& active) {
  if (active.empty()) return "--";
  std::string out;
  for (Channel c : kChannels) {
    if (!active.count(c)) continue;
    if (!out.empty()) out += ",";
    out += channel_letter(c);
  }
  return out;
}

std::string table_header() {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%8s%8s%8s%9s  %s", "rmse_T", "rmse_R",
                "rmse_W", "acc_pct", "active");
  return buf;
}

std::string table_row(const FitReport& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%8.4f%8.4f%8.4f%9.2f  %s", r.rmse_trust,
                r.rmse_risk, r.rmse_workload, 100.0 * r.accuracy,
                active_set_label(r.active_set).c_str());
  return buf;
}

}  // namespace cogrel
