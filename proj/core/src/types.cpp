#include "cogrel/types.hpp"

#include <cmath>
#include <string>

#include "cogrel/errors.hpp"

namespace cogrel {

const char* channel_letter(Channel c) {
  switch (c) {
    case Channel::trust: return "T";
    case Channel::risk: return "R";
    case Channel::workload: return "W";
  }
  return "?";
}

const char* channel_name(Channel c) {
  switch (c) {
    case Channel::trust: return "trust";
    case Channel::risk: return "risk";
    case Channel::workload: return "workload";
  }
  return "?";
}

double CognitiveState::component(Channel c) const {
  switch (c) {
    case Channel::trust: return trust;
    case Channel::risk: return risk;
    case Channel::workload: return workload;
  }
  return trust;
}

double& CognitiveState::component(Channel c) {
  switch (c) {
    case Channel::risk: return risk;
    case Channel::workload: return workload;
    default: return trust;
  }
}

bool CognitiveState::is_finite() const {
  return std::isfinite(trust) && std::isfinite(risk) && std::isfinite(workload);
}

bool AffineParams::is_finite() const {
  return std::isfinite(a) && std::isfinite(b) && std::isfinite(c);
}

double Thresholds::component(Channel c) const {
  switch (c) {
    case Channel::trust: return trust;
    case Channel::risk: return risk;
    case Channel::workload: return workload;
  }
  return trust;
}

double& Thresholds::component(Channel c) {
  switch (c) {
    case Channel::risk: return risk;
    case Channel::workload: return workload;
    default: return trust;
  }
}

bool Thresholds::is_finite() const {
  return std::isfinite(trust) && std::isfinite(risk) && std::isfinite(workload);
}

const AffineParams& HybridModel::params(Channel c) const {
  switch (c) {
    case Channel::risk: return risk;
    case Channel::workload: return workload;
    default: return trust;
  }
}

AffineParams& HybridModel::params(Channel c) {
  switch (c) {
    case Channel::risk: return risk;
    case Channel::workload: return workload;
    default: return trust;
  }
}

bool HybridModel::is_finite() const {
  return trust.is_finite() && risk.is_finite() && workload.is_finite() &&
         thresholds.is_finite();
}

int Trajectory::first_report_index() const {
  if (self_reports.empty())
    throw InsufficientDataError("trajectory has no self-reports");
  return self_reports.begin()->first;
}

std::vector<int> Trajectory::report_indices() const {
  std::vector<int> ks;
  ks.reserve(self_reports.size());
  for (const auto& [k, x] : self_reports) ks.push_back(k);
  return ks;
}

namespace {

bool is_binary(double v) { return v == 0.0 || v == 1.0; }

}  // namespace

void Trajectory::validate() const {
  if (!(sample_time > 0.0) || !std::isfinite(sample_time))
    throw DomainError("sample_time must be positive and finite");
  if (complexity.size() != reliance.size())
    throw DomainError("complexity and reliance must have equal length (got " +
                      std::to_string(complexity.size()) + " vs " +
                      std::to_string(reliance.size()) + ")");
  if (complexity.size() < 2)
    throw InsufficientDataError("trajectory needs at least 2 samples, got " +
                                std::to_string(complexity.size()));
  for (std::size_t k = 0; k < complexity.size(); ++k) {
    if (!is_binary(complexity[k]))
      throw DomainError("complexity must be 0 or 1 at k=" + std::to_string(k));
    if (reliance[k] != 0 && reliance[k] != 1)
      throw DomainError("reliance must be 0 or 1 at k=" + std::to_string(k));
  }
  if (self_reports.empty())
    throw InsufficientDataError("trajectory has no self-reports");
  for (const auto& [k, x] : self_reports) {
    if (k < 0 || k > horizon())
      throw DomainError("self-report index " + std::to_string(k) +
                        " outside [0, " + std::to_string(horizon()) + "]");
    if (!x.is_finite())
      throw DomainError("self-report at k=" + std::to_string(k) +
                        " has non-finite components");
  }
}

}  // namespace cogrel
