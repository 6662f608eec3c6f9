#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cogrel/kde.hpp"
#include "cogrel/metrics.hpp"
#include "cogrel/pipeline.hpp"
#include "cogrel/synth.hpp"
#include "cogrel/types.hpp"

namespace cogrel {

// One line of a raw study log: instants where the scenario or the driver
// changed state, plus timed self-report probes (0-100 scale, steps of 5).
enum class RawKind {
  complexity_enter,  // scenario complexity turns on
  complexity_exit,   // and off
  engage,            // driver starts relying on the automation
  disengage,
  self_report,
};

const char* raw_kind_name(RawKind k);

struct RawRecord {
  double t = 0.0;
  RawKind kind = RawKind::self_report;
  double trust = 0.0;  // payload, report records only
  double risk = 0.0;
  double workload = 0.0;
};

// Resamples a raw event stream onto the unit grid: timestamps round half-up
// to sample indices, interval events become zero-order-held binary signals
// over half-open [enter, exit) index ranges, report payloads are scaled to
// [0, 1], and everything before window_start is cut with indices shifted so
// k = 0 is the window start. Records must be time-sorted; intervals must
// pair up without overlap; at most one report per sample index.
Trajectory build_trajectory(std::span<const RawRecord> records,
                            double sample_time, double window_start);

// CSV with header t,kind,T,R,W (payload cells empty except for reports).
std::vector<RawRecord> load_raw_records(const std::filesystem::path& path);
void save_raw_records(const std::filesystem::path& path,
                      std::span<const RawRecord> records);

// CSV with header k,d,q,T,R,W; one row per sample, report cells empty on
// rows without a self-report. Only unit-sample-time trajectories are stored.
void save_trajectory(const std::filesystem::path& path, const Trajectory& t);
Trajectory load_trajectory(const std::filesystem::path& path);

struct StoredModel {
  HybridModel model;
  std::uint64_t seed = 0;
};

// JSON object with trust/risk/workload {a,b,c}, thresholds {T,R,W} and
// meta {seed, version}. Doubles round-trip bit-exactly.
void save_model(const std::filesystem::path& path, const HybridModel& m,
                std::uint64_t seed);
StoredModel load_model(const std::filesystem::path& path);

void save_report(const std::filesystem::path& path, const FitReport& r);
FitReport load_report(const std::filesystem::path& path);

void save_validation(const std::filesystem::path& path,
                     const ValidationOutcome& v);

// KDE output pair: the curve as CSV (y,density) and the distribution
// statistics as JSON.
void save_kde_curve(const std::filesystem::path& path, const KdeCurve& c);
void save_kde_stats(const std::filesystem::path& path,
                    const std::string& param, const KdeCurve& c);

SynthSpec load_synth_spec(const std::filesystem::path& path);
void save_synth_spec(const std::filesystem::path& path, const SynthSpec& s);

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

}  // namespace cogrel
