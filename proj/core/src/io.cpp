#include "cogrel/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "cogrel/errors.hpp"
#include "json.hpp"

namespace cogrel {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

[[noreturn]] void fail_at(const std::filesystem::path& p, int line,
                          const std::string& what) {
  throw ParseError(p.string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_double_cell(const std::string& cell,
                         const std::filesystem::path& p, int line) {
  double v = 0.0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    fail_at(p, line, "bad number '" + cell + "'");
  return v;
}

int parse_int_cell(const std::string& cell, const std::filesystem::path& p,
                   int line) {
  int v = 0;
  const char* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    fail_at(p, line, "bad integer '" + cell + "'");
  return v;
}

// Reads lines with CRLF tolerance; returns false at EOF.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

// --- JSON helpers ---------------------------------------------------------

ordered_json parse_json(const std::filesystem::path& p) {
  std::ifstream in = open_in(p);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(p.string() + ": " + e.what());
  }
}

const ordered_json& need(const ordered_json& obj, const char* key,
                         const std::filesystem::path& p) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(p.string() + ": missing field '" + std::string(key) + "'");
  return *it;
}

template <typename T>
T need_as(const ordered_json& obj, const char* key,
          const std::filesystem::path& p) {
  try {
    return need(obj, key, p).get<T>();
  } catch (const nlohmann::json::type_error&) {
    throw ParseError(p.string() + ": field '" + std::string(key) +
                     "' has the wrong type");
  }
}

void check_version(const ordered_json& meta, const std::filesystem::path& p) {
  const int v = need_as<int>(meta, "version", p);
  if (v != kFormatVersion)
    throw ParseError(p.string() + ": unsupported format version " +
                     std::to_string(v));
}

ordered_json params_to_json(const AffineParams& a) {
  return ordered_json{{"a", a.a}, {"b", a.b}, {"c", a.c}};
}

AffineParams params_from_json(const ordered_json& j,
                              const std::filesystem::path& p) {
  return AffineParams{need_as<double>(j, "a", p), need_as<double>(j, "b", p),
                      need_as<double>(j, "c", p)};
}

ordered_json model_to_json(const HybridModel& m) {
  ordered_json j;
  j["trust"] = params_to_json(m.trust);
  j["risk"] = params_to_json(m.risk);
  j["workload"] = params_to_json(m.workload);
  j["thresholds"] = ordered_json{{"T", m.thresholds.trust},
                                 {"R", m.thresholds.risk},
                                 {"W", m.thresholds.workload}};
  return j;
}

HybridModel model_from_json(const ordered_json& j,
                            const std::filesystem::path& p) {
  HybridModel m;
  m.trust = params_from_json(need(j, "trust", p), p);
  m.risk = params_from_json(need(j, "risk", p), p);
  m.workload = params_from_json(need(j, "workload", p), p);
  const ordered_json& th = need(j, "thresholds", p);
  m.thresholds.trust = need_as<double>(th, "T", p);
  m.thresholds.risk = need_as<double>(th, "R", p);
  m.thresholds.workload = need_as<double>(th, "W", p);
  if (!m.is_finite())
    throw ParseError(p.string() + ": model has non-finite parameters");
  return m;
}

ordered_json channel_set_to_json(const std::set<Channel>& set) {
  ordered_json arr = ordered_json::array();
  for (Channel c : kChannels)
    if (set.count(c)) arr.push_back(channel_letter(c));
  return arr;
}

std::set<Channel> channel_set_from_json(const ordered_json& arr,
                                        const std::filesystem::path& p) {
  std::set<Channel> set;
  if (!arr.is_array())
    throw ParseError(p.string() + ": channel set is not an array");
  for (const auto& e : arr) {
    const std::string s = e.get<std::string>();
    if (s == "T")
      set.insert(Channel::trust);
    else if (s == "R")
      set.insert(Channel::risk);
    else if (s == "W")
      set.insert(Channel::workload);
    else
      throw ParseError(p.string() + ": unknown channel '" + s + "'");
  }
  return set;
}

RmseMode rmse_mode_from_string(const std::string& s,
                               const std::filesystem::path& p) {
  if (s == "reset") return RmseMode::reset;
  if (s == "open_loop") return RmseMode::open_loop;
  throw ParseError(p.string() + ": unknown rmse mode '" + s + "'");
}

void write_json(const std::filesystem::path& p, const ordered_json& j) {
  std::ofstream out = open_out(p);
  out << j.dump(2) << "\n";
  if (!out) throw Error("failed writing " + p.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const char* raw_kind_name(RawKind k) {
  switch (k) {
    case RawKind::complexity_enter: return "complexity_enter";
    case RawKind::complexity_exit: return "complexity_exit";
    case RawKind::engage: return "engage";
    case RawKind::disengage: return "disengage";
    case RawKind::self_report: return "self_report";
  }
  return "?";
}

// --- raw event stream -----------------------------------------------------

Trajectory build_trajectory(std::span<const RawRecord> records,
                            double sample_time, double window_start) {
  if (records.empty())
    throw InsufficientDataError("build_trajectory: no raw records");
  if (!(sample_time > 0.0) || !std::isfinite(sample_time))
    throw DomainError("build_trajectory: sample_time must be positive");
  if (!(window_start >= 0.0) || !std::isfinite(window_start))
    throw DomainError("build_trajectory: window_start must be >= 0");

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!std::isfinite(records[i].t))
      throw DomainError("build_trajectory: non-finite timestamp at record " +
                        std::to_string(i));
    if (i > 0 && records[i].t < records[i - 1].t)
      throw OutOfOrderError("record " + std::to_string(i) + " (t=" +
                            format_double(records[i].t) +
                            ") is earlier than its predecessor (t=" +
                            format_double(records[i - 1].t) + ")");
  }

  struct Interval {
    double a, b;
  };
  std::vector<Interval> complexity_iv, reliance_iv;
  bool c_open = false, r_open = false;
  double c_t0 = 0.0, r_t0 = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RawRecord& rec = records[i];
    switch (rec.kind) {
      case RawKind::complexity_enter:
        if (c_open)
          throw OverlappingIntervalError(
              "complexity interval reopened at record " + std::to_string(i));
        c_open = true;
        c_t0 = rec.t;
        break;
      case RawKind::complexity_exit:
        if (!c_open)
          throw UnpairedEventError("complexity exit without enter at record " +
                                   std::to_string(i));
        complexity_iv.push_back({c_t0, rec.t});
        c_open = false;
        break;
      case RawKind::engage:
        if (r_open)
          throw OverlappingIntervalError(
              "reliance interval reopened at record " + std::to_string(i));
        r_open = true;
        r_t0 = rec.t;
        break;
      case RawKind::disengage:
        if (!r_open)
          throw UnpairedEventError("disengage without engage at record " +
                                   std::to_string(i));
        reliance_iv.push_back({r_t0, rec.t});
        r_open = false;
        break;
      case RawKind::self_report:
        for (double v : {rec.trust, rec.risk, rec.workload}) {
          if (!std::isfinite(v) || v < 0.0 || v > 100.0)
            throw DomainError("self-report value " + format_double(v) +
                              " outside [0, 100] at record " +
                              std::to_string(i));
          if (std::abs(v / 5.0 - std::round(v / 5.0)) > 1e-9)
            throw DomainError("self-report value " + format_double(v) +
                              " not on the 5-step scale at record " +
                              std::to_string(i));
        }
        break;
    }
  }
  if (c_open) throw UnpairedEventError("complexity interval never closed");
  if (r_open) throw UnpairedEventError("reliance interval never closed");

  const int n_abs = round_half_up(records.back().t / sample_time);
  const int k_w = round_half_up(window_start / sample_time);
  const int len = n_abs - k_w + 1;
  if (len < 2)
    throw InsufficientDataError(
        "build_trajectory: window covers fewer than 2 samples");

  Trajectory traj;
  traj.sample_time = sample_time;
  traj.complexity.assign(static_cast<std::size_t>(len), 0.0);
  traj.reliance.assign(static_cast<std::size_t>(len), 0);

  const auto mark = [&](const Interval& iv, auto& arr, auto value) {
    const int ka = std::max(round_half_up(iv.a / sample_time), k_w);
    const int kb = std::min(round_half_up(iv.b / sample_time), n_abs + 1);
    for (int k = ka; k < kb; ++k)
      arr[static_cast<std::size_t>(k - k_w)] = value;
  };
  for (const Interval& iv : complexity_iv) mark(iv, traj.complexity, 1.0);
  for (const Interval& iv : reliance_iv) mark(iv, traj.reliance, 1);

  for (std::size_t i = 0; i < records.size(); ++i) {
    const RawRecord& rec = records[i];
    if (rec.kind != RawKind::self_report) continue;
    const int kr = round_half_up(rec.t / sample_time);
    if (kr < k_w) continue;
    const int key = kr - k_w;
    const CognitiveState x{rec.trust / 100.0, rec.risk / 100.0,
                           rec.workload / 100.0};
    if (!traj.self_reports.emplace(key, x).second)
      throw ReportCollisionError("two self-reports land on sample " +
                                 std::to_string(key) + " (record " +
                                 std::to_string(i) + ")");
  }
  if (traj.self_reports.empty())
    throw InsufficientDataError(
        "build_trajectory: no self-report inside the window");

  traj.validate();
  return traj;
}

std::vector<RawRecord> load_raw_records(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!next_line(in, line) || line != "t,kind,T,R,W")
    fail_at(path, 1, "expected header 't,kind,T,R,W'");

  std::vector<RawRecord> records;
  int lineno = 1;
  while (next_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != 5)
      fail_at(path, lineno, "expected 5 cells, got " +
                               std::to_string(cells.size()));
    RawRecord rec;
    rec.t = parse_double_cell(cells[0], path, lineno);
    const std::string& kind = cells[1];
    if (kind == "complexity_enter")
      rec.kind = RawKind::complexity_enter;
    else if (kind == "complexity_exit")
      rec.kind = RawKind::complexity_exit;
    else if (kind == "engage")
      rec.kind = RawKind::engage;
    else if (kind == "disengage")
      rec.kind = RawKind::disengage;
    else if (kind == "self_report")
      rec.kind = RawKind::self_report;
    else
      fail_at(path, lineno, "unknown record kind '" + kind + "'");

    if (rec.kind == RawKind::self_report) {
      if (cells[2].empty() || cells[3].empty() || cells[4].empty())
        fail_at(path, lineno, "report record with missing payload");
      rec.trust = parse_double_cell(cells[2], path, lineno);
      rec.risk = parse_double_cell(cells[3], path, lineno);
      rec.workload = parse_double_cell(cells[4], path, lineno);
    } else if (!cells[2].empty() || !cells[3].empty() || !cells[4].empty()) {
      fail_at(path, lineno, "payload on a non-report record");
    }
    records.push_back(rec);
  }
  return records;
}

void save_raw_records(const std::filesystem::path& path,
                      std::span<const RawRecord> records) {
  std::ofstream out = open_out(path);
  out << "t,kind,T,R,W\n";
  for (const RawRecord& rec : records) {
    out << format_double(rec.t) << "," << raw_kind_name(rec.kind) << ",";
    if (rec.kind == RawKind::self_report) {
      out << format_double(rec.trust) << "," << format_double(rec.risk) << ","
          << format_double(rec.workload);
    } else {
      out << ",,";
    }
    out << "\n";
  }
  if (!out) throw Error("failed writing " + path.string());
}

// --- trajectory CSV -------------------------------------------------------

void save_trajectory(const std::filesystem::path& path, const Trajectory& t) {
  t.validate();
  if (t.sample_time != 1.0)
    throw DomainError(
        "save_trajectory stores unit-sample-time windows only; resample first");
  std::ofstream out = open_out(path);
  out << "k,d,q,T,R,W\n";
  for (std::size_t k = 0; k < t.complexity.size(); ++k) {
    out << k << "," << static_cast<int>(t.complexity[k]) << ","
        << t.reliance[k] << ",";
    const auto it = t.self_reports.find(static_cast<int>(k));
    if (it != t.self_reports.end()) {
      out << format_double(it->second.trust) << ","
          << format_double(it->second.risk) << ","
          << format_double(it->second.workload);
    } else {
      out << ",,";
    }
    out << "\n";
  }
  if (!out) throw Error("failed writing " + path.string());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!next_line(in, line) || line != "k,d,q,T,R,W")
    fail_at(path, 1, "expected header 'k,d,q,T,R,W'");

  Trajectory traj;
  traj.sample_time = 1.0;
  int lineno = 1;
  int expected_k = 0;
  while (next_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != 6)
      fail_at(path, lineno,
              "expected 6 cells, got " + std::to_string(cells.size()));
    const int k = parse_int_cell(cells[0], path, lineno);
    if (k != expected_k)
      fail_at(path, lineno, "sample index " + std::to_string(k) +
                                " out of sequence (expected " +
                                std::to_string(expected_k) + ")");
    ++expected_k;
    const double d = parse_double_cell(cells[1], path, lineno);
    if (d != 0.0 && d != 1.0)
      fail_at(path, lineno, "complexity must be 0 or 1");
    const int q = parse_int_cell(cells[2], path, lineno);
    if (q != 0 && q != 1) fail_at(path, lineno, "reliance must be 0 or 1");
    traj.complexity.push_back(d);
    traj.reliance.push_back(q);

    const bool any = !cells[3].empty() || !cells[4].empty() || !cells[5].empty();
    const bool all = !cells[3].empty() && !cells[4].empty() && !cells[5].empty();
    if (any && !all)
      fail_at(path, lineno, "self-report row must fill all of T,R,W");
    if (all) {
      traj.self_reports.emplace(
          k, CognitiveState{parse_double_cell(cells[3], path, lineno),
                            parse_double_cell(cells[4], path, lineno),
                            parse_double_cell(cells[5], path, lineno)});
    }
  }
  try {
    traj.validate();
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return traj;
}

// --- model JSON -----------------------------------------------------------

void save_model(const std::filesystem::path& path, const HybridModel& m,
                std::uint64_t seed) {
  ordered_json j = model_to_json(m);
  j["meta"] = ordered_json{{"seed", seed}, {"version", kFormatVersion}};
  write_json(path, j);
}

StoredModel load_model(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  StoredModel stored;
  stored.model = model_from_json(j, path);
  const ordered_json& meta = need(j, "meta", path);
  check_version(meta, path);
  stored.seed = need_as<std::uint64_t>(meta, "seed", path);
  return stored;
}

// --- fit report JSON ------------------------------------------------------

void save_report(const std::filesystem::path& path, const FitReport& r) {
  ordered_json j;
  j["rmse_T"] = r.rmse_trust;
  j["rmse_R"] = r.rmse_risk;
  j["rmse_W"] = r.rmse_workload;
  j["accuracy"] = r.accuracy;
  j["active_set"] = channel_set_to_json(r.active_set);
  j["meets_bar"] = r.meets_bar;
  j["rmse_mode"] = rmse_mode_name(r.rmse_mode);
  j["meta"] = ordered_json{{"version", kFormatVersion}};
  write_json(path, j);
}

FitReport load_report(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  FitReport r;
  r.rmse_trust = need_as<double>(j, "rmse_T", path);
  r.rmse_risk = need_as<double>(j, "rmse_R", path);
  r.rmse_workload = need_as<double>(j, "rmse_W", path);
  r.accuracy = need_as<double>(j, "accuracy", path);
  r.active_set = channel_set_from_json(need(j, "active_set", path), path);
  r.meets_bar = need_as<bool>(j, "meets_bar", path);
  r.rmse_mode = rmse_mode_from_string(
      need_as<std::string>(j, "rmse_mode", path), path);
  check_version(need(j, "meta", path), path);
  return r;
}

// --- validation JSON ------------------------------------------------------

void save_validation(const std::filesystem::path& path,
                     const ValidationOutcome& v) {
  ordered_json j;
  j["rmse_T"] = v.report.rmse_trust;
  j["rmse_R"] = v.report.rmse_risk;
  j["rmse_W"] = v.report.rmse_workload;
  j["accuracy"] = v.report.accuracy;
  j["low_excitation"] = channel_set_to_json(v.report.low_excitation);
  j["split_fraction"] = v.report.split_fraction;
  j["boundary_index"] = v.report.boundary_index;
  j["train_reports"] = v.train_reports;
  j["holdout_reports"] = v.holdout_reports;
  j["rmse_mode"] = rmse_mode_name(v.report.rmse_mode);
  j["meta"] = ordered_json{{"version", kFormatVersion}};
  write_json(path, j);
}

// --- KDE outputs ----------------------------------------------------------

void save_kde_curve(const std::filesystem::path& path, const KdeCurve& c) {
  std::ofstream out = open_out(path);
  out << "y,density\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i)
    out << format_double(c.grid[i]) << "," << format_double(c.density[i])
        << "\n";
  if (!out) throw Error("failed writing " + path.string());
}

void save_kde_stats(const std::filesystem::path& path, const std::string& param,
                    const KdeCurve& c) {
  ordered_json j;
  j["param"] = param;
  j["n"] = c.n_samples;
  j["h"] = c.h;
  j["sigma"] = c.sigma;
  j["sigma_convention"] = "sample_sd_n_minus_1";
  j["mean"] = c.mean;
  j["median"] = c.median;
  j["meta"] = ordered_json{{"version", kFormatVersion}};
  write_json(path, j);
}

// --- synth spec JSON ------------------------------------------------------

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  const ordered_json j = parse_json(path);
  SynthSpec spec;
  spec.horizon = need_as<int>(j, "horizon", path);
  spec.report_period = need_as<int>(j, "report_period", path);
  spec.complexity_switches =
      need_as<std::vector<int>>(j, "complexity_switches", path);
  const ordered_json& init = need(j, "initial", path);
  spec.initial.trust = need_as<double>(init, "T", path);
  spec.initial.risk = need_as<double>(init, "R", path);
  spec.initial.workload = need_as<double>(init, "W", path);
  spec.initial_q = need_as<int>(j, "initial_q", path);
  spec.quantize = need_as<bool>(j, "quantize", path);
  spec.model = model_from_json(need(j, "model", path), path);
  if (j.contains("seed")) spec.seed = need_as<std::uint64_t>(j, "seed", path);
  return spec;
}

void save_synth_spec(const std::filesystem::path& path, const SynthSpec& s) {
  ordered_json j;
  j["horizon"] = s.horizon;
  j["report_period"] = s.report_period;
  j["complexity_switches"] = s.complexity_switches;
  j["initial"] = ordered_json{
      {"T", s.initial.trust}, {"R", s.initial.risk}, {"W", s.initial.workload}};
  j["initial_q"] = s.initial_q;
  j["quantize"] = s.quantize;
  j["model"] = model_to_json(s.model);
  j["seed"] = s.seed;
  write_json(path, j);
}

}  // namespace cogrel
