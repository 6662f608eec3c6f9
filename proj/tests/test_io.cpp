#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include "cogrel/errors.hpp"
#include "cogrel/io.hpp"
#include "cogrel/rng.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

using namespace cogrel;
using cogrel::testing::TempDir;

namespace {

RawRecord event(double t, RawKind kind) {
  RawRecord r;
  r.t = t;
  r.kind = kind;
  return r;
}

RawRecord probe(double t, double trust, double risk, double workload) {
  RawRecord r;
  r.t = t;
  r.kind = RawKind::self_report;
  r.trust = trust;
  r.risk = risk;
  r.workload = workload;
  return r;
}

HybridModel sample_model() {
  HybridModel m;
  m.trust = {0.9, -0.04, 0.05};
  m.risk = {0.85, 0.06, 0.06};
  m.workload = {0.8, 0.15, 0.05};
  m.thresholds = {0.55, 0.25, 0.6};
  return m;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("event stream resampling: reliance interval on the unit grid") {
  const std::vector<RawRecord> recs{
      probe(0.0, 50, 45, 30),
      event(3.4, RawKind::engage),
      event(7.6, RawKind::disengage),
      probe(10.0, 55, 40, 35),
  };
  const Trajectory traj = build_trajectory(recs, 1.0, 0.0);

  REQUIRE(traj.horizon() == 10);
  for (int k = 0; k <= 10; ++k) {
    const bool engaged = k >= 3 && k <= 7;  // [round(3.4), round(7.6))
    CHECK(traj.reliance[static_cast<std::size_t>(k)] == (engaged ? 1 : 0));
    CHECK(traj.complexity[static_cast<std::size_t>(k)] == 0.0);
  }
  REQUIRE(traj.self_reports.size() == 2);
  CHECK(traj.self_reports.at(0).trust == 0.5);
  CHECK(traj.self_reports.at(0).risk == 0.45);
  CHECK(traj.self_reports.at(0).workload == 0.3);
  CHECK(traj.self_reports.at(10).trust == 0.55);
}

TEST_CASE("event stream resampling: complexity interval and rounding") {
  const std::vector<RawRecord> recs{
      probe(0.0, 50, 50, 50),
      event(10.2, RawKind::complexity_enter),
      event(20.7, RawKind::complexity_exit),
      probe(25.0, 55, 50, 50),
  };
  const Trajectory traj = build_trajectory(recs, 1.0, 0.0);
  REQUIRE(traj.horizon() == 25);
  for (int k = 0; k <= 25; ++k) {
    const bool busy = k >= 10 && k <= 20;  // [round(10.2), round(20.7))
    CHECK(traj.complexity[static_cast<std::size_t>(k)] == (busy ? 1.0 : 0.0));
  }
}

TEST_CASE("event stream resampling: half-up rounding at .5") {
  const std::vector<RawRecord> recs{
      probe(0.0, 50, 50, 50),
      event(2.5, RawKind::engage),
      event(4.5, RawKind::disengage),
      probe(6.0, 55, 50, 50),
  };
  const Trajectory traj = build_trajectory(recs, 1.0, 0.0);
  // 2.5 -> 3, 4.5 -> 5: engaged on {3, 4}
  CHECK(traj.reliance == std::vector<int>{0, 0, 0, 1, 1, 0, 0});
}

TEST_CASE("event stream resampling: window start cuts and re-indexes") {
  const std::vector<RawRecord> recs{
      probe(0.0, 50, 50, 50),  // before the window, dropped
      event(3.4, RawKind::engage),
      event(7.6, RawKind::disengage),
      probe(15.0, 60, 50, 50),
      probe(20.0, 65, 50, 50),
  };
  const Trajectory traj = build_trajectory(recs, 1.0, 5.0);
  REQUIRE(traj.horizon() == 15);  // absolute 5..20
  // absolute engaged range [3, 8) clips to [5, 8) -> local {0, 1, 2}
  for (int k = 0; k <= 15; ++k)
    CHECK(traj.reliance[static_cast<std::size_t>(k)] == (k <= 2 ? 1 : 0));
  REQUIRE(traj.self_reports.size() == 2);
  CHECK(traj.self_reports.count(10) == 1);  // absolute 15
  CHECK(traj.self_reports.count(15) == 1);  // absolute 20
}

TEST_CASE("event stream resampling: coarser sample time") {
  const std::vector<RawRecord> recs{
      probe(0.0, 50, 50, 50),
      event(3.4, RawKind::engage),
      event(7.6, RawKind::disengage),
      probe(10.0, 55, 50, 50),
  };
  const Trajectory traj = build_trajectory(recs, 2.0, 0.0);
  REQUIRE(traj.horizon() == 5);
  CHECK(traj.sample_time == 2.0);
  // 3.4/2 -> 2, 7.6/2 -> 4: engaged on {2, 3}
  CHECK(traj.reliance == std::vector<int>{0, 0, 1, 1, 0, 0});
  CHECK(traj.self_reports.count(5) == 1);
}

TEST_CASE("event stream validation errors") {
  using V = std::vector<RawRecord>;
  const RawRecord p0 = probe(0.0, 50, 50, 50);
  const RawRecord p9 = probe(9.0, 50, 50, 50);

  CHECK_THROWS_AS(
      build_trajectory(V{p0, event(2, RawKind::engage), p9}, 1.0, 0.0),
      UnpairedEventError);
  CHECK_THROWS_AS(
      build_trajectory(V{p0, event(2, RawKind::disengage), p9}, 1.0, 0.0),
      UnpairedEventError);
  CHECK_THROWS_AS(
      build_trajectory(V{p0, event(2, RawKind::engage),
                         event(3, RawKind::engage),
                         event(4, RawKind::disengage), p9},
                       1.0, 0.0),
      OverlappingIntervalError);
  CHECK_THROWS_AS(
      build_trajectory(V{p0, event(5, RawKind::complexity_enter),
                         event(3, RawKind::complexity_exit), p9},
                       1.0, 0.0),
      OutOfOrderError);
  // two probes rounding onto one sample
  CHECK_THROWS_AS(
      build_trajectory(V{p0, probe(4.3, 50, 50, 50), probe(4.4, 55, 50, 50),
                         p9},
                       1.0, 0.0),
      ReportCollisionError);
  // payloads must sit on the 5-step scale inside [0, 100]
  CHECK_THROWS_AS(build_trajectory(V{probe(0, 47, 50, 50), p9}, 1.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(build_trajectory(V{probe(0, 105, 50, 50), p9}, 1.0, 0.0),
                  DomainError);
  CHECK_THROWS_AS(build_trajectory(V{probe(0, -5, 50, 50), p9}, 1.0, 0.0),
                  DomainError);
  // no report inside the window
  CHECK_THROWS_AS(build_trajectory(V{p0, event(2, RawKind::engage),
                                     event(9, RawKind::disengage)},
                                   1.0, 5.0),
                  InsufficientDataError);
  CHECK_THROWS_AS(build_trajectory(V{}, 1.0, 0.0), InsufficientDataError);
  CHECK_THROWS_AS(build_trajectory(V{p0, p9}, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(build_trajectory(V{p0, p9}, 1.0, -1.0), DomainError);
}

TEST_CASE("raw record csv round-trip") {
  TempDir tmp;
  const std::vector<RawRecord> recs{
      probe(0.0, 50, 45, 30),
      event(3.4, RawKind::engage),
      event(7.25, RawKind::complexity_enter),
      event(7.6, RawKind::disengage),
      event(9.125, RawKind::complexity_exit),
      probe(10.0, 55, 40, 35),
  };
  const auto path = tmp / "raw.csv";
  save_raw_records(path, recs);

  const std::string text = testing::read_file(path);
  CHECK(text.substr(0, text.find('\n')) == "t,kind,T,R,W");

  const auto back = load_raw_records(path);
  REQUIRE(back.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(back[i].t == recs[i].t);
    CHECK(back[i].kind == recs[i].kind);
    if (recs[i].kind == RawKind::self_report) {
      CHECK(back[i].trust == recs[i].trust);
      CHECK(back[i].risk == recs[i].risk);
      CHECK(back[i].workload == recs[i].workload);
    }
  }
}

TEST_CASE("trajectory csv round-trip") {
  TempDir tmp;
  const auto [traj, model] = synthesize(testing::default_spec());
  const auto path = tmp / "traj.csv";
  save_trajectory(path, traj);

  const Trajectory back = load_trajectory(path);
  CHECK(back.complexity == traj.complexity);
  CHECK(back.reliance == traj.reliance);
  REQUIRE(back.self_reports.size() == traj.self_reports.size());
  for (const auto& [k, x] : traj.self_reports) {
    REQUIRE(back.self_reports.count(k) == 1);
    CHECK(back.self_reports.at(k) == x);  // bit-exact through the file
  }

  Trajectory coarse = traj;
  coarse.sample_time = 2.0;
  CHECK_THROWS_AS(save_trajectory(tmp / "coarse.csv", coarse), DomainError);
}

TEST_CASE("trajectory csv rejects malformed input") {
  TempDir tmp;
  const auto path = tmp / "bad.csv";
  const auto expect_parse_error = [&](const std::string& content) {
    testing::write_file(path, content);
    CHECK_THROWS_AS(load_trajectory(path), ParseError);
  };

  expect_parse_error("wrong,header\n");
  expect_parse_error("k,d,q,T,R,W\n0,0,0,,,\n2,0,0,,,\n");       // index gap
  expect_parse_error("k,d,q,T,R,W\n0,2,0,,,\n1,0,0,,,\n");       // bad d
  expect_parse_error("k,d,q,T,R,W\n0,0,3,,,\n1,0,0,,,\n");       // bad q
  expect_parse_error("k,d,q,T,R,W\n0,0,0,0.5,0.4,\n1,0,0,,,\n"); // partial report
  expect_parse_error("k,d,q,T,R,W\n0,0,0,x,0.4,0.3\n1,0,0,,,\n");
  expect_parse_error("k,d,q,T,R,W\n0,0,0,,,\n1,0,0,,,\n");       // no report at all
  CHECK_THROWS_AS(load_trajectory(tmp / "missing.csv"), ParseError);
}

TEST_CASE("model json round-trip is bit-exact") {
  TempDir tmp;
  HybridModel m = sample_model();
  // values with awkward binary expansions
  m.trust.b = 1.0 / 3.0;
  m.risk.c = 1e-17;
  m.workload.a = 0.1 + 0.2;
  m.thresholds.risk = -0.0;

  const auto path = tmp / "m.model.json";
  save_model(path, m, 12345);
  const StoredModel back = load_model(path);
  CHECK(back.model == m);
  CHECK(back.seed == 12345);

  // key layout is stable
  const auto j = nlohmann::ordered_json::parse(testing::read_file(path));
  CHECK(j.contains("trust"));
  CHECK(j.contains("thresholds"));
  CHECK(j["meta"]["version"] == 1);
  CHECK(j["thresholds"].contains("T"));
}

TEST_CASE("model json rejects damaged files") {
  TempDir tmp;
  const auto path = tmp / "m.model.json";
  const auto expect_parse_error = [&](const std::string& content) {
    testing::write_file(path, content);
    CHECK_THROWS_AS(load_model(path), ParseError);
  };

  save_model(path, sample_model(), 1);
  auto j = nlohmann::ordered_json::parse(testing::read_file(path));

  auto mutated = j;
  mutated.erase("risk");
  expect_parse_error(mutated.dump(2));

  mutated = j;
  mutated["trust"].erase("a");
  expect_parse_error(mutated.dump(2));

  mutated = j;
  mutated["trust"]["a"] = "0.9";  // wrong type
  expect_parse_error(mutated.dump(2));

  mutated = j;
  mutated["meta"]["version"] = 99;
  expect_parse_error(mutated.dump(2));

  expect_parse_error("not json at all");
  expect_parse_error(testing::read_file(path).substr(0, 40));  // truncated
  CHECK_THROWS_AS(load_model(tmp / "nowhere.json"), ParseError);
}

TEST_CASE("fit report json round-trip") {
  TempDir tmp;
  FitReport r;
  r.rmse_trust = 0.0123;
  r.rmse_risk = 1.0 / 7.0;
  r.rmse_workload = 0.5;
  r.accuracy = 0.9375;
  r.active_set = {Channel::trust, Channel::workload};
  r.meets_bar = false;
  r.rmse_mode = RmseMode::open_loop;

  const auto path = tmp / "p.report.json";
  save_report(path, r);
  const FitReport back = load_report(path);
  CHECK(back.rmse_trust == r.rmse_trust);
  CHECK(back.rmse_risk == r.rmse_risk);
  CHECK(back.rmse_workload == r.rmse_workload);
  CHECK(back.accuracy == r.accuracy);
  CHECK(back.active_set == r.active_set);
  CHECK(back.meets_bar == r.meets_bar);
  CHECK(back.rmse_mode == r.rmse_mode);

  const auto j = nlohmann::ordered_json::parse(testing::read_file(path));
  CHECK(j["active_set"] == nlohmann::ordered_json::array({"T", "W"}));
  CHECK(j["rmse_mode"] == "open_loop");
}

TEST_CASE("synth spec json round-trip") {
  TempDir tmp;
  SynthSpec spec = testing::default_spec();
  spec.quantize = true;
  spec.seed = 99;
  const auto path = tmp / "spec.json";
  save_synth_spec(path, spec);
  const SynthSpec back = load_synth_spec(path);
  CHECK(back.horizon == spec.horizon);
  CHECK(back.report_period == spec.report_period);
  CHECK(back.complexity_switches == spec.complexity_switches);
  CHECK(back.initial == spec.initial);
  CHECK(back.initial_q == spec.initial_q);
  CHECK(back.quantize == spec.quantize);
  CHECK(back.model == spec.model);
  CHECK(back.seed == spec.seed);
}

TEST_CASE("kde outputs") {
  TempDir tmp;
  const std::vector<double> ys{0.1, 0.2, 0.4, 0.35, 0.15};
  const auto curve = kde(ys, auto_grid(ys, 16));

  const auto curve_path = tmp / "a_T.kde.csv";
  save_kde_curve(curve_path, curve);
  const std::string text = testing::read_file(curve_path);
  CHECK(text.substr(0, text.find('\n')) == "y,density");
  // one line per grid point plus the header
  CHECK(std::count(text.begin(), text.end(), '\n') == 17);

  const auto stats_path = tmp / "a_T.kde.json";
  save_kde_stats(stats_path, "a_T", curve);
  const auto j = nlohmann::ordered_json::parse(testing::read_file(stats_path));
  CHECK(j["param"] == "a_T");
  CHECK(j["n"] == 5);
  CHECK(j["sigma_convention"] == "sample_sd_n_minus_1");
  CHECK(j["h"].get<double>() == curve.h);
  CHECK(j["sigma"].get<double>() == curve.sigma);
  CHECK(j["mean"].get<double>() == curve.mean);
  CHECK(j["median"].get<double>() == curve.median);
}

TEST_CASE("double formatting survives the round trip") {
  Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    double v;
    switch (i % 4) {
      case 0: v = rng.uniform(-1, 1); break;
      case 1: v = rng.normal(0, 1e6); break;
      case 2: v = rng.uniform(0, 1) * 1e-300; break;
      default: v = rng.normal(0, 1) * 1e300; break;
    }
    const std::string s = format_double(v);
    double back = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(ec == std::errc());
    CHECK(back == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-0.0) == "-0");
  CHECK(format_double(1e100) == "1e+100");
}

}  // TEST_SUITE io
