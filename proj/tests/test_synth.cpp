#include <cmath>
#include <vector>

#include "cogrel/errors.hpp"
#include "cogrel/model.hpp"
#include "cogrel/pipeline.hpp"
#include "cogrel/synth.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace cogrel;

namespace {

// Stationary participant with excitation in both halves: d toggles on both
// sides of every split point used below.
SynthSpec stationary_spec(int horizon) {
  SynthSpec spec;
  spec.horizon = horizon;
  spec.report_period = 20;
  for (int s = 30; s + 30 <= horizon; s += 30)
    spec.complexity_switches.push_back(s);
  spec.initial = {0.55, 0.45, 0.3};
  spec.initial_q = 0;
  spec.model.trust = {0.90, -0.04, 0.05};
  spec.model.risk = {0.85, 0.06, 0.06};
  spec.model.workload = {0.80, 0.15, 0.05};
  spec.model.thresholds = {0.55, 0.25, 0.60};
  return spec;
}

// First half: d quiet and workload parked exactly on its resting point, so
// its self-reports carry no information. Second half: d bursts push it up.
// Trust and risk are insensitive to d and relax visibly, so only workload
// lacks excitation.
Trajectory low_excitation_trajectory() {
  SynthSpec spec;
  spec.horizon = 280;
  spec.report_period = 20;
  spec.complexity_switches = {150, 170, 190, 210, 230, 250, 270};
  spec.initial = {0.65, 0.6, 0.3};
  spec.initial_q = 0;
  spec.model.trust = {0.90, 0.0, 0.05};      // relaxes 0.65 -> 0.5
  spec.model.risk = {0.85, 0.0, 0.06};       // relaxes 0.6 -> 0.4
  spec.model.workload = {0.50, 0.40, 0.15};  // rest 0.3, excited toward 1.1
  spec.model.thresholds = {2.0, -1.0, 0.60};  // only workload can trigger
  return synthesize(spec).first;
}

IdentifyOptions open_loop_opts() {
  IdentifyOptions opts;
  opts.rmse_mode = RmseMode::open_loop;
  return opts;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("report quantization grid") {
  CHECK(quantize_report(0.513) == 0.50);
  CHECK(quantize_report(0.537) == 0.55);
  CHECK(quantize_report(0.025) == 0.05);  // half steps round away from zero
  CHECK(quantize_report(0.60) == 0.60);
  CHECK(quantize_report(1.30) == 1.30);   // no clamping
  CHECK(quantize_report(-0.01) == 0.0);
}

TEST_CASE("complexity square wave from switch indices") {
  SynthSpec spec;
  spec.horizon = 10;
  spec.report_period = 3;
  spec.complexity_switches = {3, 7};
  spec.initial = {0.5, 0.5, 0.5};
  spec.model = testing::default_spec().model;

  const auto [traj, model] = synthesize(spec);
  CHECK(traj.complexity ==
        std::vector<double>{0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0});
  CHECK(model == spec.model);
}

TEST_CASE("reports sample the exact rollout on the period grid") {
  SynthSpec spec = stationary_spec(100);
  spec.report_period = 20;
  const auto [traj, model] = synthesize(spec);

  const auto sim =
      simulate(spec.initial, spec.initial_q, traj.complexity, spec.model);
  CHECK(traj.reliance == sim.reliance);

  std::vector<int> expected_keys;
  for (int k = 0; k <= 100; k += 20) expected_keys.push_back(k);
  CHECK(traj.report_indices() == expected_keys);
  for (const int k : expected_keys)
    CHECK(traj.self_reports.at(k) == sim.states[static_cast<std::size_t>(k)]);
}

TEST_CASE("quantized reports stay within half a grid step of the rollout") {
  SynthSpec spec = stationary_spec(200);
  spec.quantize = true;
  const auto [traj, model] = synthesize(spec);
  const auto sim =
      simulate(spec.initial, spec.initial_q, traj.complexity, spec.model);

  for (const auto& [k, x] : traj.self_reports) {
    const auto& exact = sim.states[static_cast<std::size_t>(k)];
    for (const Channel c : kChannels) {
      CHECK(x.component(c) == quantize_report(exact.component(c)));
      CHECK(std::abs(x.component(c) - exact.component(c)) <= 0.025 + 1e-12);
    }
  }
}

TEST_CASE("generation is deterministic") {
  const auto a = synthesize(stationary_spec(200)).first;
  const auto b = synthesize(stationary_spec(200)).first;
  CHECK(a.complexity == b.complexity);
  CHECK(a.reliance == b.reliance);
  CHECK(a.self_reports == b.self_reports);
}

TEST_CASE("spec validation") {
  SynthSpec good = stationary_spec(100);
  CHECK_NOTHROW(synthesize(good));

  SynthSpec s = good;
  s.horizon = 0;
  CHECK_THROWS_AS(synthesize(s), DomainError);
  s = good;
  s.report_period = 0;
  CHECK_THROWS_AS(synthesize(s), DomainError);
  s = good;
  s.complexity_switches = {5, 5};
  CHECK_THROWS_AS(synthesize(s), DomainError);
  s = good;
  s.complexity_switches = {0};  // toggling before the first step is meaningless
  CHECK_THROWS_AS(synthesize(s), DomainError);
  s = good;
  s.complexity_switches = {101};
  CHECK_THROWS_AS(synthesize(s), DomainError);
  s = good;
  s.initial_q = 2;
  CHECK_THROWS_AS(synthesize(s), DomainError);
  s = good;
  s.model.trust.a = std::nan("");
  CHECK_THROWS_AS(synthesize(s), DomainError);
}

}  // TEST_SUITE synth

TEST_SUITE("pipeline") {

TEST_CASE("full identification recovers a clean participant") {
  const auto [traj, model] = synthesize(testing::default_spec());
  const auto outcome = identify(traj);

  CHECK(outcome.all_converged);
  for (const Channel ch : kChannels) {
    const auto& fit = outcome.fits[static_cast<std::size_t>(ch)];
    CHECK(std::abs(fit.params.a - model.params(ch).a) < 1e-6);
    CHECK(std::abs(fit.params.b - model.params(ch).b) < 1e-6);
    CHECK(std::abs(fit.params.c - model.params(ch).c) < 1e-6);
    CHECK(outcome.model.params(ch) == fit.params);
  }
  CHECK(outcome.model.thresholds == outcome.thresholds.thresholds);
  CHECK(outcome.fit_report.accuracy == 1.0);
  CHECK(outcome.fit_report.rmse_trust <= 1e-6);
  CHECK(outcome.fit_report.rmse_risk <= 1e-6);
  CHECK(outcome.fit_report.rmse_workload <= 1e-6);
  CHECK(outcome.fit_report.meets_bar);
  CHECK(outcome.fit_report.active_set == outcome.thresholds.active_set);
}

TEST_CASE("split-half validation on stationary noiseless data") {
  // 14 reports at period 20: the training half is exactly the first 7
  const auto spec = stationary_spec(260);
  const auto [traj, model] = synthesize(spec);
  REQUIRE(traj.report_indices().size() == 14);

  const auto v = split_half_validate(traj, 0.5, open_loop_opts());
  CHECK(v.train_reports == 7);
  CHECK(v.holdout_reports == 7);
  CHECK(v.report.boundary_index == 120);  // the 7th report
  CHECK(v.report.split_fraction == 0.5);
  CHECK(v.report.rmse_mode == RmseMode::open_loop);
  CHECK(v.report.accuracy == 1.0);
  CHECK(v.report.rmse_trust <= 1e-6);
  CHECK(v.report.rmse_risk <= 1e-6);
  CHECK(v.report.rmse_workload <= 1e-6);
  CHECK(v.report.low_excitation.empty());
  CHECK(v.training.all_converged);

  // reset-mode scoring of the held-out reports is just as exact here
  const auto vr = split_half_validate(traj, 0.5);  // reset is the fit default
  CHECK(vr.report.rmse_mode == RmseMode::reset);
  CHECK(vr.report.rmse_trust <= 1e-6);
  CHECK(vr.report.accuracy == 1.0);
}

TEST_CASE("split fraction moves the boundary") {
  const auto [traj, model] = synthesize(stationary_spec(260));
  const auto v = split_half_validate(traj, 0.3);  // ceil(4.2) = 5 reports
  CHECK(v.train_reports == 5);
  CHECK(v.holdout_reports == 9);
  CHECK(v.report.boundary_index == 80);
}

TEST_CASE("split validation guards its preconditions") {
  const auto [traj, model] = synthesize(stationary_spec(260));
  CHECK_THROWS_AS(split_half_validate(traj, 0.9), InsufficientDataError);
  CHECK_THROWS_AS(split_half_validate(traj, 0.05), InsufficientDataError);
  CHECK_THROWS_AS(split_half_validate(traj, 0.0), DomainError);
  CHECK_THROWS_AS(split_half_validate(traj, 1.0), DomainError);
  CHECK_THROWS_AS(split_half_validate(traj, -0.5), DomainError);

  const auto [small, m2] = synthesize(stationary_spec(120));  // 7 reports
  CHECK_THROWS_AS(split_half_validate(small, 0.5), InsufficientDataError);
}

TEST_CASE("the held-out half never influences training") {
  const auto [traj, model] = synthesize(stationary_spec(260));
  const auto base = split_half_validate(traj, 0.5);

  Trajectory tampered = traj;
  for (auto& [k, x] : tampered.self_reports) {
    if (k <= base.report.boundary_index) continue;
    x.trust += 0.2;  // corrupt only held-out reports
    x.risk -= 0.1;
    x.workload += 0.15;
  }
  const auto poked = split_half_validate(tampered, 0.5);
  CHECK(poked.training.model == base.training.model);
  CHECK(poked.report.rmse_trust > 0.1);  // the corruption shows up downstream
}

TEST_CASE("a channel without training excitation is flagged") {
  const Trajectory traj = low_excitation_trajectory();
  const auto v = split_half_validate(traj, 0.5, open_loop_opts());

  CHECK(v.report.low_excitation.count(Channel::workload) == 1);
  CHECK(v.report.low_excitation.count(Channel::trust) == 0);
  CHECK(v.report.low_excitation.count(Channel::risk) == 0);
  // the workload fit had nothing to work with and misses the held-out burst
  CHECK(v.training.fits[2].degenerate);
  CHECK(v.report.rmse_workload > 0.1);
  CHECK(v.report.rmse_trust <= 0.05);
  CHECK(v.report.rmse_risk <= 0.05);
}

}  // TEST_SUITE pipeline
