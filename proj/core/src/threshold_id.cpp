#include "cogrel/threshold_id.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cogrel/errors.hpp"
#include "cogrel/metrics.hpp"
#include "cogrel/model.hpp"
#include "cogrel/rng.hpp"

namespace cogrel {

double ConfusionCounts::accuracy() const {
  if (total() == 0)
    throw DomainError("accuracy is undefined for empty confusion counts");
  return static_cast<double>(tp + tn) / static_cast<double>(total());
}

namespace {

constexpr double kBoxPad = 0.05;

// Everything the search needs, precomputed once: thresholds only repartition
// the simulated state series, they never change it.
struct SearchContext {
  int k0 = 0;
  std::array<std::vector<double>, 3> states;       // per channel, j = 0..M
  std::vector<int> truth;                          // observed reliance, j = 0..M
  std::array<double, 3> lo{}, hi{};                // search box
  std::array<std::vector<double>, 3> sorted_vals;  // distinct state values

  int scored() const { return static_cast<int>(truth.size()) - 1; }
};

bool value_predicate(Channel c, double value, const Thresholds& th) {
  switch (c) {
    case Channel::trust: return value > th.trust;
    case Channel::risk: return value < th.risk;
    case Channel::workload: return value > th.workload;
  }
  return false;
}

SearchContext make_context(const Trajectory& traj,
                           const std::array<AffineParams, 3>& channels) {
  traj.validate();
  for (const AffineParams& p : channels)
    if (!p.is_finite())
      throw DomainError("threshold search: non-finite channel parameters");

  const int k0 = traj.first_report_index();
  if (traj.horizon() - k0 < 1)
    throw InsufficientDataError(
        "threshold search: no samples after the first self-report");

  const HybridModel m{channels[0], channels[1], channels[2], Thresholds{}};
  const SimulatedTrajectory sim =
      simulate(traj.self_reports.at(k0),
               traj.reliance[static_cast<std::size_t>(k0)],
               std::span<const double>(traj.complexity).subspan(
                   static_cast<std::size_t>(k0)),
               m);

  SearchContext ctx;
  ctx.k0 = k0;
  for (int ci = 0; ci < 3; ++ci) {
    auto& s = ctx.states[static_cast<std::size_t>(ci)];
    s.resize(sim.states.size());
    for (std::size_t j = 0; j < sim.states.size(); ++j)
      s[j] = sim.states[j].component(kChannels[static_cast<std::size_t>(ci)]);
    auto sorted = s;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    ctx.lo[static_cast<std::size_t>(ci)] = sorted.front() - kBoxPad;
    ctx.hi[static_cast<std::size_t>(ci)] = sorted.back() + kBoxPad;
    ctx.sorted_vals[static_cast<std::size_t>(ci)] = std::move(sorted);
  }
  ctx.truth.assign(traj.reliance.begin() + k0, traj.reliance.end());
  return ctx;
}

ConfusionCounts score(const SearchContext& ctx, const Thresholds& th) {
  ConfusionCounts c;
  const auto& sT = ctx.states[0];
  const auto& sR = ctx.states[1];
  const auto& sW = ctx.states[2];
  for (std::size_t j = 1; j < ctx.truth.size(); ++j) {
    const bool pred =
        sT[j] > th.trust || sR[j] < th.risk || sW[j] > th.workload;
    if (ctx.truth[j] == 1)
      pred ? ++c.tp : ++c.fn;
    else
      pred ? ++c.fp : ++c.tn;
  }
  return c;
}

int correct_of(const ConfusionCounts& c) {
  return static_cast<int>(c.tp + c.tn);
}

// Predicted reliance over the scored steps j = 1..M.
std::vector<char> predicted(const SearchContext& ctx, const Thresholds& th) {
  std::vector<char> q;
  q.reserve(ctx.truth.size() - 1);
  const auto& sT = ctx.states[0];
  const auto& sR = ctx.states[1];
  const auto& sW = ctx.states[2];
  for (std::size_t j = 1; j < ctx.truth.size(); ++j)
    q.push_back(sT[j] > th.trust || sR[j] < th.risk || sW[j] > th.workload);
  return q;
}

std::set<Channel> active_of(const SearchContext& ctx, const Thresholds& th) {
  const std::size_t n = ctx.truth.size();
  std::vector<char> qhat(n);
  qhat[0] = static_cast<char>(ctx.truth[0]);
  for (std::size_t j = 1; j < n; ++j)
    qhat[j] = ctx.states[0][j] > th.trust || ctx.states[1][j] < th.risk ||
              ctx.states[2][j] > th.workload;
  std::set<Channel> active;
  for (int ci = 0; ci < 3; ++ci) {
    const Channel c = kChannels[static_cast<std::size_t>(ci)];
    const auto& s = ctx.states[static_cast<std::size_t>(ci)];
    for (std::size_t j = 1; j < n; ++j) {
      const bool toggled =
          value_predicate(c, s[j], th) != value_predicate(c, s[j - 1], th);
      if (toggled && qhat[j] != qhat[j - 1]) {
        active.insert(c);
        break;
      }
    }
  }
  return active;
}

// Representative of the accuracy plateau containing theta: the midpoint
// between the neighbouring sampled values (or box edge). Thresholds between
// the same pair of sampled values classify every step identically.
double plateau_center(const SearchContext& ctx, int ci, double theta) {
  const auto& V = ctx.sorted_vals[static_cast<std::size_t>(ci)];
  const Channel c = kChannels[static_cast<std::size_t>(ci)];
  std::size_t i;  // plateau index = values strictly left of the boundary
  if (c == Channel::risk) {
    i = static_cast<std::size_t>(
        std::lower_bound(V.begin(), V.end(), theta) - V.begin());
  } else {
    i = static_cast<std::size_t>(
        std::upper_bound(V.begin(), V.end(), theta) - V.begin());
  }
  const double left = (i == 0) ? ctx.lo[static_cast<std::size_t>(ci)] : V[i - 1];
  const double right =
      (i == V.size()) ? ctx.hi[static_cast<std::size_t>(ci)] : V[i];
  return 0.5 * (left + right);
}

double margin_to_samples(const std::vector<double>& V, double theta) {
  const auto it = std::lower_bound(V.begin(), V.end(), theta);
  double m = std::numeric_limits<double>::infinity();
  if (it != V.end()) m = std::min(m, *it - theta);
  if (it != V.begin()) m = std::min(m, theta - *(it - 1));
  return m;
}

// Box edge at which the channel's predicate holds nowhere / everywhere.
double false_edge(const SearchContext& ctx, int ci) {
  return kChannels[static_cast<std::size_t>(ci)] == Channel::risk
             ? ctx.lo[static_cast<std::size_t>(ci)]
             : ctx.hi[static_cast<std::size_t>(ci)];
}
double true_edge(const SearchContext& ctx, int ci) {
  return kChannels[static_cast<std::size_t>(ci)] == Channel::risk
             ? ctx.hi[static_cast<std::size_t>(ci)]
             : ctx.lo[static_cast<std::size_t>(ci)];
}

// A candidate lifted to its canonical form, ready for comparison: active
// thresholds centered in their plateau, inactive ones parked at a box edge
// that leaves every prediction unchanged.
struct Ranked {
  int correct = -1;
  double margin = -std::numeric_limits<double>::infinity();
  Thresholds canon;
  std::set<Channel> active;
};

Ranked rank(const SearchContext& ctx, const Thresholds& raw) {
  Ranked r;
  r.correct = correct_of(score(ctx, raw));
  r.active = active_of(ctx, raw);

  const std::vector<char> baseline = predicted(ctx, raw);
  Thresholds th = raw;
  for (int ci = 0; ci < 3; ++ci) {
    const Channel c = kChannels[static_cast<std::size_t>(ci)];
    if (!r.active.count(c)) continue;
    Thresholds trial = th;
    trial.component(c) = plateau_center(ctx, ci, raw.component(c));
    // Centering stays inside the plateau except in freak cases where the
    // midpoint of two adjacent doubles rounds onto a sampled value; keep the
    // raw threshold then.
    if (predicted(ctx, trial) == baseline) th = trial;
  }
  for (int ci = 0; ci < 3; ++ci) {
    const Channel c = kChannels[static_cast<std::size_t>(ci)];
    if (r.active.count(c)) continue;
    Thresholds trial = th;
    trial.component(c) = false_edge(ctx, ci);
    if (predicted(ctx, trial) == baseline) {
      th = trial;
      continue;
    }
    trial.component(c) = true_edge(ctx, ci);
    if (predicted(ctx, trial) == baseline) th = trial;
  }
  r.canon = th;

  r.margin = std::numeric_limits<double>::infinity();
  for (int ci = 0; ci < 3; ++ci) {
    const Channel c = kChannels[static_cast<std::size_t>(ci)];
    if (!r.active.count(c)) continue;
    r.margin = std::min(
        r.margin, margin_to_samples(ctx.sorted_vals[static_cast<std::size_t>(ci)],
                                    th.component(c)));
  }
  return r;
}

bool lex_better(const Thresholds& a, const Thresholds& b) {
  if (a.trust != b.trust) return a.trust < b.trust;
  if (a.risk != b.risk) return a.risk > b.risk;
  if (a.workload != b.workload) return a.workload < b.workload;
  return false;
}

// Strict total preorder on candidates; independent of evaluation order.
bool out_ranks(const Ranked& a, const Ranked& b) {
  if (a.correct != b.correct) return a.correct > b.correct;
  if (a.margin != b.margin) return a.margin > b.margin;
  return lex_better(a.canon, b.canon);
}

ThresholdFit finish(const SearchContext& ctx, const Ranked& best) {
  const ConfusionCounts cc = score(ctx, best.canon);
  if (correct_of(cc) != best.correct)
    throw Error("threshold search internal error: canonical form changed the score");
  ThresholdFit fit;
  fit.thresholds = best.canon;
  fit.confusion = cc;
  fit.accuracy = cc.accuracy();
  fit.active_set = active_of(ctx, best.canon);
  if (fit.active_set != best.active)
    throw Error(
        "threshold search internal error: canonical form changed the active set");
  return fit;
}

void check_ga_options(const GaOptions& o) {
  if (o.population < 2) throw DomainError("GA population must be >= 2");
  if (o.generations < 0) throw DomainError("GA generations must be >= 0");
  if (o.tournament < 1) throw DomainError("GA tournament size must be >= 1");
  if (o.elitism < 0 || o.elitism >= o.population)
    throw DomainError("GA elitism must be in [0, population)");
  if (!(o.crossover_prob >= 0.0 && o.crossover_prob <= 1.0))
    throw DomainError("GA crossover probability must be in [0, 1]");
  if (!(o.mutation_prob >= 0.0 && o.mutation_prob <= 1.0))
    throw DomainError("GA mutation probability must be in [0, 1]");
  if (!(o.mutation_sigma_frac >= 0.0))
    throw DomainError("GA mutation sigma must be >= 0");
  if (o.stagnation_limit < 1) throw DomainError("GA stagnation limit must be >= 1");
}

}  // namespace

ThresholdFit rollout_accuracy(const Trajectory& traj, const HybridModel& m) {
  traj.validate();
  if (!m.is_finite()) throw DomainError("rollout_accuracy: non-finite model");
  const int k0 = traj.first_report_index();
  if (traj.horizon() - k0 < 1)
    throw InsufficientDataError(
        "rollout_accuracy: no samples after the first self-report");

  const SimulatedTrajectory sim =
      simulate(traj.self_reports.at(k0),
               traj.reliance[static_cast<std::size_t>(k0)],
               std::span<const double>(traj.complexity).subspan(
                   static_cast<std::size_t>(k0)),
               m);

  ConfusionCounts c;
  for (int j = 1; j < sim.size(); ++j) {
    const bool pred = sim.reliance[static_cast<std::size_t>(j)] == 1;
    const bool obs = traj.reliance[static_cast<std::size_t>(k0 + j)] == 1;
    if (obs)
      pred ? ++c.tp : ++c.fn;
    else
      pred ? ++c.fp : ++c.tn;
  }

  ThresholdFit fit;
  fit.thresholds = m.thresholds;
  fit.confusion = c;
  fit.accuracy = c.accuracy();
  fit.active_set = active_thresholds(sim, m.thresholds);
  return fit;
}

ThresholdFit fit_thresholds(const Trajectory& traj,
                            const std::array<AffineParams, 3>& channels,
                            const GaOptions& opts, GaDiagnostics* diag) {
  check_ga_options(opts);
  const SearchContext ctx = make_context(traj, channels);
  const int P = opts.population;
  const double total = static_cast<double>(ctx.scored());
  Rng rng(opts.seed);

  // The two constant predictors are seeded outright, so the search never
  // does worse than the better of "always rely" / "never rely".
  std::vector<Thresholds> pop;
  pop.reserve(static_cast<std::size_t>(P));
  pop.push_back({ctx.lo[0], ctx.hi[1], ctx.lo[2]});
  pop.push_back({ctx.hi[0], ctx.lo[1], ctx.hi[2]});
  while (static_cast<int>(pop.size()) < P) {
    Thresholds t;
    t.trust = rng.uniform(ctx.lo[0], ctx.hi[0]);
    t.risk = rng.uniform(ctx.lo[1], ctx.hi[1]);
    t.workload = rng.uniform(ctx.lo[2], ctx.hi[2]);
    pop.push_back(t);
  }

  std::vector<int> correct(static_cast<std::size_t>(P));
  const auto eval_pop = [&] {
    for (int i = 0; i < P; ++i)
      correct[static_cast<std::size_t>(i)] =
          correct_of(score(ctx, pop[static_cast<std::size_t>(i)]));
  };

  Ranked best;
  const auto consider = [&](const Thresholds& th, int corr) {
    if (corr < best.correct) return;
    const Ranked r = rank(ctx, th);
    if (out_ranks(r, best)) best = r;
  };

  eval_pop();
  for (int i = 0; i < P; ++i)
    consider(pop[static_cast<std::size_t>(i)], correct[static_cast<std::size_t>(i)]);

  if (diag) {
    *diag = GaDiagnostics{};
    diag->best_accuracy.push_back(
        static_cast<double>(*std::max_element(correct.begin(), correct.end())) /
        total);
  }

  std::vector<int> order(static_cast<std::size_t>(P));
  int stagnant = 0;
  int gens = 0;
  for (int g = 0; g < opts.generations; ++g) {
    if (stagnant >= opts.stagnation_limit) break;
    ++gens;
    const int prev_best = best.correct;

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return correct[static_cast<std::size_t>(a)] >
             correct[static_cast<std::size_t>(b)];
    });

    std::vector<Thresholds> next;
    next.reserve(static_cast<std::size_t>(P));
    for (int e = 0; e < opts.elitism; ++e)
      next.push_back(pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])]);

    const auto tournament = [&]() -> const Thresholds& {
      int best_i = 0;
      int best_c = -1;
      for (int t = 0; t < opts.tournament; ++t) {
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(P)));
        if (correct[static_cast<std::size_t>(i)] > best_c) {
          best_c = correct[static_cast<std::size_t>(i)];
          best_i = i;
        }
      }
      return pop[static_cast<std::size_t>(best_i)];
    };

    while (static_cast<int>(next.size()) < P) {
      const Thresholds& p1 = tournament();
      const Thresholds& p2 = tournament();
      Thresholds child = p1;
      if (rng.uniform() < opts.crossover_prob) {
        child.trust = rng.uniform() < 0.5 ? p1.trust : p2.trust;
        child.risk = rng.uniform() < 0.5 ? p1.risk : p2.risk;
        child.workload = rng.uniform() < 0.5 ? p1.workload : p2.workload;
      }
      for (int ci = 0; ci < 3; ++ci) {
        if (rng.uniform() >= opts.mutation_prob) continue;
        const Channel c = kChannels[static_cast<std::size_t>(ci)];
        const double sigma =
            opts.mutation_sigma_frac *
            (ctx.hi[static_cast<std::size_t>(ci)] - ctx.lo[static_cast<std::size_t>(ci)]);
        child.component(c) = std::clamp(
            child.component(c) + rng.normal(0.0, sigma),
            ctx.lo[static_cast<std::size_t>(ci)], ctx.hi[static_cast<std::size_t>(ci)]);
      }
      next.push_back(child);
    }

    pop.swap(next);
    eval_pop();
    for (int i = 0; i < P; ++i)
      consider(pop[static_cast<std::size_t>(i)],
               correct[static_cast<std::size_t>(i)]);

    stagnant = best.correct > prev_best ? 0 : stagnant + 1;
    if (diag)
      diag->best_accuracy.push_back(
          static_cast<double>(*std::max_element(correct.begin(), correct.end())) /
          total);
  }
  if (diag) diag->generations_run = gens;

  return finish(ctx, best);
}

ThresholdFit grid_oracle(const Trajectory& traj,
                         const std::array<AffineParams, 3>& channels,
                         double step) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw DomainError("grid_oracle: step must be positive and finite");
  const SearchContext ctx = make_context(traj, channels);

  std::array<std::size_t, 3> counts{};
  double total = 1.0;
  for (int ci = 0; ci < 3; ++ci) {
    const double span = ctx.hi[static_cast<std::size_t>(ci)] -
                        ctx.lo[static_cast<std::size_t>(ci)];
    counts[static_cast<std::size_t>(ci)] =
        static_cast<std::size_t>(std::floor(span / step + 1e-9)) + 1;
    total *= static_cast<double>(counts[static_cast<std::size_t>(ci)]);
  }
  if (total > 1e7)
    throw DomainError("grid_oracle: grid of " + std::to_string(total) +
                      " points exceeds the 1e7 cap");

  std::array<std::vector<double>, 3> vals;
  for (int ci = 0; ci < 3; ++ci) {
    auto& v = vals[static_cast<std::size_t>(ci)];
    v.resize(counts[static_cast<std::size_t>(ci)]);
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = ctx.lo[static_cast<std::size_t>(ci)] +
             static_cast<double>(i) * step;
  }

  // One predicate bitmask per candidate value per channel; a candidate
  // triple is then scored with a handful of word ops.
  const int M = ctx.scored();
  const std::size_t words = static_cast<std::size_t>(M + 63) / 64;
  const auto build_masks = [&](int ci) {
    const Channel c = kChannels[static_cast<std::size_t>(ci)];
    const auto& s = ctx.states[static_cast<std::size_t>(ci)];
    std::vector<std::uint64_t> masks(vals[static_cast<std::size_t>(ci)].size() *
                                     words);
    for (std::size_t vi = 0; vi < vals[static_cast<std::size_t>(ci)].size(); ++vi) {
      Thresholds th;
      th.component(c) = vals[static_cast<std::size_t>(ci)][vi];
      std::uint64_t* row = masks.data() + vi * words;
      for (int j = 1; j <= M; ++j) {
        if (value_predicate(c, s[static_cast<std::size_t>(j)], th))
          row[(j - 1) / 64] |= std::uint64_t{1} << ((j - 1) % 64);
      }
    }
    return masks;
  };
  const std::vector<std::uint64_t> mT = build_masks(0);
  const std::vector<std::uint64_t> mR = build_masks(1);
  const std::vector<std::uint64_t> mW = build_masks(2);

  std::vector<std::uint64_t> truth_mask(words, 0);
  for (int j = 1; j <= M; ++j)
    if (ctx.truth[static_cast<std::size_t>(j)] == 1)
      truth_mask[static_cast<std::size_t>((j - 1) / 64)] |=
          std::uint64_t{1} << ((j - 1) % 64);

  int best_correct = -1;
  Thresholds best_th;
  std::vector<std::uint64_t> tr(words);
  for (std::size_t iT = 0; iT < counts[0]; ++iT) {
    const std::uint64_t* rowT = mT.data() + iT * words;
    for (std::size_t iR = 0; iR < counts[1]; ++iR) {
      const std::uint64_t* rowR = mR.data() + iR * words;
      for (std::size_t w = 0; w < words; ++w) tr[w] = rowT[w] | rowR[w];
      for (std::size_t iW = 0; iW < counts[2]; ++iW) {
        const std::uint64_t* rowW = mW.data() + iW * words;
        int errors = 0;
        for (std::size_t w = 0; w < words; ++w)
          errors += std::popcount((tr[w] | rowW[w]) ^ truth_mask[w]);
        const int corr = M - errors;
        if (corr < best_correct) continue;
        const Thresholds th{vals[0][iT], vals[1][iR], vals[2][iW]};
        if (corr > best_correct || lex_better(th, best_th)) {
          best_correct = corr;
          best_th = th;
        }
      }
    }
  }

  ThresholdFit fit;
  fit.thresholds = best_th;
  fit.confusion = score(ctx, best_th);
  if (correct_of(fit.confusion) != best_correct)
    throw Error("grid_oracle internal error: mask score disagrees with recount");
  fit.accuracy = fit.confusion.accuracy();
  fit.active_set = active_of(ctx, best_th);
  return fit;
}

}  // namespace cogrel
