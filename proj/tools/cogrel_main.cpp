#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cogrel/errors.hpp"
#include "cogrel/io.hpp"
#include "cogrel/kde.hpp"
#include "cogrel/metrics.hpp"
#include "cogrel/model.hpp"
#include "cogrel/pipeline.hpp"
#include "cogrel/synth.hpp"
#include "cogrel/threshold_id.hpp"

namespace fs = std::filesystem;
using namespace cogrel;

namespace {

// Exit codes: 0 ok, 2 unparseable input, 3 not enough data, 4 the optimizer
// did not converge (outputs are written regardless).
constexpr int kOk = 0;
constexpr int kParse = 2;
constexpr int kInsufficient = 3;
constexpr int kNoConvergence = 4;

constexpr const char* kSeedEnvVar = "HYBRID_ID_SEED";

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& cli_seed) {
  if (cli_seed) return *cli_seed;
  if (const char* env = std::getenv(kSeedEnvVar)) {
    std::uint64_t v = 0;
    const char* end = env + std::string_view(env).size();
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || ptr != end)
      throw ParseError(std::string(kSeedEnvVar) + " is not an integer: '" +
                       env + "'");
    return v;
  }
  return 42;
}

RmseMode parse_rmse_mode(const std::string& s) {
  if (s == "reset") return RmseMode::reset;
  if (s == "open_loop") return RmseMode::open_loop;
  throw ParseError("unknown rmse mode '" + s + "' (use reset or open_loop)");
}

struct SignalFile {
  std::vector<double> complexity;
  bool is_trajectory = false;
  Trajectory trajectory;  // filled when the file has the full layout
};

SignalFile load_signal(const fs::path& path) {
  std::ifstream probe(path);
  if (!probe) throw ParseError("cannot open " + path.string());
  std::string header;
  std::getline(probe, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  probe.close();

  SignalFile sig;
  if (header == "k,d,q,T,R,W") {
    sig.is_trajectory = true;
    sig.trajectory = load_trajectory(path);
    sig.complexity = sig.trajectory.complexity;
    return sig;
  }
  if (header != "k,d")
    throw ParseError(path.string() +
                     ": expected header 'k,d' or 'k,d,q,T,R,W'");

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);  // header
  int lineno = 1;
  int expected_k = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 2 cells");
    int k = 0;
    double d = 0.0;
    const auto kr = std::from_chars(line.data(), line.data() + comma, k);
    const auto dr = std::from_chars(line.data() + comma + 1,
                                    line.data() + line.size(), d);
    if (kr.ec != std::errc{} || kr.ptr != line.data() + comma ||
        dr.ec != std::errc{} || dr.ptr != line.data() + line.size())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": bad row '" + line + "'");
    if (k != expected_k)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": sample index out of sequence");
    if (d != 0.0 && d != 1.0)
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": complexity must be 0 or 1");
    ++expected_k;
    sig.complexity.push_back(d);
  }
  return sig;
}

void write_simulation(const fs::path& path, std::span<const double> d,
                      const SimulatedTrajectory& sim) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "k,d,q,T,R,W\n";
  for (int k = 0; k < sim.size(); ++k) {
    const auto& x = sim.states[static_cast<std::size_t>(k)];
    out << k << "," << static_cast<int>(d[static_cast<std::size_t>(k)]) << ","
        << sim.reliance[static_cast<std::size_t>(k)] << ","
        << format_double(x.trust) << "," << format_double(x.risk) << ","
        << format_double(x.workload) << "\n";
  }
  if (!out) throw Error("failed writing " + path.string());
}

// --- subcommand bodies ----------------------------------------------------

int cmd_identify(const fs::path& input, const fs::path& out_model,
                 const fs::path& out_report,
                 const std::optional<std::uint64_t>& seed_opt,
                 const std::string& rmse_mode) {
  const std::uint64_t seed = resolve_seed(seed_opt);
  IdentifyOptions opts;
  opts.ga.seed = seed;
  opts.rmse_mode = parse_rmse_mode(rmse_mode);

  const Trajectory traj = load_trajectory(input);
  const IdentifyOutcome outcome = identify(traj, opts);

  save_model(out_model, outcome.model, seed);
  save_report(out_report, outcome.fit_report);

  std::cout << table_header() << "\n" << table_row(outcome.fit_report) << "\n";
  if (!outcome.all_converged) {
    std::cerr << "warning: continuous fit did not converge on every channel\n";
    return kNoConvergence;
  }
  return kOk;
}

int cmd_validate(const fs::path& input, double split, const fs::path& out,
                 const std::optional<fs::path>& out_model,
                 const std::optional<std::uint64_t>& seed_opt,
                 const std::string& rmse_mode) {
  const std::uint64_t seed = resolve_seed(seed_opt);
  IdentifyOptions opts;
  opts.ga.seed = seed;
  opts.rmse_mode = parse_rmse_mode(rmse_mode);

  const Trajectory traj = load_trajectory(input);
  const ValidationOutcome outcome = split_half_validate(traj, split, opts);

  save_validation(out, outcome);
  if (out_model) save_model(*out_model, outcome.training.model, seed);

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "holdout rmse %.4f %.4f %.4f  accuracy %6.2f  low-excitation %s",
                outcome.report.rmse_trust, outcome.report.rmse_risk,
                outcome.report.rmse_workload, 100.0 * outcome.report.accuracy,
                active_set_label(outcome.report.low_excitation).c_str());
  std::cout << buf << "\n";
  if (!outcome.training.all_converged) {
    std::cerr << "warning: continuous fit did not converge on every channel\n";
    return kNoConvergence;
  }
  return kOk;
}

int cmd_synth(const fs::path& spec_path, const fs::path& out,
              const std::optional<fs::path>& out_model,
              const std::optional<std::uint64_t>& seed_opt) {
  SynthSpec spec = load_synth_spec(spec_path);
  if (seed_opt) spec.seed = *seed_opt;
  const auto [traj, model] = synthesize(spec);
  save_trajectory(out, traj);
  if (out_model) save_model(*out_model, model, spec.seed);
  std::cout << "wrote " << traj.complexity.size() << " samples, "
            << traj.self_reports.size() << " self-reports\n";
  return kOk;
}

int cmd_kde(const fs::path& models_dir, const fs::path& out_dir) {
  if (!fs::is_directory(models_dir))
    throw ParseError(models_dir.string() + " is not a directory");
  fs::create_directories(out_dir);

  std::vector<fs::path> model_files;
  for (const auto& entry : fs::directory_iterator(models_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 11 && name.ends_with(".model.json"))
      model_files.push_back(entry.path());
  }
  std::sort(model_files.begin(), model_files.end());

  std::vector<ParticipantParams> participants;
  for (const fs::path& mp : model_files) {
    fs::path rp = mp;
    rp.replace_filename(
        mp.filename().string().substr(0, mp.filename().string().size() - 11) +
        ".report.json");
    if (!fs::exists(rp)) {
      std::cerr << "warning: no report next to " << mp.string() << ", skipped\n";
      continue;
    }
    const StoredModel stored = load_model(mp);
    const FitReport rep = load_report(rp);
    ParticipantParams p;
    p.channels = {stored.model.trust, stored.model.risk, stored.model.workload};
    p.rmse = {rep.rmse_trust, rep.rmse_risk, rep.rmse_workload};
    participants.push_back(p);
  }
  if (participants.size() < 2)
    throw InsufficientDataError(
        "kde needs at least 2 participants with model+report pairs, found " +
        std::to_string(participants.size()));

  for (const char* param : kViolinParams) {
    const KdeCurve curve = violin_data(param, participants);
    save_kde_curve(out_dir / (std::string(param) + ".csv"), curve);
    save_kde_stats(out_dir / (std::string(param) + ".json"), param, curve);
  }
  std::cout << "wrote 9 density curves from " << participants.size()
            << " participants\n";
  return kOk;
}

int cmd_simulate(const fs::path& model_path, const fs::path& signal_path,
                 const fs::path& out, const std::optional<double>& init_T,
                 const std::optional<double>& init_R,
                 const std::optional<double>& init_W,
                 const std::optional<int>& init_q) {
  const StoredModel stored = load_model(model_path);
  const SignalFile sig = load_signal(signal_path);

  CognitiveState x0;
  int q0 = 0;
  std::span<const double> d(sig.complexity);
  if (sig.is_trajectory) {
    const int k0 = sig.trajectory.first_report_index();
    x0 = sig.trajectory.self_reports.at(k0);
    q0 = sig.trajectory.reliance[static_cast<std::size_t>(k0)];
    d = d.subspan(static_cast<std::size_t>(k0));
  } else if (!init_T || !init_R || !init_W || !init_q) {
    throw ParseError(
        "a bare k,d signal needs --init-T, --init-R, --init-W and --init-q");
  }
  if (init_T) x0.trust = *init_T;
  if (init_R) x0.risk = *init_R;
  if (init_W) x0.workload = *init_W;
  if (init_q) q0 = *init_q;

  const SimulatedTrajectory sim = simulate(x0, q0, d, stored.model);
  write_simulation(out, d, sim);
  std::cout << "simulated " << sim.size() << " steps\n";
  return kOk;
}

int cmd_report(const fs::path& model_path, const fs::path& input,
               const fs::path& out, const std::string& rmse_mode) {
  const StoredModel stored = load_model(model_path);
  const Trajectory traj = load_trajectory(input);
  const FitReport rep = report(traj, stored.model, parse_rmse_mode(rmse_mode));
  save_report(out, rep);
  std::cout << table_header() << "\n" << table_row(rep) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cogrel: identify and exercise hybrid cognitive-state/reliance driver "
      "models"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<fs::path> out_model;
  fs::path input, out, model_path, spec_path, signal_path, models_dir, out_dir;
  std::string rmse_mode = "reset";
  std::string validate_rmse_mode = "open_loop";
  double split = 0.5;
  std::optional<double> init_T, init_R, init_W;
  std::optional<int> init_q;

  CLI::App* identify_cmd =
      app.add_subcommand("identify", "fit all 12 parameters to a trajectory");
  identify_cmd->add_option("--input", input, "trajectory CSV")->required();
  identify_cmd->add_option("--out-model", model_path, "output model JSON")
      ->required();
  identify_cmd->add_option("--out-report", out, "output report JSON")
      ->required();
  identify_cmd->add_option("--seed", seed, "threshold search seed");
  identify_cmd->add_option("--rmse-mode", rmse_mode, "reset or open_loop");

  CLI::App* validate_cmd = app.add_subcommand(
      "validate", "train on the front of the window, score the rest");
  validate_cmd->add_option("--input", input, "trajectory CSV")->required();
  validate_cmd->add_option("--split", split, "training fraction of reports")
      ->required();
  validate_cmd->add_option("--out", out, "output validation JSON")->required();
  validate_cmd->add_option("--out-model", out_model, "also write the model");
  validate_cmd->add_option("--seed", seed, "threshold search seed");
  validate_cmd->add_option("--rmse-mode", validate_rmse_mode,
                           "reset or open_loop (default open_loop)");

  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic trajectory");
  synth_cmd->add_option("--spec", spec_path, "synthesis spec JSON")->required();
  synth_cmd->add_option("--out", out, "output trajectory CSV")->required();
  synth_cmd->add_option("--out-model", out_model,
                        "also write the ground-truth model");
  synth_cmd->add_option("--seed", seed, "override the spec's seed");

  CLI::App* kde_cmd = app.add_subcommand(
      "kde", "population parameter densities from identified models");
  kde_cmd->add_option("--models-dir", models_dir, "directory of *.model.json")
      ->required();
  kde_cmd->add_option("--out-dir", out_dir, "output directory")->required();

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "roll a stored model over a signal");
  simulate_cmd->add_option("--model", model_path, "model JSON")->required();
  simulate_cmd->add_option("--signal", signal_path,
                           "k,d signal or full trajectory CSV")
      ->required();
  simulate_cmd->add_option("--out", out, "output CSV")->required();
  simulate_cmd->add_option("--init-T", init_T, "initial trust");
  simulate_cmd->add_option("--init-R", init_R, "initial risk");
  simulate_cmd->add_option("--init-W", init_W, "initial workload");
  simulate_cmd->add_option("--init-q", init_q, "initial reliance");

  CLI::App* report_cmd = app.add_subcommand(
      "report", "recompute the fit report of a stored model");
  report_cmd->add_option("--model", model_path, "model JSON")->required();
  report_cmd->add_option("--input", input, "trajectory CSV")->required();
  report_cmd->add_option("--out", out, "output report JSON")->required();
  report_cmd->add_option("--rmse-mode", rmse_mode, "reset or open_loop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (identify_cmd->parsed())
      return cmd_identify(input, model_path, out, seed, rmse_mode);
    if (validate_cmd->parsed())
      return cmd_validate(input, split, out, out_model, seed,
                          validate_rmse_mode);
    if (synth_cmd->parsed()) return cmd_synth(spec_path, out, out_model, seed);
    if (kde_cmd->parsed()) return cmd_kde(models_dir, out_dir);
    if (simulate_cmd->parsed())
      return cmd_simulate(model_path, signal_path, out, init_T, init_R, init_W,
                          init_q);
    if (report_cmd->parsed())
      return cmd_report(model_path, input, out, rmse_mode);
  } catch (const InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInsufficient;
  } catch (const DegenerateDistributionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInsufficient;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
