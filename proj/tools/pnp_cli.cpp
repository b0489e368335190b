#include "pnp/experiment.hpp"
#include "pnp/pgm.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <map>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitIo = 4;

int run_command(const std::string& command, const pnp::ExperimentConfig& cfg) {
  using namespace pnp;
  if (command == "simulate") {
    const auto r = cmd_simulate(cfg);
    fmt::print("wrote {} (achieved input SNR {:.4f} dB)\n", r.container.string(), r.achieved_snr_db);
    return kExitOk;
  }
  if (command == "reconstruct") {
    const auto r = cmd_reconstruct(cfg);
    fmt::print("wrote {} and {}\n", r.trace_csv.string(), r.image_pgm.string());
    if (r.run.status == RunStatus::Diverged) {
      fmt::print(stderr, "diverged: {}\n", r.run.diagnostic);
      return kExitDiverged;
    }
    if (!r.run.trace.records.empty()) fmt::print("final SNR {:.3f} dB\n", r.run.trace.records.back().snr_db);
    return kExitOk;
  }
  if (command == "sweep") {
    const auto r = cmd_sweep(cfg);
    std::size_t failed = 0;
    for (const auto& run : r.runs) failed += run.status != RunStatus::Completed;
    fmt::print("wrote {} ({} runs, {} failed)\n", r.summary_csv.string(), r.runs.size(), failed);
    return kExitOk;
  }
  if (command == "compare") {
    const auto r = cmd_compare(cfg);
    for (const auto& run : r.runs)
      fmt::print("budget {:3d} {:10s} final SNR {:8.3f} dB  {:.3g} s/iter\n", run.budget, run.algorithm,
                 run.final_snr_db, run.per_iteration_seconds);
    fmt::print("wrote {}\n", r.summary_csv.string());
    return kExitOk;
  }
  if (command == "counterexample") {
    const auto r = cmd_counterexample(cfg);
    fmt::print("wrote {}; |z^t| = {}\n", r.csv.string(), std::abs(r.trace.z.back()));
    return kExitOk;
  }
  if (command == "certify") {
    const auto r = cmd_certify(cfg);
    for (const auto& row : r.rows)
      fmt::print("{:7s} alpha={} max_violation={:.3e} {}{}\n", row.denoiser, row.certificate.alpha_tested,
                 row.certificate.max_violation, row.certificate.passed ? "passed" : "falsified",
                 row.certificate.bounded_constant_c ? fmt::format(" c={}", *row.certificate.bounded_constant_c) : "");
    fmt::print("wrote {}\n", r.csv.string());
    return kExitOk;
  }
  throw ConfigError("unknown command '" + command + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plug-and-play reconstruction experiments"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> settings;
  std::map<std::string, std::string> flag_values;
  app.add_option("-c,--config", config_path, "key=value configuration file");
  app.add_option("--set", settings, "override as key=value (repeatable)");
  for (const auto& key : pnp::config_keys())
    app.add_option("--" + key.name, flag_values[key.name], key.help);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", "build phantom and measurements, write PNPM1 container"},
      {"reconstruct", "run one algorithm on a measurement file"},
      {"sweep", "step-size and minibatch sweeps of PnP-SGD"},
      {"compare", "batch versus online algorithms at a fixed per-iteration budget"},
      {"counterexample", "divergence of PnP-ISTA with a bounded, non-averaged denoiser"},
      {"certify", "empirical averagedness certificates of the denoisers"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    pnp::ExperimentConfig cfg = config_path.empty() ? pnp::ExperimentConfig{} : pnp::load_config(config_path);
    pnp::apply_environment(cfg);
    for (const auto& key : pnp::config_keys())
      if (app.count("--" + key.name) > 0) pnp::apply_setting(cfg, key.name, flag_values[key.name]);
    for (const auto& s : settings) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw pnp::ConfigError("--set expects key=value, got '" + s + "'");
      pnp::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    return run_command(app.get_subcommands().front()->get_name(), cfg);
  } catch (const pnp::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const pnp::IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kExitIo;
  } catch (const pnp::ParseError& e) {
    fmt::print(stderr, "parse error: {}\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitConfig;
  }
}
