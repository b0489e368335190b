#pragma once

#include "pnp/config.hpp"
#include "pnp/solvers.hpp"
#include "pnp/trace_csv.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace pnp {

/// Seeded phantom at contrast scale, sized by the configured grid.
Image build_phantom(const ExperimentConfig& cfg);

/// Phantom plus forward model with noise, as configured.
MeasurementModel simulate_model(const ExperimentConfig& cfg);

/// Loads cfg.measurements when set, otherwise simulates.
MeasurementModel obtain_model(const ExperimentConfig& cfg);

/// key=value description of a model (geometry, seed, SNRs, lipschitz).
std::string model_metadata(const MeasurementModel& model);

struct SimulateResult {
  std::filesystem::path container;
  std::filesystem::path metadata;
  std::filesystem::path phantom_pgm;
  double achieved_snr_db = 0.0;
};

/// Writes measurements.pnpm, measurements.meta and phantom.pgm into output_dir.
SimulateResult cmd_simulate(const ExperimentConfig& cfg);

struct RunSpec {
  std::string algorithm;  // pnp-ista | pnp-admm | pnp-sgd | ista | admm
  std::string denoiser;
  bool accelerated = false;
  double gamma_scale = 1.0;
  int batch = 1;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// Runs one configured algorithm on a model, with the truth (when present) as SNR reference.
SolverResult execute_run(const ExperimentConfig& cfg, const MeasurementModel& model, const RunSpec& spec);

struct ReconstructResult {
  SolverResult run;
  std::filesystem::path trace_csv;
  std::filesystem::path image_pgm;
  std::filesystem::path metadata;
};

/// trace.csv, recon.pgm and recon.meta in output_dir.
ReconstructResult cmd_reconstruct(const ExperimentConfig& cfg);

struct SweepRun {
  std::string denoiser;
  std::string variant;  // basic | accelerated
  double gamma_scale = 1.0;
  int batch = 1;
  RunStatus status = RunStatus::Completed;
  std::string reason;
  double min_dist = 0.0;
  double final_snr_db = 0.0;
  std::vector<double> dists;
  std::filesystem::path trace_csv;
};

struct SweepResult {
  std::vector<SweepRun> runs;
  CsvTable summary;  // rows: denoiser/variant; columns: gamma list then B list; cells: min dist
  std::filesystem::path summary_csv;

  /// Min dist of a cell; variant "best" takes the lower of basic and accelerated.
  double cell(const std::string& denoiser, const std::string& variant, double gamma_scale, int batch) const;
};

SweepResult cmd_sweep(const ExperimentConfig& cfg);

struct CompareRun {
  std::string algorithm;  // pnp-fista | pnp-admm | pnp-sgd
  int budget = 0;
  RunStatus status = RunStatus::Completed;
  double final_snr_db = 0.0;
  double per_iteration_seconds = 0.0;
  std::filesystem::path trace_csv;
};

struct CompareResult {
  std::vector<CompareRun> runs;
  std::filesystem::path summary_csv;

  const CompareRun& find(const std::string& algorithm, int budget) const;
};

/// Batch methods on an evenly spaced fixed subset of `budget` illuminations versus
/// PnP-SGD cycling over all illuminations with B = budget.
CompareResult cmd_compare(const ExperimentConfig& cfg);

/// Evenly spaced subset {floor(j I / b)}.
std::vector<std::size_t> fixed_subset(std::size_t num_components, std::size_t budget);

struct CounterexampleResult {
  CounterexampleTrace trace;
  std::filesystem::path csv;
};

/// Columns k, z, x, dist, residual; dist = |z^k - 0|^2 to the minimizer of the fidelity.
CounterexampleResult cmd_counterexample(const ExperimentConfig& cfg);
std::string format_counterexample_csv(const CounterexampleTrace& trace, double gamma, double sigma, double c);

struct CertifyRow {
  std::string denoiser;
  double sigma = 0.0;
  OperatorCertificate certificate;
};

struct CertifyResult {
  std::vector<CertifyRow> rows;
  std::filesystem::path csv;
};

/// Certificates for tv, filter and shift at cert_alpha over cert_pairs random pairs.
CertifyResult cmd_certify(const ExperimentConfig& cfg);

}  // namespace pnp
