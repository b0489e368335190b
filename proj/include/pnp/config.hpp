#pragma once

#include "pnp/denoisers.hpp"
#include "pnp/forward_models.hpp"
#include "pnp/phantom.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pnp {

struct ExperimentConfig {
  // forward model
  std::string model = "dt";  // dt | gaussian
  DtGeometry geometry;
  int gaussian_rows = 64;        // rows per component
  int gaussian_components = 16;
  double input_snr_db = 40.0;

  // phantom
  PhantomKind phantom = PhantomKind::Blobs;
  std::filesystem::path phantom_path;
  double contrast = kDefaultContrast;
  int checker_block = 0;

  // denoiser
  std::string denoiser = "tv";  // tv | filter | shift | identity
  std::optional<double> sigma;  // overrides the per-denoiser default below
  double sigma_tv = 0.003;
  double sigma_filter = 0.5;
  double sigma_shift = 1.0;
  double damping = 0.0;  // wrap in (1-theta) I + theta D when in (0, 1)
  double shift_c = 1.0;
  TvVariant tv_variant = TvVariant::Anisotropic;
  int tv_inner_iters = 5000;
  double tv_inner_tol = 1e-11;

  // algorithm
  std::string algorithm = "pnp-sgd";  // pnp-ista | pnp-admm | pnp-sgd | ista | admm
  bool accelerated = false;
  double gamma_scale = 1.0;  // gamma = gamma_scale / L
  double lambda = 0.0;       // TV weight for ista/admm; 0 means sigma^2 / gamma
  int batch = 4;
  int iterations = 500;
  std::string sampling = "auto";  // auto | replacement | epoch | full
  int dist_stride = 0;
  bool record_timing = false;
  double cg_tol = kCgTol;
  int cg_max_iter = 0;

  // sweep
  std::vector<double> sweep_gammas{1.0, 0.25, 0.0625};
  std::vector<int> sweep_batches{2, 4, 8};
  int sweep_fixed_batch = 4;
  double sweep_fixed_gamma = 1.0;
  std::vector<std::string> sweep_denoisers{"tv", "filter"};
  bool plots = true;

  // compare
  std::vector<int> compare_budgets{4, 16};
  int compare_iterations = 1000;
  bool compare_timing = true;

  // counterexample
  double ce_gamma = 0.5;
  double ce_sigma = 1.0;
  double ce_c = 1.0;
  double ce_z0 = 0.1;
  int ce_iterations = 100;

  // certify
  int cert_pairs = 1000;
  double cert_alpha = 0.5;
  double cert_domain_scale = kCertificateDomainScale;
  int cert_grid = 16;
  double cert_tol = kCertificateTol;

  std::filesystem::path measurements;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

/// Every recognised key, in documentation order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key; unknown keys and unparsable values throw ConfigError.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value text; '#' starts a comment, blank lines are ignored.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// PNP_SEED, when set, replaces the master seed.
void apply_environment(ExperimentConfig& cfg);

/// Resolved configuration, one key=value per line in config_keys() order.
std::string dump_config(const ExperimentConfig& cfg);

/// Checks invariants needed by `command` (simulate, reconstruct, sweep, compare, counterexample, certify).
void validate_config(const ExperimentConfig& cfg, const std::string& command);

/// Independent stream seed derived from (master, stream) by splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

double denoiser_sigma(const ExperimentConfig& cfg, const std::string& name);
DenoiserPtr make_denoiser(const ExperimentConfig& cfg, const std::string& name, int width, int height);

SamplingMode resolve_sampling(const std::string& name, std::size_t batch, std::size_t num_components);

}  // namespace pnp
