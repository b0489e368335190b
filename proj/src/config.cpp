#include "pnp/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pnp {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Accepts plain numbers and the forms "1/L" and "1/4L" used in tables.
double parse_gamma_scale(const std::string& key, const std::string& v) {
  if (!v.empty() && v.back() == 'L') {
    const auto slash = v.find('/');
    if (slash == std::string::npos) throw ConfigError("config: key '" + key + "' cannot parse '" + v + "'");
    const double num = to_double(key, v.substr(0, slash));
    const std::string den_text = v.substr(slash + 1, v.size() - slash - 2);
    const double den = den_text.empty() ? 1.0 : to_double(key, den_text);
    return num / den;
  }
  return to_double(key, v);
}

std::string num(double v) { return fmt::format("{}", v); }

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    if constexpr (std::is_same_v<T, std::string>)
      out += v[i];
    else
      out += fmt::format("{}", v[i]);
  }
  return out;
}

ConfigKey real_key(std::string name, std::string help, double ExperimentConfig::*field) {
  return {name, std::move(help),
          [field, name](ExperimentConfig& c, const std::string& v) { c.*field = to_double(name, v); },
          [field](const ExperimentConfig& c) { return num(c.*field); }};
}

ConfigKey int_key(std::string name, std::string help, int ExperimentConfig::*field) {
  return {name, std::move(help),
          [field, name](ExperimentConfig& c, const std::string& v) { c.*field = static_cast<int>(to_int(name, v)); },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

ConfigKey bool_key(std::string name, std::string help, bool ExperimentConfig::*field) {
  return {name, std::move(help),
          [field, name](ExperimentConfig& c, const std::string& v) { c.*field = to_bool(name, v); },
          [field](const ExperimentConfig& c) { return std::string(c.*field ? "true" : "false"); }};
}

ConfigKey string_key(std::string name, std::string help, std::string ExperimentConfig::*field) {
  return {name, std::move(help), [field](ExperimentConfig& c, const std::string& v) { c.*field = v; },
          [field](const ExperimentConfig& c) { return c.*field; }};
}

ConfigKey path_key(std::string name, std::string help, std::filesystem::path ExperimentConfig::*field) {
  return {name, std::move(help), [field](ExperimentConfig& c, const std::string& v) { c.*field = v; },
          [field](const ExperimentConfig& c) { return (c.*field).string(); }};
}

template <typename T>
ConfigKey geo_key(std::string name, std::string help, T DtGeometry::*field) {
  return {name, std::move(help),
          [field, name](ExperimentConfig& c, const std::string& v) {
            if constexpr (std::is_same_v<T, int>)
              c.geometry.*field = static_cast<int>(to_int(name, v));
            else
              c.geometry.*field = to_double(name, v);
          },
          [field](const ExperimentConfig& c) { return fmt::format("{}", c.geometry.*field); }};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> k;
  k.push_back(string_key("model", "forward model: dt | gaussian", &ExperimentConfig::model));
  k.push_back(geo_key("grid", "image side in pixels", &DtGeometry::grid));
  k.push_back(geo_key("domain_side", "image domain side [m]", &DtGeometry::domain_side));
  k.push_back(geo_key("wavelength", "wavelength [m]", &DtGeometry::wavelength));
  k.push_back(geo_key("eps_background", "background permittivity", &DtGeometry::eps_background));
  k.push_back(geo_key("transmitters", "number of illuminations I", &DtGeometry::num_transmitters));
  k.push_back(geo_key("receivers", "receivers per illumination M", &DtGeometry::num_receivers));
  k.push_back(geo_key("ring_radius", "transmitter/receiver ring radius [m]", &DtGeometry::ring_radius));
  k.push_back({"illumination", "incident field: point | plane",
               [](ExperimentConfig& c, const std::string& v) {
                 if (v == "point") c.geometry.illumination = Illumination::PointSource;
                 else if (v == "plane") c.geometry.illumination = Illumination::PlaneWave;
                 else throw ConfigError("config: illumination must be point or plane, got '" + v + "'");
               },
               [](const ExperimentConfig& c) {
                 return std::string(c.geometry.illumination == Illumination::PointSource ? "point" : "plane");
               }});
  k.push_back(int_key("gaussian_rows", "rows per component (gaussian model)", &ExperimentConfig::gaussian_rows));
  k.push_back(int_key("gaussian_components", "components (gaussian model)", &ExperimentConfig::gaussian_components));
  k.push_back(real_key("input_snr_db", "measurement SNR [dB]; inf for noiseless", &ExperimentConfig::input_snr_db));
  k.push_back({"phantom", "phantom: blobs | checker | pgm",
               [](ExperimentConfig& c, const std::string& v) { c.phantom = parse_phantom_kind(v); },
               [](const ExperimentConfig& c) {
                 switch (c.phantom) {
                   case PhantomKind::Blobs: return std::string("blobs");
                   case PhantomKind::Checker: return std::string("checker");
                   case PhantomKind::FromPgm: return std::string("pgm");
                 }
                 return std::string("blobs");
               }});
  k.push_back(path_key("phantom_path", "PGM file for phantom=pgm", &ExperimentConfig::phantom_path));
  k.push_back(real_key("contrast", "peak permittivity contrast f_max", &ExperimentConfig::contrast));
  k.push_back(int_key("checker_block", "checker block size (0: grid/4)", &ExperimentConfig::checker_block));
  k.push_back(string_key("denoiser", "denoiser: tv | filter | shift | identity", &ExperimentConfig::denoiser));
  k.push_back({"sigma", "denoiser strength; overrides sigma_<denoiser>",
               [](ExperimentConfig& c, const std::string& v) {
                 if (v.empty()) c.sigma.reset();
                 else c.sigma = to_double("sigma", v);
               },
               [](const ExperimentConfig& c) { return c.sigma ? num(*c.sigma) : std::string(); }});
  k.push_back(real_key("sigma_tv", "default sigma of the TV denoiser (lambda gamma = sigma^2)", &ExperimentConfig::sigma_tv));
  k.push_back(real_key("sigma_filter", "default Gaussian std [pixels] of the averaged filter", &ExperimentConfig::sigma_filter));
  k.push_back(real_key("sigma_shift", "default sigma of the shift denoiser", &ExperimentConfig::sigma_shift));
  k.push_back(real_key("damping", "damping theta in (0,1); 0 disables", &ExperimentConfig::damping));
  k.push_back(real_key("shift_c", "bounded-denoiser constant c of the shift denoiser", &ExperimentConfig::shift_c));
  k.push_back({"tv_variant", "TV norm: anisotropic | isotropic",
               [](ExperimentConfig& c, const std::string& v) {
                 if (v == "anisotropic") c.tv_variant = TvVariant::Anisotropic;
                 else if (v == "isotropic") c.tv_variant = TvVariant::Isotropic;
                 else throw ConfigError("config: tv_variant must be anisotropic or isotropic, got '" + v + "'");
               },
               [](const ExperimentConfig& c) {
                 return std::string(c.tv_variant == TvVariant::Anisotropic ? "anisotropic" : "isotropic");
               }});
  k.push_back(int_key("tv_inner_iters", "TV prox inner iteration cap", &ExperimentConfig::tv_inner_iters));
  k.push_back(real_key("tv_inner_tol", "TV prox duality-gap tolerance", &ExperimentConfig::tv_inner_tol));
  k.push_back(string_key("algorithm", "pnp-ista | pnp-admm | pnp-sgd | ista | admm", &ExperimentConfig::algorithm));
  k.push_back(bool_key("accelerated", "FISTA momentum (q_k update) instead of q_k = 1", &ExperimentConfig::accelerated));
  k.push_back({"gamma", "step size in units of 1/L, e.g. 1, 0.25 or 1/4L",
               [](ExperimentConfig& c, const std::string& v) { c.gamma_scale = parse_gamma_scale("gamma", v); },
               [](const ExperimentConfig& c) { return num(c.gamma_scale); }});
  k.push_back(real_key("lambda", "TV weight for ista/admm (0: sigma^2/gamma)", &ExperimentConfig::lambda));
  k.push_back(int_key("batch", "minibatch size B", &ExperimentConfig::batch));
  k.push_back(int_key("iterations", "iterations t", &ExperimentConfig::iterations));
  k.push_back(string_key("sampling", "auto | replacement | epoch | full", &ExperimentConfig::sampling));
  k.push_back(int_key("dist_stride", "fixed-point distance stride (0: auto)", &ExperimentConfig::dist_stride));
  k.push_back(bool_key("record_timing", "write wallclock into elapsed_s", &ExperimentConfig::record_timing));
  k.push_back(real_key("cg_tol", "relative CG tolerance of the ADMM data prox", &ExperimentConfig::cg_tol));
  k.push_back(int_key("cg_max_iter", "CG iteration cap (0: 10 n)", &ExperimentConfig::cg_max_iter));
  k.push_back({"sweep_gammas", "comma list of step sizes in units of 1/L",
               [](ExperimentConfig& c, const std::string& v) {
                 c.sweep_gammas.clear();
                 for (const auto& s : split_list(v)) c.sweep_gammas.push_back(parse_gamma_scale("sweep_gammas", s));
               },
               [](const ExperimentConfig& c) { return join(c.sweep_gammas); }});
  k.push_back({"sweep_batches", "comma list of minibatch sizes",
               [](ExperimentConfig& c, const std::string& v) {
                 c.sweep_batches.clear();
                 for (const auto& s : split_list(v)) c.sweep_batches.push_back(static_cast<int>(to_int("sweep_batches", s)));
               },
               [](const ExperimentConfig& c) { return join(c.sweep_batches); }});
  k.push_back(int_key("sweep_fixed_batch", "B used by the step-size sweep", &ExperimentConfig::sweep_fixed_batch));
  k.push_back({"sweep_fixed_gamma", "step size (units of 1/L) used by the minibatch sweep",
               [](ExperimentConfig& c, const std::string& v) { c.sweep_fixed_gamma = parse_gamma_scale("sweep_fixed_gamma", v); },
               [](const ExperimentConfig& c) { return num(c.sweep_fixed_gamma); }});
  k.push_back({"sweep_denoisers", "comma list of denoisers (summary rows)",
               [](ExperimentConfig& c, const std::string& v) { c.sweep_denoisers = split_list(v); },
               [](const ExperimentConfig& c) { return join(c.sweep_denoisers); }});
  k.push_back(bool_key("plots", "write SVG plots", &ExperimentConfig::plots));
  k.push_back({"compare_budgets", "comma list of per-iteration illumination budgets",
               [](ExperimentConfig& c, const std::string& v) {
                 c.compare_budgets.clear();
                 for (const auto& s : split_list(v)) c.compare_budgets.push_back(static_cast<int>(to_int("compare_budgets", s)));
               },
               [](const ExperimentConfig& c) { return join(c.compare_budgets); }});
  k.push_back(int_key("compare_iterations", "iterations per compare run", &ExperimentConfig::compare_iterations));
  k.push_back(bool_key("compare_timing", "record wallclock in compare runs", &ExperimentConfig::compare_timing));
  k.push_back(real_key("ce_gamma", "counterexample step gamma in (0,1)", &ExperimentConfig::ce_gamma));
  k.push_back(real_key("ce_sigma", "counterexample denoiser sigma", &ExperimentConfig::ce_sigma));
  k.push_back(real_key("ce_c", "counterexample constant c", &ExperimentConfig::ce_c));
  k.push_back(real_key("ce_z0", "counterexample start z0", &ExperimentConfig::ce_z0));
  k.push_back(int_key("ce_iterations", "counterexample iterations", &ExperimentConfig::ce_iterations));
  k.push_back(int_key("cert_pairs", "random pairs per certificate", &ExperimentConfig::cert_pairs));
  k.push_back(real_key("cert_alpha", "averagedness constant under test", &ExperimentConfig::cert_alpha));
  k.push_back(real_key("cert_domain_scale", "pair entries uniform in [-s, s]", &ExperimentConfig::cert_domain_scale));
  k.push_back(int_key("cert_grid", "image side used for certificates", &ExperimentConfig::cert_grid));
  k.push_back(real_key("cert_tol", "allowed violation", &ExperimentConfig::cert_tol));
  k.push_back(path_key("measurements", "PNPM1 measurement file (reconstruct)", &ExperimentConfig::measurements));
  k.push_back(path_key("output_dir", "directory for all artifacts", &ExperimentConfig::output_dir));
  k.push_back({"seed", "master seed (PNP_SEED overrides)",
               [](ExperimentConfig& c, const std::string& v) {
                 const long long s = to_int("seed", v);
                 if (s < 0) throw ConfigError("config: seed must be nonnegative");
                 c.seed = static_cast<std::uint64_t>(s);
               },
               [](const ExperimentConfig& c) { return std::to_string(c.seed); }});
  return k;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, trim(value));
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("config line {}: expected key=value, got '{}'", lineno, line));
    apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg;
  apply_config_text(cfg, ss.str());
  return cfg;
}

void apply_environment(ExperimentConfig& cfg) {
  if (const char* s = std::getenv("PNP_SEED"); s && *s) apply_setting(cfg, "seed", s);
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + "=" + k.get(cfg) + "\n";
  return out;
}

void validate_config(const ExperimentConfig& cfg, const std::string& command) {
  if (cfg.model != "dt" && cfg.model != "gaussian")
    throw ConfigError("config: model must be dt or gaussian, got '" + cfg.model + "'");
  if (cfg.geometry.grid < 8) throw ConfigError("config: grid must be at least 8");
  if (cfg.model == "dt") cfg.geometry.validate();
  if (cfg.model == "gaussian" && (cfg.gaussian_rows < 1 || cfg.gaussian_components < 1))
    throw ConfigError("config: gaussian_rows and gaussian_components must be positive");
  if (cfg.phantom == PhantomKind::FromPgm && !std::filesystem::exists(cfg.phantom_path))
    throw ConfigError("config: phantom_path does not exist: " + cfg.phantom_path.string());
  if (!(cfg.contrast > 0.0)) throw ConfigError("config: contrast must be positive");
  if (cfg.iterations < 0) throw ConfigError("config: iterations must be nonnegative");
  if (cfg.batch < 1) throw ConfigError("config: batch must be >= 1");
  if (!(cfg.gamma_scale > 0.0)) throw ConfigError("config: gamma must be positive");
  if (cfg.damping != 0.0 && !(cfg.damping > 0.0 && cfg.damping < 1.0))
    throw ConfigError("config: damping must be 0 or lie in (0, 1)");
  if (cfg.sampling != "auto" && cfg.sampling != "replacement" && cfg.sampling != "epoch" && cfg.sampling != "full")
    throw ConfigError("config: sampling must be auto, replacement, epoch or full");

  if (command == "reconstruct") {
    const std::vector<std::string> algos{"pnp-ista", "pnp-admm", "pnp-sgd", "ista", "admm"};
    if (std::find(algos.begin(), algos.end(), cfg.algorithm) == algos.end())
      throw ConfigError("config: unknown algorithm '" + cfg.algorithm + "'");
    if (cfg.measurements.empty()) throw ConfigError("config: reconstruct needs measurements=<file>");
    if (!std::filesystem::exists(cfg.measurements))
      throw ConfigError("config: measurements file does not exist: " + cfg.measurements.string());
  }
  if (command == "sweep") {
    if (cfg.sweep_gammas.empty()) throw ConfigError("config: sweep_gammas must be nonempty");
    if (cfg.sweep_batches.empty()) throw ConfigError("config: sweep_batches must be nonempty");
    if (cfg.sweep_denoisers.empty()) throw ConfigError("config: sweep_denoisers must be nonempty");
    for (double g : cfg.sweep_gammas)
      if (!(g > 0.0)) throw ConfigError("config: sweep_gammas entries must be positive");
    for (int b : cfg.sweep_batches)
      if (b < 1) throw ConfigError("config: sweep_batches entries must be >= 1");
    if (cfg.sweep_fixed_batch < 1) throw ConfigError("config: sweep_fixed_batch must be >= 1");
  }
  if (command == "compare") {
    if (cfg.compare_budgets.empty()) throw ConfigError("config: compare_budgets must be nonempty");
    for (int b : cfg.compare_budgets)
      if (b < 1) throw ConfigError("config: compare_budgets entries must be >= 1");
    if (cfg.compare_iterations < 1) throw ConfigError("config: compare_iterations must be >= 1");
  }
  if (command == "counterexample") {
    if (!(cfg.ce_gamma > 0.0 && cfg.ce_gamma < 1.0)) throw ConfigError("config: ce_gamma must lie in (0, 1)");
    if (cfg.ce_iterations < 0) throw ConfigError("config: ce_iterations must be nonnegative");
  }
  if (command == "certify") {
    if (cfg.cert_pairs < 1) throw ConfigError("config: cert_pairs must be >= 1");
    if (!(cfg.cert_alpha > 0.0 && cfg.cert_alpha < 1.0)) throw ConfigError("config: cert_alpha must lie in (0, 1)");
    if (cfg.cert_grid < 2) throw ConfigError("config: cert_grid must be >= 2");
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double denoiser_sigma(const ExperimentConfig& cfg, const std::string& name) {
  if (cfg.sigma && name == cfg.denoiser) return *cfg.sigma;
  if (name == "tv") return cfg.sigma_tv;
  if (name == "filter") return cfg.sigma_filter;
  if (name == "shift") return cfg.sigma_shift;
  if (name == "identity") return 1.0;
  throw ConfigError("config: unknown denoiser '" + name + "'");
}

DenoiserPtr make_denoiser(const ExperimentConfig& cfg, const std::string& name, int width, int height) {
  DenoiserPtr d;
  if (name == "tv") {
    TvProxOptions opt;
    opt.inner_iters = cfg.tv_inner_iters;
    opt.inner_tol = cfg.tv_inner_tol;
    opt.variant = cfg.tv_variant;
    d = std::make_shared<TvDenoiser>(width, height, opt);
  } else if (name == "filter") {
    d = std::make_shared<AveragedFilterDenoiser>(width, height);
  } else if (name == "shift") {
    d = std::make_shared<ShiftDenoiser>(cfg.shift_c);
  } else if (name == "identity") {
    d = std::make_shared<IdentityDenoiser>();
  } else {
    throw ConfigError("config: unknown denoiser '" + name + "' (expected tv, filter, shift or identity)");
  }
  if (cfg.damping > 0.0) d = damp(d, cfg.damping);
  return d;
}

SamplingMode resolve_sampling(const std::string& name, std::size_t batch, std::size_t num_components) {
  if (name == "replacement") return SamplingMode::WithReplacement;
  if (name == "epoch") return SamplingMode::Epoch;
  if (name == "full") return SamplingMode::FullBatch;
  if (name == "auto") return batch == num_components ? SamplingMode::FullBatch : SamplingMode::WithReplacement;
  throw ConfigError("config: unknown sampling '" + name + "'");
}

}  // namespace pnp
