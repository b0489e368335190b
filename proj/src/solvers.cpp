#include "pnp/solvers.hpp"

#include "pnp/metrics.hpp"

#include <chrono>
#include <cmath>

namespace pnp {

double fista_q_update(double q_prev) {
  if (!(q_prev >= 1.0)) throw ConfigError("fista_q_update: q_prev must be >= 1");
  return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * q_prev * q_prev));
}

std::vector<double> IterateTrace::dists() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.dist);
  return out;
}

TvRegularizer::TvRegularizer(double lambda, int width, int height, TvProxOptions options)
    : lambda_(lambda), width_(width), height_(height), options_(options) {
  if (!(lambda >= 0.0)) throw ConfigError("TvRegularizer: lambda must be nonnegative");
}

RealVec TvRegularizer::prox(const RealVec& z, double gamma) const {
  return tv_prox_detailed(Image(z, width_, height_), gamma * lambda_, options_).image.pixels;
}

double TvRegularizer::value(const RealVec& x) const {
  return tv_value(Image(x, width_, height_), lambda_, options_.variant);
}

RealVec operator_P(const MeasurementModel& model, const Denoiser& denoiser, double gamma, double sigma,
                   const RealVec& x) {
  return denoiser.denoise(x - gamma * grad_full(model, x), sigma);
}

double objective(const MeasurementModel& model, const Regularizer& reg, const RealVec& x) {
  return data_fidelity(model, x) + reg.value(x);
}

namespace {

using Map = std::function<RealVec(const RealVec&)>;
using Clock = std::chrono::steady_clock;

constexpr double kDivergenceFactor = 1e6;

void validate(const MeasurementModel& model, const SolverConfig& cfg) {
  if (!(cfg.gamma > 0.0)) throw ConfigError("solver: gamma must be positive");
  if (cfg.iterations < 0) throw ConfigError("solver: iterations must be nonnegative");
  if (cfg.x0 && static_cast<std::size_t>(cfg.x0->size()) != model.input_dim())
    throw ConfigError("solver: x0 length must equal input_dim");
  if (cfg.reference && static_cast<std::size_t>(cfg.reference->size()) != model.input_dim())
    throw ConfigError("solver: reference length must equal input_dim");
}

// Shared bookkeeping: fixed-point distance, SNR, timing, snapshots, divergence.
class TraceRecorder {
public:
  TraceRecorder(const MeasurementModel& model, const SolverConfig& cfg, Map step_map, const RealVec& x0)
      : model_(model), cfg_(cfg), map_(std::move(step_map)), start_(Clock::now()),
        limit_(kDivergenceFactor * (1.0 + x0.norm())) {
    const bool small = model.input_dim() <= 4096;
    stride_ = cfg.dist_stride > 0 ? cfg.dist_stride : (small ? 1 : 10);
    store_ = cfg.store_iterates.value_or(small);
  }

  void record(int k, const RealVec& x, std::vector<std::size_t> indices, SolverResult& out) {
    if (!cfg_.record_trace) return;
    IterateRecord rec;
    rec.k = k;
    if (k % stride_ == 0) {
      const RealVec px = map_(x - cfg_.gamma * grad_full(model_, x));
      rec.dist = (x - px).squaredNorm();
    }
    if (cfg_.reference) rec.snr_db = snr_db(*cfg_.reference, x);
    if (cfg_.record_timing)
      rec.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    rec.indices = std::move(indices);
    out.trace.records.push_back(std::move(rec));
    if (store_) out.trace.iterates.push_back(x);
  }

  // True when the run must stop.
  bool diverged(int k, const RealVec& x, SolverResult& out) const {
    if (!x.allFinite()) {
      out.status = RunStatus::Diverged;
      out.diagnostic = "non_finite_iterate k=" + std::to_string(k);
      return true;
    }
    if (x.norm() > limit_) {
      out.status = RunStatus::Diverged;
      out.diagnostic = "norm_exceeded k=" + std::to_string(k);
      return true;
    }
    return false;
  }

private:
  const MeasurementModel& model_;
  const SolverConfig& cfg_;
  Map map_;
  Clock::time_point start_;
  double limit_;
  int stride_ = 1;
  bool store_ = true;
};

using GradientOracle = std::function<RealVec(const RealVec&, std::vector<std::size_t>&)>;

// ISTA, PnP-ISTA and PnP-SGD share this loop; they differ in the gradient oracle and the map.
SolverResult proximal_gradient_loop(const MeasurementModel& model, const SolverConfig& cfg,
                                    const GradientOracle& gradient, const Map& map) {
  validate(model, cfg);
  const auto n = static_cast<Eigen::Index>(model.input_dim());
  const RealVec x0 = cfg.x0.value_or(RealVec::Zero(n));
  SolverResult out;
  TraceRecorder rec(model, cfg, map, x0);

  RealVec x_prev = x0;
  RealVec s = x0;
  RealVec x = x0;
  double q_prev = 1.0;
  rec.record(0, x0, {}, out);
  for (int k = 1; k <= cfg.iterations; ++k) {
    std::vector<std::size_t> drawn;
    const RealVec g = gradient(s, drawn);
    x = map(s - cfg.gamma * g);
    const double q = cfg.q_schedule == QSchedule::Fista ? fista_q_update(q_prev) : 1.0;
    s = x + ((q_prev - 1.0) / q) * (x - x_prev);
    x_prev = x;
    q_prev = q;
    out.iterations_run = k;
    if (rec.diverged(k, x, out)) break;
    rec.record(k, x, std::move(drawn), out);
  }
  out.x = x;
  return out;
}

// ADMM and PnP-ADMM.
SolverResult admm_loop(const MeasurementModel& model, const SolverConfig& cfg, const Map& map) {
  validate(model, cfg);
  const auto n = static_cast<Eigen::Index>(model.input_dim());
  const RealVec x0 = cfg.x0.value_or(RealVec::Zero(n));
  SolverResult out;
  TraceRecorder rec(model, cfg, map, x0);

  RealVec x = x0;
  RealVec s = RealVec::Zero(n);
  rec.record(0, x0, {}, out);
  for (int k = 1; k <= cfg.iterations; ++k) {
    const CgResult z = prox_datafit(model, cfg.gamma, x - s, cfg.cg_tol, cfg.cg_max_iter);
    if (!z.converged) ++out.cg_warnings;
    x = map(z.solution + s);
    s += z.solution - x;
    out.iterations_run = k;
    if (rec.diverged(k, x, out)) break;
    rec.record(k, x, {}, out);
  }
  out.x = x;
  return out;
}

GradientOracle full_gradient(const MeasurementModel& model) {
  return [&model](const RealVec& s, std::vector<std::size_t>&) { return grad_full(model, s); };
}

}  // namespace

SolverResult run_ista(const MeasurementModel& model, const Regularizer& reg, const SolverConfig& config) {
  const double gamma = config.gamma;
  return proximal_gradient_loop(model, config, full_gradient(model),
                                [&](const RealVec& z) { return reg.prox(z, gamma); });
}

SolverResult run_admm(const MeasurementModel& model, const Regularizer& reg, const SolverConfig& config) {
  const double gamma = config.gamma;
  return admm_loop(model, config, [&](const RealVec& z) { return reg.prox(z, gamma); });
}

SolverResult run_pnp_ista(const MeasurementModel& model, const Denoiser& denoiser, const SolverConfig& config) {
  const double sigma = config.sigma;
  return proximal_gradient_loop(model, config, full_gradient(model),
                                [&](const RealVec& z) { return denoiser.denoise(z, sigma); });
}

SolverResult run_pnp_admm(const MeasurementModel& model, const Denoiser& denoiser, const SolverConfig& config) {
  const double sigma = config.sigma;
  return admm_loop(model, config, [&](const RealVec& z) { return denoiser.denoise(z, sigma); });
}

SolverResult run_pnp_sgd(const MeasurementModel& model, const Denoiser& denoiser, const SolverConfig& config) {
  if (config.batch < 1) throw ConfigError("run_pnp_sgd: B must be >= 1");
  MinibatchSampler sampler(model.num_components(), config.batch, config.sampling, config.seed);
  const bool log_indices = config.sampling != SamplingMode::FullBatch;
  const GradientOracle minibatch = [&](const RealVec& s, std::vector<std::size_t>& drawn) {
    std::vector<std::size_t> idx = sampler.draw();
    RealVec g = grad_indices(model, s, idx);
    if (log_indices) drawn = std::move(idx);
    return g;
  };
  const double sigma = config.sigma;
  return proximal_gradient_loop(model, config, minibatch,
                                [&](const RealVec& z) { return denoiser.denoise(z, sigma); });
}

}  // namespace pnp
