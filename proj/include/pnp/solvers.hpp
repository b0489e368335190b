#pragma once

#include "pnp/denoisers.hpp"
#include "pnp/forward_models.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pnp {

enum class QSchedule { Constant1, Fista };

/// q_k = (1 + sqrt(1 + 4 q_{k-1}^2)) / 2.
double fista_q_update(double q_prev);

struct SolverConfig {
  double gamma = 1.0;
  double sigma = 1.0;
  std::size_t batch = 1;  // SGD only
  int iterations = 100;
  QSchedule q_schedule = QSchedule::Constant1;
  std::uint64_t seed = 0;
  bool record_trace = true;
  SamplingMode sampling = SamplingMode::WithReplacement;

  std::optional<RealVec> x0;          // zero image when empty
  std::optional<RealVec> reference;   // ground truth for per-iteration SNR
  int dist_stride = 0;                // 0: every iteration for n <= 4096, every 10 otherwise
  std::optional<bool> store_iterates; // default: n <= 4096
  bool record_timing = true;          // elapsed_seconds is 0 when disabled
  double cg_tol = kCgTol;
  int cg_max_iter = 0;
};

struct IterateRecord {
  int k = 0;                 // 0 is the initial iterate
  double dist = std::numeric_limits<double>::quiet_NaN();
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  double elapsed_seconds = 0.0;
  std::vector<std::size_t> indices;  // minibatch draw that produced x^k (SGD)
};

/// Records for k = 0..t; iterates mirror records when snapshots are stored.
struct IterateTrace {
  std::vector<IterateRecord> records;
  std::vector<RealVec> iterates;

  std::vector<double> dists() const;
};

enum class RunStatus { Completed, Diverged };

struct SolverResult {
  RealVec x;
  IterateTrace trace;
  RunStatus status = RunStatus::Completed;
  std::string diagnostic;   // reason code when diverged
  int iterations_run = 0;
  int cg_warnings = 0;      // inner data-prox solves that missed tolerance
};

/// Convex regularizer r accessed through prox_{gamma r}.
class Regularizer {
public:
  virtual ~Regularizer() = default;
  virtual RealVec prox(const RealVec& z, double gamma) const = 0;
  virtual double value(const RealVec& x) const = 0;
};

class ZeroRegularizer final : public Regularizer {
public:
  RealVec prox(const RealVec& z, double) const override { return z; }
  double value(const RealVec&) const override { return 0.0; }
};

/// r(x) = lambda ||Dx||_1.
class TvRegularizer final : public Regularizer {
public:
  TvRegularizer(double lambda, int width, int height, TvProxOptions options = {});
  RealVec prox(const RealVec& z, double gamma) const override;
  double value(const RealVec& x) const override;
  double lambda() const { return lambda_; }

private:
  double lambda_;
  int width_;
  int height_;
  TvProxOptions options_;
};

/// P(x) = denoise_sigma(x - gamma grad d(x)).
RealVec operator_P(const MeasurementModel& model, const Denoiser& denoiser, double gamma, double sigma,
                   const RealVec& x);

/// d(x) + r(x).
double objective(const MeasurementModel& model, const Regularizer& reg, const RealVec& x);

SolverResult run_ista(const MeasurementModel& model, const Regularizer& reg, const SolverConfig& config);
SolverResult run_admm(const MeasurementModel& model, const Regularizer& reg, const SolverConfig& config);
SolverResult run_pnp_ista(const MeasurementModel& model, const Denoiser& denoiser, const SolverConfig& config);
SolverResult run_pnp_admm(const MeasurementModel& model, const Denoiser& denoiser, const SolverConfig& config);
SolverResult run_pnp_sgd(const MeasurementModel& model, const Denoiser& denoiser, const SolverConfig& config);

// ---- convergence-theory evaluators ----

/// (2/t)((1+theta)/(1-theta)) ||x0 - x*||^2.
double prop2_bound(double theta, double x0_minus_xstar_sq, int t);

/// 2((1+theta)/(1-theta)) [gamma^2 nu^2 / B + (2 gamma nu / sqrt(B)) ||x0-x*|| + ||x0-x*||^2 / t].
double sgd_bound(double theta, double gamma, double nu, double batch, double x0_dist, int t);

/// nu-hat = sqrt(B) * RMS_draws ||grad_full(x) - minibatch_B(x)||, minibatches drawn with replacement.
/// A proxy at x for the global nu of the bounded-variance assumption.
double estimate_gradient_nu(const MeasurementModel& model, const RealVec& x, std::size_t batch, int draws,
                            std::uint64_t seed);

/// A = 2((1+theta)/(1-theta)) (||x0-x*|| + nu/L)^2.
double corollary1_constant(double theta, double x0_dist, double nu, double lipschitz);

/// Averagedness of F2 o F1 for alpha1-, alpha2-averaged F1, F2.
double composition_alpha(double alpha1, double alpha2);

/// Averagedness of P = D o G_gamma: D theta-averaged, G_gamma (gamma L / 2)-averaged.
double denoiser_gradient_alpha(double theta, double gamma, double lipschitz);

struct CounterexampleTrace {
  std::vector<double> z;  // z^0 .. z^t
  std::vector<double> x;  // x^1 .. x^t, x^k = D(z^{k-1})
  std::vector<bool> upper_branch;  // |x^k| > 1 at step k
};

/// Huber gradient step of the scalar fidelity d'(x) = x for |x| <= 1, sgn(x) otherwise.
double huber_gradient(double x);

/// Scalar PnP-ISTA (q_k = 1) with Huber fidelity and the shift denoiser.
CounterexampleTrace run_counterexample(double gamma, double sigma, double c, double z0, int t);

}  // namespace pnp
