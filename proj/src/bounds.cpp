#include "pnp/solvers.hpp"

#include <cmath>

namespace pnp {
namespace {

void check_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
}

double averaging_factor(double theta) { return 2.0 * (1.0 + theta) / (1.0 - theta); }

}  // namespace

double prop2_bound(double theta, double x0_minus_xstar_sq, int t) {
  check_theta(theta);
  if (t < 1) throw ConfigError("prop2_bound: t must be >= 1");
  return averaging_factor(theta) * x0_minus_xstar_sq / static_cast<double>(t);
}

double sgd_bound(double theta, double gamma, double nu, double batch, double x0_dist, int t) {
  check_theta(theta);
  if (t < 1 || !(batch >= 1.0) || !(gamma > 0.0) || nu < 0.0 || x0_dist < 0.0)
    throw ConfigError("sgd_bound: requires gamma > 0, nu >= 0, B >= 1, t >= 1");
  const double variance = gamma * gamma * nu * nu / batch;
  const double cross = 2.0 * gamma * nu / std::sqrt(batch) * x0_dist;
  return averaging_factor(theta) * (variance + cross + x0_dist * x0_dist / static_cast<double>(t));
}

double estimate_gradient_nu(const MeasurementModel& model, const RealVec& x, std::size_t batch, int draws,
                            std::uint64_t seed) {
  if (batch < 1 || draws < 1) throw ConfigError("estimate_gradient_nu: batch and draws must be >= 1");
  const RealVec full = grad_full(model, x);
  MinibatchSampler sampler(model.num_components(), batch, SamplingMode::WithReplacement, seed);
  double sum_sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto idx = sampler.draw();
    sum_sq += (grad_indices(model, x, idx) - full).squaredNorm();
  }
  return std::sqrt(static_cast<double>(batch) * sum_sq / draws);
}

double corollary1_constant(double theta, double x0_dist, double nu, double lipschitz) {
  check_theta(theta);
  if (!(lipschitz > 0.0)) throw ConfigError("corollary1_constant: L must be positive");
  const double r = x0_dist + nu / lipschitz;
  return averaging_factor(theta) * r * r;
}

double composition_alpha(double alpha1, double alpha2) {
  if (!(alpha1 > 0.0 && alpha1 < 1.0 && alpha2 > 0.0 && alpha2 < 1.0))
    throw ConfigError("composition_alpha: constants must lie in (0, 1)");
  return (alpha1 + alpha2 - 2.0 * alpha1 * alpha2) / (1.0 - alpha1 * alpha2);
}

double denoiser_gradient_alpha(double theta, double gamma, double lipschitz) {
  const double grad_alpha = gamma * lipschitz / 2.0;
  return composition_alpha(grad_alpha, theta);
}

double huber_gradient(double x) {
  if (std::abs(x) <= 1.0) return x;
  return x > 0.0 ? 1.0 : -1.0;
}

CounterexampleTrace run_counterexample(double gamma, double sigma, double c, double z0, int t) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("run_counterexample: gamma must lie in (0, 1)");
  if (!(sigma > 0.0) || !(c > 0.0)) throw ConfigError("run_counterexample: sigma and c must be positive");
  if (t < 0) throw ConfigError("run_counterexample: t must be nonnegative");
  CounterexampleTrace tr;
  tr.z.reserve(static_cast<std::size_t>(t) + 1);
  tr.z.push_back(z0);
  double z = z0;
  for (int k = 1; k <= t; ++k) {
    const double x = shift_denoiser(z, sigma, c);
    tr.x.push_back(x);
    tr.upper_branch.push_back(std::abs(x) > 1.0);
    z = x - gamma * huber_gradient(x);
    tr.z.push_back(z);
  }
  return tr;
}

}  // namespace pnp
