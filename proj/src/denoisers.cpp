#include "pnp/denoisers.hpp"

#include <cmath>
#include <random>

namespace pnp {

std::string to_string(DenoiserKind kind) {
  switch (kind) {
    case DenoiserKind::ProximalTV: return "tv";
    case DenoiserKind::AveragedLinearFilter: return "filter";
    case DenoiserKind::DampedWrapper: return "damped";
    case DenoiserKind::ShiftCounterexample: return "shift";
    case DenoiserKind::Identity: return "identity";
    case DenoiserKind::Custom: return "custom";
  }
  return "unknown";
}

namespace {

// Sampled Gaussian folded onto a circle of `len` samples, normalized to unit sum.
std::vector<double> circular_kernel(int len, double sigma) {
  std::vector<double> k(static_cast<std::size_t>(len), 0.0);
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  double total = 0.0;
  for (int d = -radius; d <= radius; ++d) {
    const double v = std::exp(-0.5 * (d * d) / (sigma * sigma));
    const int idx = ((d % len) + len) % len;
    k[static_cast<std::size_t>(idx)] += v;
    total += v;
  }
  for (auto& v : k) v /= total;
  return k;
}

// Separable periodic convolution with symmetric circular kernels.
RealVec periodic_blur(const RealVec& z, int w, int h, const std::vector<double>& kw,
                      const std::vector<double>& kh) {
  RealVec tmp(z.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int d = 0; d < w; ++d) {
        const double kv = kw[static_cast<std::size_t>(d)];
        if (kv == 0.0) continue;
        s += kv * z[static_cast<Eigen::Index>(r) * w + (c + d) % w];
      }
      tmp[static_cast<Eigen::Index>(r) * w + c] = s;
    }
  }
  RealVec out(z.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int d = 0; d < h; ++d) {
        const double kv = kh[static_cast<std::size_t>(d)];
        if (kv == 0.0) continue;
        s += kv * tmp[static_cast<Eigen::Index>((r + d) % h) * w + c];
      }
      out[static_cast<Eigen::Index>(r) * w + c] = s;
    }
  }
  return out;
}

}  // namespace

RealVec averaged_linear_filter(const RealVec& z, int width, int height, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("averaged_linear_filter: sigma must be positive");
  if (z.size() != static_cast<Eigen::Index>(width) * height)
    throw ConfigError("averaged_linear_filter: input size does not match grid");
  const auto kw = circular_kernel(width, sigma);
  const auto kh = circular_kernel(height, sigma);
  // C_h is symmetric, so C_h^T C_h is two passes of the same blur.
  return periodic_blur(periodic_blur(z, width, height, kw, kh), width, height, kw, kh);
}

RealVec AveragedFilterDenoiser::denoise(const RealVec& z, double sigma) const {
  return averaged_linear_filter(z, width_, height_, sigma);
}

DampedDenoiser::DampedDenoiser(DenoiserPtr inner, double theta) : inner_(std::move(inner)), theta_(theta) {
  if (!inner_) throw ConfigError("damp: wrapped denoiser is null");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("damp: theta must lie in (0, 1)");
}

RealVec DampedDenoiser::denoise(const RealVec& z, double sigma) const {
  return (1.0 - theta_) * z + theta_ * inner_->denoise(z, sigma);
}

DenoiserPtr damp(DenoiserPtr denoiser, double theta) {
  return std::make_shared<DampedDenoiser>(std::move(denoiser), theta);
}

double shift_denoiser(double z, double sigma, double c) {
  const double sgn = z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
  return z + sigma * std::sqrt(c) * sgn;
}

RealVec shift_denoiser(const RealVec& z, double sigma, double c) {
  return z.unaryExpr([&](double v) { return shift_denoiser(v, sigma, c); });
}

ShiftDenoiser::ShiftDenoiser(double c) : c_(c) {
  if (!(c > 0.0)) throw ConfigError("ShiftDenoiser: c must be positive");
}

double averagedness_violation(const Denoiser& denoiser, double alpha, double sigma, const RealVec& x,
                              const RealVec& y) {
  const RealVec dx = denoiser.denoise(x, sigma);
  const RealVec dy = denoiser.denoise(y, sigma);
  const double lhs = (dx - dy).squaredNorm();
  const double rhs = (x - y).squaredNorm() - ((1.0 - alpha) / alpha) * ((x - dx) - (y - dy)).squaredNorm();
  return lhs - rhs;
}

OperatorCertificate certify_averaged_pairs(const Denoiser& denoiser, double alpha, double sigma,
                                           std::span<const std::pair<RealVec, RealVec>> pairs,
                                           double tol) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("certify_averaged: alpha must lie in (0, 1)");
  if (pairs.empty()) throw ConfigError("certify_averaged: at least one pair required");
  OperatorCertificate cert;
  cert.alpha_tested = alpha;
  cert.tolerance = tol;
  cert.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : pairs) {
    cert.max_violation = std::max(cert.max_violation, averagedness_violation(denoiser, alpha, sigma, x, y));
    ++cert.pairs_tested;
  }
  cert.passed = cert.max_violation <= tol;
  return cert;
}

OperatorCertificate certify_averaged(const Denoiser& denoiser, std::size_t dim, double alpha,
                                     double sigma, std::size_t num_pairs, double domain_scale,
                                     std::uint64_t seed, double tol) {
  if (num_pairs < 1) throw ConfigError("certify_averaged: num_pairs must be >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> uni(-domain_scale, domain_scale);
  std::vector<std::pair<RealVec, RealVec>> pairs;
  pairs.reserve(num_pairs);
  const auto n = static_cast<Eigen::Index>(dim);
  for (std::size_t p = 0; p < num_pairs; ++p) {
    RealVec x(n), y(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = uni(rng);
    for (Eigen::Index j = 0; j < n; ++j) y[j] = uni(rng);
    pairs.emplace_back(std::move(x), std::move(y));
  }
  return certify_averaged_pairs(denoiser, alpha, sigma, pairs, tol);
}

double estimate_bounded_constant(const Denoiser& denoiser, double sigma, std::span<const RealVec> samples) {
  if (samples.empty()) throw ConfigError("estimate_bounded_constant: sample set is empty");
  if (!(sigma > 0.0)) throw ConfigError("estimate_bounded_constant: sigma must be positive");
  double c = 0.0;
  for (const auto& x : samples) {
    const double per_pixel = (denoiser.denoise(x, sigma) - x).squaredNorm() / static_cast<double>(x.size());
    c = std::max(c, per_pixel / (sigma * sigma));
  }
  return c;
}

}  // namespace pnp
