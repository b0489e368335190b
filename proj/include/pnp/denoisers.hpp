#pragma once

#include "pnp/forward_models.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pnp {

enum class DenoiserKind { ProximalTV, AveragedLinearFilter, DampedWrapper, ShiftCounterexample, Identity, Custom };

std::string to_string(DenoiserKind kind);

/*
 * Plug-in slot of the PnP algorithms: a map R^n -> R^n of strength sigma.
 * declared_theta() reports the averagedness constant when it is known.
 */
class Denoiser {
public:
  virtual ~Denoiser() = default;
  virtual RealVec denoise(const RealVec& z, double sigma) const = 0;
  virtual std::optional<double> declared_theta() const { return std::nullopt; }
  virtual DenoiserKind kind() const = 0;
};

using DenoiserPtr = std::shared_ptr<const Denoiser>;

enum class TvVariant { Anisotropic, Isotropic };

struct TvProxOptions {
  int inner_iters = 5000;
  double inner_tol = 1e-11;  // duality gap target
  TvVariant variant = TvVariant::Anisotropic;
};

struct TvProxResult {
  Image image;
  double duality_gap = 0.0;
  int iterations = 0;
};

/// argmin_x (1/2)||x - z||^2 + lambda_scaled ||Dx||_1 with forward differences and
/// Neumann boundary, by accelerated projected gradient on the dual.
TvProxResult tv_prox_detailed(const Image& z, double lambda_scaled, const TvProxOptions& options = {});

Image tv_prox(const Image& z, double lambda_scaled, int inner_iters, double inner_tol);

/// lambda * ||Dx||_1 (anisotropic) or lambda * sum_pixels ||(Dx)_p||_2 (isotropic).
double tv_value(const Image& x, double lambda, TvVariant variant = TvVariant::Anisotropic);

/// Forward-difference gradient, horizontal then vertical blocks, each width*height long
/// (zero where the difference leaves the grid).
RealVec tv_gradient(const RealVec& x, int width, int height);
/// Adjoint of tv_gradient.
RealVec tv_gradient_adjoint(const RealVec& g, int width, int height);

/// Proximal TV as a denoiser; strength enters as lambda * gamma = sigma^2.
class TvDenoiser final : public Denoiser {
public:
  TvDenoiser(int width, int height, TvProxOptions options = {});
  RealVec denoise(const RealVec& z, double sigma) const override;
  std::optional<double> declared_theta() const override { return 0.5; }
  DenoiserKind kind() const override { return DenoiserKind::ProximalTV; }
  const TvProxOptions& options() const { return options_; }

private:
  int width_;
  int height_;
  TvProxOptions options_;
};

/*
 * W = C_h^T C_h with C_h the periodic convolution by a normalized sampled
 * Gaussian of standard deviation sigma pixels. W is symmetric, has unit DC
 * gain and spectrum |h^|^2 in [0, 1], hence 2W - I is nonexpansive.
 */
RealVec averaged_linear_filter(const RealVec& z, int width, int height, double sigma);

class AveragedFilterDenoiser final : public Denoiser {
public:
  AveragedFilterDenoiser(int width, int height) : width_(width), height_(height) {}
  RealVec denoise(const RealVec& z, double sigma) const override;
  std::optional<double> declared_theta() const override { return 0.5; }
  DenoiserKind kind() const override { return DenoiserKind::AveragedLinearFilter; }

private:
  int width_;
  int height_;
};

/// z -> (1 - theta) z + theta F(z, sigma).
class DampedDenoiser final : public Denoiser {
public:
  DampedDenoiser(DenoiserPtr inner, double theta);
  RealVec denoise(const RealVec& z, double sigma) const override;
  std::optional<double> declared_theta() const override { return theta_; }
  DenoiserKind kind() const override { return DenoiserKind::DampedWrapper; }

private:
  DenoiserPtr inner_;
  double theta_;
};

DenoiserPtr damp(DenoiserPtr denoiser, double theta);

/// Elementwise z + sigma sqrt(c) sgn(z), sgn(0) = 0. Bounded but not averaged.
double shift_denoiser(double z, double sigma, double c);
RealVec shift_denoiser(const RealVec& z, double sigma, double c);

class ShiftDenoiser final : public Denoiser {
public:
  explicit ShiftDenoiser(double c);
  RealVec denoise(const RealVec& z, double sigma) const override { return shift_denoiser(z, sigma, c_); }
  DenoiserKind kind() const override { return DenoiserKind::ShiftCounterexample; }
  double c() const { return c_; }

private:
  double c_;
};

class IdentityDenoiser final : public Denoiser {
public:
  RealVec denoise(const RealVec& z, double) const override { return z; }
  DenoiserKind kind() const override { return DenoiserKind::Identity; }
};

struct OperatorCertificate {
  std::size_t pairs_tested = 0;
  double max_violation = 0.0;
  double alpha_tested = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::optional<double> bounded_constant_c;
};

/// ||D(x)-D(y)||^2 - ||x-y||^2 + ((1-alpha)/alpha) ||x-D(x)-y+D(y)||^2; positive means violated.
double averagedness_violation(const Denoiser& denoiser, double alpha, double sigma, const RealVec& x,
                              const RealVec& y);

OperatorCertificate certify_averaged_pairs(const Denoiser& denoiser, double alpha, double sigma,
                                           std::span<const std::pair<RealVec, RealVec>> pairs,
                                           double tol);

inline constexpr double kCertificateDomainScale = 2.0;
inline constexpr double kCertificateTol = 1e-9;

/// Falsification test on random pairs with entries uniform in [-domain_scale, domain_scale].
OperatorCertificate certify_averaged(const Denoiser& denoiser, std::size_t dim, double alpha,
                                     double sigma, std::size_t num_pairs,
                                     double domain_scale = kCertificateDomainScale,
                                     std::uint64_t seed = 0, double tol = kCertificateTol);

/// max over samples of (1/n)||D(x) - x||^2 / sigma^2, an empirical lower bound on c.
double estimate_bounded_constant(const Denoiser& denoiser, double sigma,
                                 std::span<const RealVec> samples);

}  // namespace pnp
