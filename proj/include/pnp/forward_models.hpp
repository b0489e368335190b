#pragma once

#include "pnp/operator_core.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace pnp {

using Rng = std::mt19937_64;

struct Image {
  RealVec pixels;
  int width = 0;
  int height = 0;
  double physical_extent = 0.0;  // side of the square domain in meters (0 if unspecified)

  Image() = default;
  Image(RealVec px, int w, int h, double extent = 0.0);

  static Image zeros(int w, int h, double extent = 0.0);
  std::size_t size() const { return static_cast<std::size_t>(pixels.size()); }
  double& at(int row, int col) { return pixels[static_cast<Eigen::Index>(row) * width + col]; }
  double at(int row, int col) const { return pixels[static_cast<Eigen::Index>(row) * width + col]; }
};

enum class Illumination { PointSource, PlaneWave };

struct DtGeometry {
  double domain_side = 0.18;
  int grid = 32;
  double wavelength = 0.0084;
  double eps_background = 1.0;
  int num_transmitters = 16;
  int num_receivers = 48;
  double ring_radius = 1.6;
  Illumination illumination = Illumination::PointSource;

  double wavenumber() const;    // k_b = 2 pi sqrt(eps_b) / lambda
  double pixel_side() const { return domain_side / grid; }
  void validate() const;
};

/// Full-scale geometry used by the reference experiments (256 x 256, 60 x 360).
DtGeometry full_scale_geometry();

/// g(r) = (i/4) H0^(1)(k_b r), the 2D free-space Helmholtz Green's function.
cplx green_function_2d(double k_b, double r);

enum class ModelKind : std::uint8_t { Dense = 2, DiffractionTomography = 1 };

struct MeasurementComponent {
  OperatorPtr op;
  ComplexVec y;
};

/*
 * I component operators H_i with measurements y_i. The data fidelity is the
 * average d(x) = (1/2I) sum_i ||y_i - H_i x||^2 and `lipschitz` is the largest
 * lambda_max(H_i^H H_i), shared by all components.
 */
class MeasurementModel {
public:
  MeasurementModel(std::vector<MeasurementComponent> components, double lipschitz);

  std::size_t input_dim() const { return n_; }      // n
  std::size_t output_dim() const { return m_; }     // M
  std::size_t num_components() const { return components_.size(); }  // I
  const std::vector<MeasurementComponent>& components() const { return components_; }
  const MeasurementComponent& component(std::size_t i) const { return components_.at(i); }
  double lipschitz() const { return lipschitz_; }

  /// (1/I) sum_i Re(H_i^H y_i), cached for the data prox.
  const RealVec& mean_adjoint_data() const { return mean_adjoint_data_; }

  /// A model restricted to the listed components (same lipschitz bound).
  MeasurementModel subset(std::span<const std::size_t> indices) const;

  // Provenance, consumed by the measurement container and CLI metadata.
  ModelKind kind = ModelKind::Dense;
  std::optional<DtGeometry> geometry;
  std::uint64_t seed = 0;
  double input_snr_db = std::numeric_limits<double>::infinity();
  double achieved_snr_db = std::numeric_limits<double>::infinity();
  int width = 0;
  int height = 0;
  std::optional<Image> truth;

private:
  std::vector<MeasurementComponent> components_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  double lipschitz_ = 0.0;
  RealVec mean_adjoint_data_;
};

/// max_i lambda_max(H_i^H H_i) by power iteration, seeded per component.
double component_lipschitz(const std::vector<MeasurementComponent>& components,
                           std::uint64_t seed);

MeasurementModel build_dt_model(const DtGeometry& geometry, const Image& truth,
                                std::uint64_t seed, double input_snr_db);

MeasurementModel build_gaussian_model(std::size_t n, std::size_t m, std::size_t num_components,
                                      std::uint64_t seed, const Image& truth,
                                      double input_snr_db);

/// 10 log10(sum ||H_i truth||^2 / sum ||y_i - H_i truth||^2).
double empirical_input_snr_db(const MeasurementModel& model, const RealVec& truth);

double data_fidelity(const MeasurementModel& model, const RealVec& x);

/// Re(H_i^H (H_i x - y_i)).
RealVec grad_component(const MeasurementModel& model, std::size_t i, const RealVec& x);

/// (1/|idx|) sum over idx of component gradients, summed in the given order.
RealVec grad_indices(const MeasurementModel& model, const RealVec& x,
                     std::span<const std::size_t> indices);

RealVec grad_full(const MeasurementModel& model, const RealVec& x);

struct MinibatchGradient {
  RealVec gradient;
  std::vector<std::size_t> indices;
};

/// B indices drawn independently and uniformly (with replacement).
MinibatchGradient grad_minibatch(const MeasurementModel& model, const RealVec& x,
                                 std::size_t batch, Rng& rng);

enum class SamplingMode {
  WithReplacement,  // independent uniform draws
  Epoch,            // random cycling through shuffled epochs, no replacement
  FullBatch,        // always all components in order (requires B == I)
};

class MinibatchSampler {
public:
  MinibatchSampler(std::size_t num_components, std::size_t batch, SamplingMode mode,
                   std::uint64_t seed);

  std::vector<std::size_t> draw();

private:
  std::size_t num_components_;
  std::size_t batch_;
  SamplingMode mode_;
  Rng rng_;
  std::vector<std::size_t> epoch_;
  std::size_t cursor_ = 0;
};

/// argmin_z (1/2)||z - x||^2 + gamma d(z), via CG on I + (gamma/I) sum Re(H_i^H H_i).
CgResult prox_datafit(const MeasurementModel& model, double gamma, const RealVec& x,
                      double tol = kCgTol, int max_iter = 0);

}  // namespace pnp
