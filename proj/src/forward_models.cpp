#include "pnp/forward_models.hpp"

#include "pnp/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pnp {

namespace {
constexpr double kModelLipschitzTol = 1e-13;
constexpr int kModelLipschitzMaxIter = 50000;
}  // namespace

Image::Image(RealVec px, int w, int h, double extent)
    : pixels(std::move(px)), width(w), height(h), physical_extent(extent) {
  if (w <= 0 || h <= 0 || pixels.size() != static_cast<Eigen::Index>(w) * h)
    throw ConfigError("Image: width * height must equal the pixel count");
  if (!pixels.allFinite()) throw ConfigError("Image: pixels must be finite");
}

Image Image::zeros(int w, int h, double extent) {
  return Image(RealVec::Zero(static_cast<Eigen::Index>(w) * h), w, h, extent);
}

double DtGeometry::wavenumber() const { return 2.0 * M_PI * std::sqrt(eps_background) / wavelength; }

void DtGeometry::validate() const {
  if (!(wavelength > 0.0)) throw ConfigError("DtGeometry: wavelength must be positive");
  if (!(domain_side > 0.0)) throw ConfigError("DtGeometry: domain_side must be positive");
  if (!(eps_background > 0.0)) throw ConfigError("DtGeometry: eps_background must be positive");
  if (grid < 1) throw ConfigError("DtGeometry: grid must be positive");
  if (num_transmitters < 1 || num_receivers < 1)
    throw ConfigError("DtGeometry: transmitter and receiver counts must be positive");
  if (!(ring_radius > domain_side / std::sqrt(2.0)))
    throw ConfigError("DtGeometry: ring_radius must exceed domain_side / sqrt(2)");
}

DtGeometry full_scale_geometry() {
  DtGeometry g;
  g.domain_side = 0.18;
  g.grid = 256;
  g.wavelength = 0.0084;
  g.eps_background = 1.0;
  g.num_transmitters = 60;
  g.num_receivers = 360;
  g.ring_radius = 1.6;
  return g;
}

cplx green_function_2d(double k_b, double r) {
  if (!(r > 0.0)) throw ConfigError("green_function_2d: r must be positive (singular at 0)");
  const double kr = k_b * r;
  const cplx hankel(bessel_j0(kr), bessel_y0(kr));
  return cplx(0.0, 0.25) * hankel;
}

MeasurementModel::MeasurementModel(std::vector<MeasurementComponent> components, double lipschitz)
    : components_(std::move(components)), lipschitz_(lipschitz) {
  if (components_.empty()) throw ConfigError("MeasurementModel: at least one component required");
  n_ = components_.front().op->input_dim();
  m_ = components_.front().op->output_dim();
  if (n_ == 0 || m_ == 0) throw ConfigError("MeasurementModel: dimensions must be positive");
  mean_adjoint_data_ = RealVec::Zero(static_cast<Eigen::Index>(n_));
  for (const auto& c : components_) {
    if (!c.op || c.op->input_dim() != n_ || c.op->output_dim() != m_)
      throw ConfigError("MeasurementModel: components must share input and output dims");
    if (static_cast<std::size_t>(c.y.size()) != m_)
      throw ConfigError("MeasurementModel: measurement length must equal output_dim");
    mean_adjoint_data_ += c.op->adjoint_real(c.y);
  }
  mean_adjoint_data_ /= static_cast<double>(components_.size());
  if (!(lipschitz_ >= 0.0)) throw ConfigError("MeasurementModel: lipschitz must be nonnegative");
}

MeasurementModel MeasurementModel::subset(std::span<const std::size_t> indices) const {
  std::vector<MeasurementComponent> picked;
  picked.reserve(indices.size());
  for (auto i : indices) picked.push_back(component(i));
  MeasurementModel out(std::move(picked), lipschitz_);
  out.kind = kind;
  out.geometry = geometry;
  out.seed = seed;
  out.input_snr_db = input_snr_db;
  out.achieved_snr_db = achieved_snr_db;
  out.width = width;
  out.height = height;
  out.truth = truth;
  return out;
}

double component_lipschitz(const std::vector<MeasurementComponent>& components,
                           std::uint64_t seed) {
  double l = 0.0;
  for (std::size_t i = 0; i < components.size(); ++i) {
    // tighter than the default: gamma = 1/L must not overshoot the true bound
    const auto est = power_iteration_lipschitz(*components[i].op, kModelLipschitzTol,
                                               kModelLipschitzMaxIter, seed + 7919 * (i + 1));
    l = std::max(l, est.value);
  }
  return l;
}

namespace {

// Values are held at complex64 precision so the binary container round-trips exactly.
cplx to_storage(cplx v) {
  return cplx(static_cast<double>(static_cast<float>(v.real())),
              static_cast<double>(static_cast<float>(v.imag())));
}

ComplexVec to_storage(const ComplexVec& v) { return v.unaryExpr([](cplx c) { return to_storage(c); }); }

ComplexMat to_storage(const ComplexMat& m) { return m.unaryExpr([](cplx c) { return to_storage(c); }); }

// Adds globally scaled circular complex Gaussian noise and finalizes the model.
MeasurementModel finish_model(std::vector<OperatorPtr> ops, const Image& truth, Rng& rng,
                              double input_snr_db, std::uint64_t seed) {
  std::vector<ComplexVec> clean;
  clean.reserve(ops.size());
  double signal_power = 0.0;
  for (const auto& op : ops) {
    clean.push_back(op->apply_real(truth.pixels));
    signal_power += clean.back().squaredNorm();
  }

  std::vector<MeasurementComponent> components;
  components.reserve(ops.size());
  const bool add_noise = std::isfinite(input_snr_db) && signal_power > 0.0;
  std::vector<ComplexVec> noise;
  double noise_power = 0.0;
  if (add_noise) {
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    for (const auto& c : clean) {
      ComplexVec e(c.size());
      for (Eigen::Index k = 0; k < e.size(); ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        e[k] = cplx(re, im);
      }
      noise_power += e.squaredNorm();
      noise.push_back(std::move(e));
    }
  }
  const double scale =
      add_noise ? std::sqrt(signal_power / (noise_power * std::pow(10.0, input_snr_db / 10.0))) : 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    ComplexVec y = clean[i];
    if (add_noise) y += scale * noise[i];
    components.push_back({ops[i], to_storage(y)});
  }

  const double lip = component_lipschitz(components, seed);
  MeasurementModel model(std::move(components), lip);
  model.seed = seed;
  model.input_snr_db = input_snr_db;
  model.width = truth.width;
  model.height = truth.height;
  model.truth = truth;
  model.achieved_snr_db = empirical_input_snr_db(model, truth.pixels);
  return model;
}

}  // namespace

MeasurementModel build_dt_model(const DtGeometry& geometry, const Image& truth,
                                std::uint64_t seed, double input_snr_db) {
  geometry.validate();
  if (truth.width != geometry.grid || truth.height != geometry.grid)
    throw ConfigError("build_dt_model: truth grid does not match geometry");

  const int g = geometry.grid;
  const auto n = static_cast<Eigen::Index>(g) * g;
  const int m = geometry.num_receivers;
  const double kb = geometry.wavenumber();
  const double delta = geometry.pixel_side();

  std::vector<double> px(static_cast<std::size_t>(n));
  std::vector<double> py(static_cast<std::size_t>(n));
  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      const auto j = static_cast<std::size_t>(row) * g + col;
      px[j] = -geometry.domain_side / 2.0 + (col + 0.5) * delta;
      py[j] = geometry.domain_side / 2.0 - (row + 0.5) * delta;
    }
  }

  auto s = std::make_shared<ComplexMat>(m, n);
  const double born_scale = kb * kb * delta * delta;
  for (int r = 0; r < m; ++r) {
    const double angle = 2.0 * M_PI * r / m;
    const double rx = geometry.ring_radius * std::cos(angle);
    const double ry = geometry.ring_radius * std::sin(angle);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dist = std::hypot(rx - px[static_cast<std::size_t>(j)], ry - py[static_cast<std::size_t>(j)]);
      if (!(dist > 0.0)) throw ConfigError("build_dt_model: receiver coincides with a grid point");
      (*s)(r, j) = born_scale * green_function_2d(kb, dist);
    }
  }
  *s = to_storage(*s);
  std::shared_ptr<const ComplexMat> shared_s = s;

  std::vector<OperatorPtr> ops;
  for (int t = 0; t < geometry.num_transmitters; ++t) {
    const double angle = 2.0 * M_PI * t / geometry.num_transmitters;
    const double tx = geometry.ring_radius * std::cos(angle);
    const double ty = geometry.ring_radius * std::sin(angle);
    ComplexVec u(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (geometry.illumination == Illumination::PointSource) {
        u[j] = green_function_2d(kb, std::hypot(px[jj] - tx, py[jj] - ty));
      } else {
        // plane wave travelling from the transmitter direction towards the origin
        const double phase = -kb * (std::cos(angle) * px[jj] + std::sin(angle) * py[jj]);
        u[j] = std::polar(1.0, phase);
      }
    }
    ops.push_back(std::make_shared<ScaledColumnsOperator>(shared_s, to_storage(u)));
  }

  Rng rng(seed);
  MeasurementModel model = finish_model(std::move(ops), truth, rng, input_snr_db, seed);
  model.kind = ModelKind::DiffractionTomography;
  model.geometry = geometry;
  return model;
}

MeasurementModel build_gaussian_model(std::size_t n, std::size_t m, std::size_t num_components,
                                      std::uint64_t seed, const Image& truth,
                                      double input_snr_db) {
  if (n == 0 || m == 0 || num_components == 0)
    throw ConfigError("build_gaussian_model: dimensions must be positive");
  if (truth.size() != n) throw ConfigError("build_gaussian_model: truth length must equal n");

  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<OperatorPtr> ops;
  for (std::size_t i = 0; i < num_components; ++i) {
    ComplexMat h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index c = 0; c < h.cols(); ++c)
      for (Eigen::Index r = 0; r < h.rows(); ++r) h(r, c) = scale * normal(rng);
    ops.push_back(std::make_shared<DenseOperator>(to_storage(h)));
  }
  MeasurementModel model = finish_model(std::move(ops), truth, rng, input_snr_db, seed);
  model.kind = ModelKind::Dense;
  return model;
}

double empirical_input_snr_db(const MeasurementModel& model, const RealVec& truth) {
  double signal = 0.0;
  double noise = 0.0;
  for (const auto& c : model.components()) {
    const ComplexVec clean = c.op->apply_real(truth);
    signal += clean.squaredNorm();
    noise += (c.y - clean).squaredNorm();
  }
  if (noise == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(signal / noise);
}

double data_fidelity(const MeasurementModel& model, const RealVec& x) {
  double total = 0.0;
  for (const auto& c : model.components()) total += (c.y - c.op->apply_real(x)).squaredNorm();
  return total / (2.0 * static_cast<double>(model.num_components()));
}

RealVec grad_component(const MeasurementModel& model, std::size_t i, const RealVec& x) {
  if (static_cast<std::size_t>(x.size()) != model.input_dim())
    throw ConfigError("gradient: x length must equal input_dim");
  const auto& c = model.component(i);
  return c.op->adjoint_real(c.op->apply_real(x) - c.y);
}

RealVec grad_indices(const MeasurementModel& model, const RealVec& x,
                     std::span<const std::size_t> indices) {
  if (indices.empty()) throw ConfigError("gradient: at least one component index required");
  RealVec sum = RealVec::Zero(static_cast<Eigen::Index>(model.input_dim()));
  for (auto i : indices) sum += grad_component(model, i, x);
  return sum / static_cast<double>(indices.size());
}

RealVec grad_full(const MeasurementModel& model, const RealVec& x) {
  std::vector<std::size_t> all(model.num_components());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return grad_indices(model, x, all);
}

MinibatchGradient grad_minibatch(const MeasurementModel& model, const RealVec& x,
                                 std::size_t batch, Rng& rng) {
  if (batch < 1) throw ConfigError("grad_minibatch: B must be at least 1");
  std::uniform_int_distribution<std::size_t> pick(0, model.num_components() - 1);
  MinibatchGradient out;
  out.indices.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) out.indices.push_back(pick(rng));
  out.gradient = grad_indices(model, x, out.indices);
  return out;
}

MinibatchSampler::MinibatchSampler(std::size_t num_components, std::size_t batch,
                                   SamplingMode mode, std::uint64_t seed)
    : num_components_(num_components), batch_(batch), mode_(mode), rng_(seed) {
  if (batch_ < 1 || num_components_ < 1) throw ConfigError("MinibatchSampler: B and I must be >= 1");
  if (mode_ == SamplingMode::FullBatch && batch_ != num_components_)
    throw ConfigError("MinibatchSampler: full-batch sampling requires B == I");
}

std::vector<std::size_t> MinibatchSampler::draw() {
  std::vector<std::size_t> idx;
  idx.reserve(batch_);
  switch (mode_) {
    case SamplingMode::WithReplacement: {
      std::uniform_int_distribution<std::size_t> pick(0, num_components_ - 1);
      for (std::size_t b = 0; b < batch_; ++b) idx.push_back(pick(rng_));
      break;
    }
    case SamplingMode::Epoch: {
      for (std::size_t b = 0; b < batch_; ++b) {
        if (cursor_ == epoch_.size()) {
          epoch_.resize(num_components_);
          std::iota(epoch_.begin(), epoch_.end(), std::size_t{0});
          std::shuffle(epoch_.begin(), epoch_.end(), rng_);
          cursor_ = 0;
        }
        idx.push_back(epoch_[cursor_++]);
      }
      break;
    }
    case SamplingMode::FullBatch:
      for (std::size_t i = 0; i < num_components_; ++i) idx.push_back(i);
      break;
  }
  return idx;
}

CgResult prox_datafit(const MeasurementModel& model, double gamma, const RealVec& x, double tol,
                      int max_iter) {
  if (!(gamma > 0.0)) throw ConfigError("prox_datafit: gamma must be positive");
  if (static_cast<std::size_t>(x.size()) != model.input_dim())
    throw ConfigError("prox_datafit: x length must equal input_dim");
  const double weight = gamma / static_cast<double>(model.num_components());
  const SymmetricMap normal = [&](const RealVec& z) -> RealVec {
    RealVec acc = RealVec::Zero(z.size());
    for (const auto& c : model.components()) acc += c.op->adjoint_real(c.op->apply_real(z));
    return z + weight * acc;
  };
  const RealVec rhs = x + gamma * model.mean_adjoint_data();
  return cg_solve(normal, rhs, tol, max_iter);
}

}  // namespace pnp
