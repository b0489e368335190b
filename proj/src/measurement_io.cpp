#include "pnp/measurement_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pnp {
namespace {

static_assert(std::endian::native == std::endian::little, "container I/O assumes little-endian");

constexpr char kMagic[5] = {'P', 'N', 'P', 'M', '1'};

class Writer {
public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void put_c64(cplx v) {
    put(static_cast<float>(v.real()));
    put(static_cast<float>(v.imag()));
  }
  void raw(const char* p, std::size_t len) { out_.append(p, len); }
  std::string take() { return std::move(out_); }

private:
  std::string out_;
};

class Reader {
public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  cplx get_c64() {
    const float re = get<float>();
    const float im = get<float>();
    return cplx(re, im);
  }
  void expect_magic() {
    need(sizeof(kMagic));
    if (std::memcmp(bytes_.data(), kMagic, sizeof(kMagic)) != 0)
      throw IoError("measurement container: bad magic (expected PNPM1)");
    pos_ += sizeof(kMagic);
  }
  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t pos() const { return pos_; }

private:
  void need(std::size_t len) const {
    if (bytes_.size() - pos_ < len)
      throw IoError("measurement container: truncated at byte " + std::to_string(pos_));
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_measurements(const MeasurementModel& model) {
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.put(static_cast<std::uint8_t>(model.kind));
  const auto n = model.input_dim();
  const auto m = model.output_dim();
  const auto count = model.num_components();
  w.put<std::uint64_t>(n);
  w.put<std::uint64_t>(m);
  w.put<std::uint64_t>(count);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.width));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(model.height));
  const DtGeometry g = model.geometry.value_or(DtGeometry{});
  w.put(g.domain_side);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.grid));
  w.put(g.wavelength);
  w.put(g.eps_background);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.num_transmitters));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.num_receivers));
  w.put(g.ring_radius);
  w.put<std::uint8_t>(g.illumination == Illumination::PlaneWave ? 1 : 0);
  w.put<std::uint64_t>(model.seed);
  w.put(model.input_snr_db);
  w.put(model.achieved_snr_db);
  w.put(model.lipschitz());
  w.put<std::uint8_t>(model.truth ? 1 : 0);

  if (model.kind == ModelKind::DiffractionTomography) {
    const auto* first = dynamic_cast<const ScaledColumnsOperator*>(model.component(0).op.get());
    if (!first) throw ConfigError("serialize: DT model components must be S * diag(u)");
    const ComplexMat& s = first->left();
    for (Eigen::Index r = 0; r < s.rows(); ++r)
      for (Eigen::Index c = 0; c < s.cols(); ++c) w.put_c64(s(r, c));
    for (const auto& comp : model.components()) {
      const auto* op = dynamic_cast<const ScaledColumnsOperator*>(comp.op.get());
      if (!op || op->left_ptr() != first->left_ptr())
        throw ConfigError("serialize: DT components must share one scattering matrix");
      for (Eigen::Index j = 0; j < op->column_scale().size(); ++j) w.put_c64(op->column_scale()[j]);
    }
  } else {
    for (const auto& comp : model.components()) {
      const auto* op = dynamic_cast<const DenseOperator*>(comp.op.get());
      if (!op) throw ConfigError("serialize: dense model components must be DenseOperator");
      const ComplexMat& h = op->matrix();
      for (Eigen::Index r = 0; r < h.rows(); ++r)
        for (Eigen::Index c = 0; c < h.cols(); ++c) w.put_c64(h(r, c));
    }
  }
  for (const auto& comp : model.components())
    for (Eigen::Index k = 0; k < comp.y.size(); ++k) w.put_c64(comp.y[k]);
  if (model.truth)
    for (Eigen::Index j = 0; j < model.truth->pixels.size(); ++j) w.put(model.truth->pixels[j]);
  return w.take();
}

MeasurementModel deserialize_measurements(const std::string& bytes) {
  Reader r(bytes);
  r.expect_magic();
  const auto kind_raw = r.get<std::uint8_t>();
  if (kind_raw != 1 && kind_raw != 2)
    throw IoError("measurement container: unknown model kind " + std::to_string(kind_raw));
  const auto kind = static_cast<ModelKind>(kind_raw);
  const auto n = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const auto m = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const auto count = static_cast<std::size_t>(r.get<std::uint64_t>());
  const int width = static_cast<int>(r.get<std::uint32_t>());
  const int height = static_cast<int>(r.get<std::uint32_t>());
  if (n <= 0 || m <= 0 || count == 0 || static_cast<Eigen::Index>(width) * height != n)
    throw IoError("measurement container: inconsistent dimensions in header");
  DtGeometry g;
  g.domain_side = r.get<double>();
  g.grid = static_cast<int>(r.get<std::uint32_t>());
  g.wavelength = r.get<double>();
  g.eps_background = r.get<double>();
  g.num_transmitters = static_cast<int>(r.get<std::uint32_t>());
  g.num_receivers = static_cast<int>(r.get<std::uint32_t>());
  g.ring_radius = r.get<double>();
  g.illumination = r.get<std::uint8_t>() == 1 ? Illumination::PlaneWave : Illumination::PointSource;
  const auto seed = r.get<std::uint64_t>();
  const double input_snr = r.get<double>();
  const double achieved_snr = r.get<double>();
  const double lipschitz = r.get<double>();
  const bool has_truth = r.get<std::uint8_t>() != 0;

  std::vector<OperatorPtr> ops;
  if (kind == ModelKind::DiffractionTomography) {
    auto s = std::make_shared<ComplexMat>(m, n);
    for (Eigen::Index row = 0; row < m; ++row)
      for (Eigen::Index c = 0; c < n; ++c) (*s)(row, c) = r.get_c64();
    std::shared_ptr<const ComplexMat> shared_s = s;
    for (std::size_t i = 0; i < count; ++i) {
      ComplexVec u(n);
      for (Eigen::Index j = 0; j < n; ++j) u[j] = r.get_c64();
      ops.push_back(std::make_shared<ScaledColumnsOperator>(shared_s, std::move(u)));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      ComplexMat h(m, n);
      for (Eigen::Index row = 0; row < m; ++row)
        for (Eigen::Index c = 0; c < n; ++c) h(row, c) = r.get_c64();
      ops.push_back(std::make_shared<DenseOperator>(std::move(h)));
    }
  }
  std::vector<MeasurementComponent> comps;
  for (std::size_t i = 0; i < count; ++i) {
    ComplexVec y(m);
    for (Eigen::Index k = 0; k < m; ++k) y[k] = r.get_c64();
    comps.push_back({ops[i], std::move(y)});
  }
  std::optional<Image> truth;
  if (has_truth) {
    RealVec px(n);
    for (Eigen::Index j = 0; j < n; ++j) px[j] = r.get<double>();
    truth = Image(std::move(px), width, height,
                  kind == ModelKind::DiffractionTomography ? g.domain_side : 0.0);
  }
  if (!r.at_end())
    throw IoError("measurement container: trailing bytes after offset " + std::to_string(r.pos()));

  MeasurementModel model(std::move(comps), lipschitz);
  model.kind = kind;
  if (kind == ModelKind::DiffractionTomography) model.geometry = g;
  model.seed = seed;
  model.input_snr_db = input_snr;
  model.achieved_snr_db = achieved_snr;
  model.width = width;
  model.height = height;
  model.truth = std::move(truth);
  return model;
}

void save_measurements(const std::filesystem::path& path, const MeasurementModel& model) {
  const std::string bytes = serialize_measurements(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

MeasurementModel load_measurements(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_measurements(ss.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace pnp
