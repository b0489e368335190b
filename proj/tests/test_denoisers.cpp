#include <doctest.h>

#include "pnp/denoisers.hpp"
#include "pnp/phantom.hpp"

#include <cmath>

using namespace pnp;

namespace {

RealVec random_vec(Eigen::Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  RealVec v(n);
  for (auto& e : v) e = u(rng);
  return v;
}

double prox_objective(const RealVec& x, const Image& z, double mu) {
  return 0.5 * (x - z.pixels).squaredNorm() + tv_value(Image(x, z.width, z.height), mu);
}

class Reflection final : public Denoiser {
public:
  RealVec denoise(const RealVec& z, double) const override { return -z; }
  DenoiserKind kind() const override { return DenoiserKind::Custom; }
};

// 2W - I on real and imaginary parts, for the spectral-norm oracle.
class ReflectedFilter final : public LinearOperator {
public:
  ReflectedFilter(int w, int h, double sigma) : w_(w), h_(h), sigma_(sigma) {}
  std::size_t input_dim() const override { return static_cast<std::size_t>(w_ * h_); }
  std::size_t output_dim() const override { return input_dim(); }
  ComplexVec apply(const ComplexVec& x) const override {
    auto f = [&](const RealVec& v) -> RealVec { return 2.0 * averaged_linear_filter(v, w_, h_, sigma_) - v; };
    const RealVec re = f(x.real()), im = f(x.imag());
    ComplexVec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out[i] = cplx(re[i], im[i]);
    return out;
  }
  ComplexVec adjoint_apply(const ComplexVec& y) const override { return apply(y); }

private:
  int w_, h_;
  double sigma_;
};

}  // namespace

TEST_CASE("tv prox leaves constant images unchanged") {
  const Image z(RealVec::Constant(64, 0.37), 8, 8);
  for (auto variant : {TvVariant::Anisotropic, TvVariant::Isotropic}) {
    TvProxOptions opt;
    opt.variant = variant;
    const auto r = tv_prox_detailed(z, 0.5, opt);
    CHECK((r.image.pixels - z.pixels).lpNorm<Eigen::Infinity>() <= 1e-14);
  }
  CHECK(tv_prox(z, 0.0, 10, 1e-9).pixels == z.pixels);
  CHECK_THROWS_AS(tv_prox(z, -1.0, 10, 1e-9), ConfigError);
}

TEST_CASE("tv prox two-pixel closed form, confirmed by grid search") {
  const double lambda = 0.3;
  for (auto [a, b] : std::vector<std::pair<double, double>>{{1.0, 0.2}, {0.1, 0.3}, {-0.5, 0.9}, {0.4, 0.4}}) {
    RealVec zv(2);
    zv << a, b;
    const Image z(zv, 2, 1);
    const double d = a - b;
    const double s = (d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0)) * std::min(lambda, std::abs(d) / 2);
    const Image x = tv_prox(z, lambda, 20000, 1e-15);
    CHECK(x.pixels[0] == doctest::Approx(a - s).epsilon(1e-9));
    CHECK(x.pixels[1] == doctest::Approx(b + s).epsilon(1e-9));

    // brute-force grid search of the two-variable objective
    double best = INFINITY, bx = 0, by = 0;
    const double step = 1e-3;
    for (double u = a - 1.0; u <= a + 1.0; u += step)
      for (double v = b - 1.0; v <= b + 1.0; v += step) {
        const double f = 0.5 * ((u - a) * (u - a) + (v - b) * (v - b)) + lambda * std::abs(u - v);
        if (f < best) {
          best = f;
          bx = u;
          by = v;
        }
      }
    CHECK(std::abs(bx - (a - s)) <= 2 * step);
    CHECK(std::abs(by - (b + s)) <= 2 * step);
  }
}

TEST_CASE("tv prox objective matches a long-run oracle") {
  const Image z(random_vec(64, 5, 0.0, 1.0), 8, 8);
  const double mu = 0.1;
  TvProxOptions oracle_opt;
  oracle_opt.inner_iters = 100000;
  oracle_opt.inner_tol = 0.0;  // run all iterations
  const auto oracle = tv_prox_detailed(z, mu, oracle_opt);
  const auto fast = tv_prox_detailed(z, mu);
  CHECK(fast.duality_gap <= 1e-11);
  CHECK(std::abs(prox_objective(fast.image.pixels, z, mu) - prox_objective(oracle.image.pixels, z, mu)) <= 1e-8);
  // strong convexity: ||x - x*||^2 <= 2 gap
  CHECK((fast.image.pixels - oracle.image.pixels).squaredNorm() <= 2.0 * (fast.duality_gap + oracle.duality_gap) + 1e-20);
}

TEST_CASE("tv gradient adjoint") {
  const RealVec x = random_vec(35, 2);
  const RealVec g = random_vec(70, 3);
  CHECK(tv_gradient(x, 7, 5).dot(g) == doctest::Approx(x.dot(tv_gradient_adjoint(g, 7, 5))).epsilon(1e-12));
  CHECK(tv_value(Image(x, 7, 5), 2.0) == doctest::Approx(2.0 * tv_gradient(x, 7, 5).lpNorm<1>()));
}

TEST_CASE("averaged filter basics") {
  const RealVec c = RealVec::Constant(256, 0.8);
  CHECK((averaged_linear_filter(c, 16, 16, 1.5) - c).lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK(averaged_linear_filter(RealVec::Zero(256), 16, 16, 1.5) == RealVec::Zero(256));
  const RealVec x = random_vec(256, 7), y = random_vec(256, 8);
  CHECK(averaged_linear_filter(x, 16, 16, 1.0).dot(y) ==
        doctest::Approx(x.dot(averaged_linear_filter(y, 16, 16, 1.0))).epsilon(1e-12));
  CHECK_THROWS_AS(averaged_linear_filter(x, 16, 16, 0.0), ConfigError);
  CHECK_THROWS_AS(averaged_linear_filter(x, 8, 16, 1.0), ConfigError);
}

TEST_CASE("2W - I is nonexpansive by power iteration") {
  for (double sigma : {0.5, 1.0, 3.0}) {
    const auto est = power_iteration_lipschitz(ReflectedFilter(16, 16, sigma), 1e-12, 20000, 4);
    CHECK(std::sqrt(est.value) <= 1.0 + 1e-12);
  }
}

TEST_CASE("damping wrapper") {
  const auto id = std::make_shared<IdentityDenoiser>();
  const RealVec z = random_vec(10, 1);
  CHECK(damp(id, 0.5)->denoise(z, 1.0) == z);
  const auto refl = std::make_shared<Reflection>();
  CHECK(damp(refl, 0.5)->denoise(z, 1.0).norm() == 0.0);
  CHECK(damp(refl, 0.3)->declared_theta() == 0.3);
  CHECK_THROWS_AS(damp(refl, 0.0), ConfigError);
  CHECK_THROWS_AS(damp(refl, 1.0), ConfigError);
  CHECK_THROWS_AS(damp(nullptr, 0.5), ConfigError);
  for (double theta : {0.2, 0.5, 0.8}) {
    const auto cert = certify_averaged(*damp(refl, theta), 12, theta, 1.0, 200, 2.0, 3);
    CHECK(cert.passed);
  }
}

TEST_CASE("shift denoiser") {
  CHECK(shift_denoiser(0.0, 1.0, 1.0) == 0.0);
  CHECK(shift_denoiser(1.0, 0.5, 4.0) == 2.0);
  CHECK(shift_denoiser(-1.0, 0.5, 4.0) == -2.0);
  const ShiftDenoiser d(1.0);
  CHECK_FALSE(d.declared_theta().has_value());
  CHECK_THROWS_AS(ShiftDenoiser(0.0), ConfigError);

  RealVec x(1), y(1);
  x << 0.1;
  y << -0.1;
  const double gap = (d.denoise(x, 1.0) - d.denoise(y, 1.0)).norm();
  CHECK(gap == doctest::Approx(2.2));
  CHECK(gap > (x - y).norm());
  std::vector<std::pair<RealVec, RealVec>> pairs{{x, y}};
  for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    const auto cert = certify_averaged_pairs(d, alpha, 1.0, pairs, 1e-9);
    CHECK_FALSE(cert.passed);
    CHECK(cert.max_violation > 0.0);
  }
}

TEST_CASE("certificates") {
  const IdentityDenoiser id;
  for (double alpha : {0.1, 0.5, 0.9}) CHECK(certify_averaged(id, 20, alpha, 1.0, 50).max_violation <= 0.0);

  const AveragedFilterDenoiser filt(16, 16);
  const auto fc = certify_averaged(filt, 256, 0.5, 1.0, 1000, 2.0, 9);
  CHECK(fc.passed);
  CHECK(fc.pairs_tested == 1000);
  CHECK(fc.max_violation <= 1e-10);

  const TvDenoiser tv(8, 8);
  const auto tc = certify_averaged(tv, 64, 0.5, 0.3, 200, 2.0, 10, 1e-9 + 1e-11);
  CHECK(tc.passed);
  CHECK(tc.passed == (tc.max_violation <= tc.tolerance));
  CHECK_THROWS_AS(certify_averaged(tv, 64, 1.0, 0.3, 10), ConfigError);
  CHECK_THROWS_AS(certify_averaged(tv, 64, 0.5, 0.3, 0), ConfigError);
}

TEST_CASE("bounded constant estimates") {
  std::vector<RealVec> samples;
  for (std::uint64_t s = 0; s < 5; ++s) samples.push_back(random_vec(64, 100 + s, 0.25, 1.0));
  const IdentityDenoiser id;
  CHECK(estimate_bounded_constant(id, 0.7, samples) == 0.0);
  CHECK(estimate_bounded_constant(ShiftDenoiser(4.0), 0.5, samples) == 4.0);
  CHECK(estimate_bounded_constant(ShiftDenoiser(1.0), 1.0, samples) == 1.0);

  PhantomSpec ps;
  ps.grid = 16;
  std::vector<RealVec> natural;
  for (std::uint64_t s = 1; s <= 3; ++s) {
    ps.seed = s;
    natural.push_back(phantom_generate(ps).pixels);
  }
  const TvDenoiser tv(16, 16);
  double prev = INFINITY;
  for (double sigma : {0.3, 0.1, 0.03, 0.01}) {
    // (1/n)||D(x) - x||^2 itself; the normalised c is finite throughout
    const double c = estimate_bounded_constant(tv, sigma, natural);
    CHECK(std::isfinite(c));
    const double raw = c * sigma * sigma;
    CHECK(raw < prev);
    prev = raw;
  }
  CHECK_THROWS_AS(estimate_bounded_constant(id, 1.0, std::vector<RealVec>{}), ConfigError);
}

TEST_CASE("denoisers return finite output of the input length") {
  const RealVec z = random_vec(64, 12, -3.0, 3.0);
  const std::vector<DenoiserPtr> all{std::make_shared<TvDenoiser>(8, 8), std::make_shared<AveragedFilterDenoiser>(8, 8),
                                     std::make_shared<ShiftDenoiser>(2.0), std::make_shared<IdentityDenoiser>(),
                                     damp(std::make_shared<TvDenoiser>(8, 8), 0.4)};
  for (const auto& d : all) {
    const RealVec once = d->denoise(z, 0.5);
    CHECK(once.size() == z.size());
    CHECK(once.allFinite());
    CHECK(d->denoise(once, 0.5).allFinite());
  }
  CHECK(to_string(DenoiserKind::ProximalTV) == "tv");
  CHECK(all[0]->declared_theta() == 0.5);
  CHECK(all[1]->declared_theta() == 0.5);
}
