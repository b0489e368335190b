#include "pnp/denoisers.hpp"

#include <cmath>

namespace pnp {
namespace {

// Per-pixel forward differences with Neumann boundary: gx(r,c) = x(r,c+1) - x(r,c)
// for c < w-1, gy(r,c) = x(r+1,c) - x(r,c) for r < h-1, zero on the far edge.
void forward_diff(const RealVec& x, int w, int h, RealVec& gx, RealVec& gy) {
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Eigen::Index i = static_cast<Eigen::Index>(r) * w + c;
      gx[i] = c + 1 < w ? x[i + 1] - x[i] : 0.0;
      gy[i] = r + 1 < h ? x[i + w] - x[i] : 0.0;
    }
  }
}

// D^T applied to (gx, gy).
void diff_adjoint(const RealVec& gx, const RealVec& gy, int w, int h, RealVec& out) {
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const Eigen::Index i = static_cast<Eigen::Index>(r) * w + c;
      double v = 0.0;
      if (c + 1 < w) v -= gx[i];
      if (c > 0) v += gx[i - 1];
      if (r + 1 < h) v -= gy[i];
      if (r > 0) v += gy[i - w];
      out[i] = v;
    }
  }
}

void project_dual(RealVec& px, RealVec& py, TvVariant variant) {
  if (variant == TvVariant::Anisotropic) {
    px = px.cwiseMax(-1.0).cwiseMin(1.0);
    py = py.cwiseMax(-1.0).cwiseMin(1.0);
    return;
  }
  for (Eigen::Index i = 0; i < px.size(); ++i) {
    const double norm = std::hypot(px[i], py[i]);
    if (norm > 1.0) {
      px[i] /= norm;
      py[i] /= norm;
    }
  }
}

double tv_norm(const RealVec& gx, const RealVec& gy, TvVariant variant) {
  if (variant == TvVariant::Anisotropic) return gx.lpNorm<1>() + gy.lpNorm<1>();
  double s = 0.0;
  for (Eigen::Index i = 0; i < gx.size(); ++i) s += std::hypot(gx[i], gy[i]);
  return s;
}

// mu * (TV(x) - <Dx, w>) for feasible w: the primal-dual gap of the prox problem
// at x = z - mu D^T w.
double duality_gap(const RealVec& gx, const RealVec& gy, const RealVec& px, const RealVec& py,
                   double mu, TvVariant variant) {
  double s = 0.0;
  if (variant == TvVariant::Anisotropic) {
    for (Eigen::Index i = 0; i < gx.size(); ++i)
      s += (std::abs(gx[i]) - gx[i] * px[i]) + (std::abs(gy[i]) - gy[i] * py[i]);
  } else {
    for (Eigen::Index i = 0; i < gx.size(); ++i)
      s += std::hypot(gx[i], gy[i]) - (gx[i] * px[i] + gy[i] * py[i]);
  }
  return mu * s;
}

}  // namespace

RealVec tv_gradient(const RealVec& x, int width, int height) {
  const Eigen::Index n = static_cast<Eigen::Index>(width) * height;
  if (x.size() != n) throw ConfigError("tv_gradient: size mismatch");
  RealVec gx(n), gy(n);
  forward_diff(x, width, height, gx, gy);
  RealVec out(2 * n);
  out << gx, gy;
  return out;
}

RealVec tv_gradient_adjoint(const RealVec& g, int width, int height) {
  const Eigen::Index n = static_cast<Eigen::Index>(width) * height;
  if (g.size() != 2 * n) throw ConfigError("tv_gradient_adjoint: size mismatch");
  RealVec out(n);
  diff_adjoint(g.head(n), g.tail(n), width, height, out);
  return out;
}

double tv_value(const Image& x, double lambda, TvVariant variant) {
  const Eigen::Index n = x.pixels.size();
  RealVec gx(n), gy(n);
  forward_diff(x.pixels, x.width, x.height, gx, gy);
  return lambda * tv_norm(gx, gy, variant);
}

TvProxResult tv_prox_detailed(const Image& z, double lambda_scaled, const TvProxOptions& options) {
  TvProxResult res{z, 0.0, 0};
  if (lambda_scaled < 0.0) throw ConfigError("tv_prox: lambda_scaled must be nonnegative");
  if (lambda_scaled == 0.0) return res;

  const int w = z.width;
  const int h = z.height;
  const Eigen::Index n = z.pixels.size();
  const double mu = lambda_scaled;
  const double step = 1.0 / (8.0 * mu);  // ||D||^2 <= 8 in 2D

  RealVec px = RealVec::Zero(n), py = RealVec::Zero(n);    // feasible dual iterate
  RealVec qx = px, qy = py;                                // extrapolated point
  RealVec px_prev(n), py_prev(n);
  RealVec x(n), gx(n), gy(n), div(n);
  double t = 1.0;

  auto primal_from = [&](const RealVec& ax, const RealVec& ay, RealVec& out) {
    diff_adjoint(ax, ay, w, h, div);
    out = z.pixels - mu * div;
  };

  double gap = 0.0;
  int it = 0;
  for (it = 1; it <= options.inner_iters; ++it) {
    primal_from(qx, qy, x);
    forward_diff(x, w, h, gx, gy);
    px_prev = px;
    py_prev = py;
    px = qx + step * gx;
    py = qy + step * gy;
    project_dual(px, py, options.variant);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    qx = px + beta * (px - px_prev);
    qy = py + beta * (py - py_prev);
    t = t_next;

    if (it % 10 == 0 || it == options.inner_iters) {
      primal_from(px, py, x);
      forward_diff(x, w, h, gx, gy);
      gap = duality_gap(gx, gy, px, py, mu, options.variant);
      if (gap <= options.inner_tol) break;
    }
  }
  primal_from(px, py, x);
  forward_diff(x, w, h, gx, gy);
  res.duality_gap = duality_gap(gx, gy, px, py, mu, options.variant);
  res.iterations = std::min(it, options.inner_iters);
  res.image.pixels = x;
  return res;
}

Image tv_prox(const Image& z, double lambda_scaled, int inner_iters, double inner_tol) {
  TvProxOptions opt;
  opt.inner_iters = inner_iters;
  opt.inner_tol = inner_tol;
  return tv_prox_detailed(z, lambda_scaled, opt).image;
}

TvDenoiser::TvDenoiser(int width, int height, TvProxOptions options)
    : width_(width), height_(height), options_(options) {
  if (width <= 0 || height <= 0) throw ConfigError("TvDenoiser: grid must be positive");
}

RealVec TvDenoiser::denoise(const RealVec& z, double sigma) const {
  if (z.size() != static_cast<Eigen::Index>(width_) * height_)
    throw ConfigError("TvDenoiser: input size does not match grid");
  const Image img(z, width_, height_);
  return tv_prox_detailed(img, sigma * sigma, options_).image.pixels;
}

}  // namespace pnp
