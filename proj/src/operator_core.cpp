#include "pnp/operator_core.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace pnp {

ComplexVec DenseOperator::apply(const ComplexVec& x) const {
  if (static_cast<std::size_t>(x.size()) != input_dim())
    throw ConfigError("DenseOperator::apply: dimension mismatch");
  return matrix_ * x;
}

ComplexVec DenseOperator::adjoint_apply(const ComplexVec& y) const {
  if (static_cast<std::size_t>(y.size()) != output_dim())
    throw ConfigError("DenseOperator::adjoint_apply: dimension mismatch");
  return matrix_.adjoint() * y;
}

ScaledColumnsOperator::ScaledColumnsOperator(std::shared_ptr<const ComplexMat> left,
                                             ComplexVec column_scale)
    : left_(std::move(left)), scale_(std::move(column_scale)) {
  if (!left_ || left_->cols() != scale_.size())
    throw ConfigError("ScaledColumnsOperator: scale length must equal column count");
}

ComplexVec ScaledColumnsOperator::apply(const ComplexVec& x) const {
  if (x.size() != scale_.size())
    throw ConfigError("ScaledColumnsOperator::apply: dimension mismatch");
  return (*left_) * scale_.cwiseProduct(x);
}

ComplexVec ScaledColumnsOperator::adjoint_apply(const ComplexVec& y) const {
  if (y.size() != left_->rows())
    throw ConfigError("ScaledColumnsOperator::adjoint_apply: dimension mismatch");
  return scale_.conjugate().cwiseProduct(left_->adjoint() * y);
}

ComplexVec IdentityOperator::apply(const ComplexVec& x) const {
  if (static_cast<std::size_t>(x.size()) != n_) throw ConfigError("IdentityOperator: dimension mismatch");
  return x;
}

ComplexVec IdentityOperator::adjoint_apply(const ComplexVec& y) const { return apply(y); }

ComplexVec ZeroOperator::apply(const ComplexVec& x) const {
  if (static_cast<std::size_t>(x.size()) != n_) throw ConfigError("ZeroOperator: dimension mismatch");
  return ComplexVec::Zero(static_cast<Eigen::Index>(m_));
}

ComplexVec ZeroOperator::adjoint_apply(const ComplexVec& y) const {
  if (static_cast<std::size_t>(y.size()) != m_) throw ConfigError("ZeroOperator: dimension mismatch");
  return ComplexVec::Zero(static_cast<Eigen::Index>(n_));
}

ComplexMat materialize(const LinearOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.input_dim());
  const auto m = static_cast<Eigen::Index>(op.output_dim());
  ComplexMat out(m, n);
  ComplexVec e = ComplexVec::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    out.col(j) = op.apply(e);
    e[j] = 0.0;
  }
  return out;
}

SpectralEstimate power_iteration_lipschitz(const LinearOperator& op, double tol, int max_iter,
                                           std::uint64_t seed) {
  if (op.input_dim() == 0 || op.output_dim() == 0)
    throw ConfigError("power_iteration_lipschitz: operator dimensions must be positive");
  if (!(tol > 0.0) || max_iter < 1)
    throw ConfigError("power_iteration_lipschitz: tol must be > 0 and max_iter >= 1");

  const auto n = static_cast<Eigen::Index>(op.input_dim());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ComplexVec v(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double re = uni(rng);
    const double im = uni(rng);
    v[j] = cplx(re, im);
  }
  v /= v.norm();

  SpectralEstimate est;
  double previous = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const ComplexVec hv = op.apply(v);
    const double rayleigh = hv.squaredNorm();
    const ComplexVec w = op.adjoint_apply(hv);
    const double wnorm = w.norm();
    est.iterations_used = it;
    est.value = rayleigh;
    if (wnorm == 0.0) {
      est.value = 0.0;
      est.residual = 0.0;
      return est;
    }
    est.residual = (w - rayleigh * v).norm();
    v = w / wnorm;
    if (it > 1 && std::abs(rayleigh - previous) <= tol * rayleigh) break;
    previous = rayleigh;
  }
  return est;
}

CgResult cg_solve(const SymmetricMap& spd, const RealVec& rhs, double tol, int max_iter) {
  const auto n = rhs.size();
  if (max_iter <= 0) max_iter = static_cast<int>(10 * std::max<Eigen::Index>(n, 1));

  CgResult res;
  res.solution = RealVec::Zero(n);
  const double rhs_norm = rhs.norm();
  res.residual_history.push_back(rhs_norm);
  if (rhs_norm == 0.0) {
    res.converged = true;
    return res;
  }

  RealVec z = RealVec::Zero(n);
  RealVec r = rhs;
  RealVec p = r;
  double rr = r.squaredNorm();
  double best = std::sqrt(rr);
  const double target = tol * rhs_norm;

  for (int k = 1; k <= max_iter; ++k) {
    const RealVec ap = spd(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;  // loss of positive definiteness in finite precision
    const double step = rr / pap;
    z += step * p;
    r -= step * ap;
    const double rr_next = r.squaredNorm();
    const double rnorm = std::sqrt(rr_next);
    res.iterations = k;
    res.residual_history.push_back(rnorm);
    if (rnorm < best) {
      best = rnorm;
      res.solution = z;
    }
    if (rnorm <= target) {
      res.converged = true;
      break;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  res.residual_norm = best;
  return res;
}

CgResult cg_solve_regularized(const LinearOperator& op, double gamma, const RealVec& rhs,
                              double tol, int max_iter) {
  if (!(gamma > 0.0)) throw ConfigError("cg_solve_regularized: gamma must be positive");
  if (static_cast<std::size_t>(rhs.size()) != op.input_dim())
    throw ConfigError("cg_solve_regularized: rhs length must equal operator input_dim");
  const SymmetricMap normal = [&](const RealVec& z) -> RealVec {
    return z + gamma * op.adjoint_real(op.apply_real(z));
  };
  return cg_solve(normal, rhs, tol, max_iter);
}

}  // namespace pnp
