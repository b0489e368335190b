#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnp {

using RealVec = Eigen::VectorXd;
using ComplexVec = Eigen::VectorXcd;
using ComplexMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

/// Raised for invalid parameters, dimension mismatches and malformed configs.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a file cannot be read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/*
 * Linear map from R^n (embedded in C^n) to C^m. Real images interact with
 * complex data through the real part of the Hermitian inner product, which
 * identifies C^m with R^{2m}.
 */
class LinearOperator {
public:
  virtual ~LinearOperator() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;

  virtual ComplexVec apply(const ComplexVec& x) const = 0;
  virtual ComplexVec adjoint_apply(const ComplexVec& y) const = 0;

  ComplexVec apply_real(const RealVec& x) const { return apply(x.cast<cplx>()); }

  /// Re(H^H y), the adjoint as seen from a real input space.
  RealVec adjoint_real(const ComplexVec& y) const { return adjoint_apply(y).real(); }
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

class DenseOperator final : public LinearOperator {
public:
  explicit DenseOperator(ComplexMat matrix) : matrix_(std::move(matrix)) {}

  std::size_t input_dim() const override { return static_cast<std::size_t>(matrix_.cols()); }
  std::size_t output_dim() const override { return static_cast<std::size_t>(matrix_.rows()); }
  ComplexVec apply(const ComplexVec& x) const override;
  ComplexVec adjoint_apply(const ComplexVec& y) const override;

  const ComplexMat& matrix() const { return matrix_; }

private:
  ComplexMat matrix_;
};

/// H = S * diag(u): a shared left factor with a per-instance column scaling.
class ScaledColumnsOperator final : public LinearOperator {
public:
  ScaledColumnsOperator(std::shared_ptr<const ComplexMat> left, ComplexVec column_scale);

  std::size_t input_dim() const override { return static_cast<std::size_t>(left_->cols()); }
  std::size_t output_dim() const override { return static_cast<std::size_t>(left_->rows()); }
  ComplexVec apply(const ComplexVec& x) const override;
  ComplexVec adjoint_apply(const ComplexVec& y) const override;

  const ComplexMat& left() const { return *left_; }
  const std::shared_ptr<const ComplexMat>& left_ptr() const { return left_; }
  const ComplexVec& column_scale() const { return scale_; }

private:
  std::shared_ptr<const ComplexMat> left_;
  ComplexVec scale_;
};

class IdentityOperator final : public LinearOperator {
public:
  explicit IdentityOperator(std::size_t n) : n_(n) {}
  std::size_t input_dim() const override { return n_; }
  std::size_t output_dim() const override { return n_; }
  ComplexVec apply(const ComplexVec& x) const override;
  ComplexVec adjoint_apply(const ComplexVec& y) const override;

private:
  std::size_t n_;
};

class ZeroOperator final : public LinearOperator {
public:
  ZeroOperator(std::size_t m, std::size_t n) : m_(m), n_(n) {}
  std::size_t input_dim() const override { return n_; }
  std::size_t output_dim() const override { return m_; }
  ComplexVec apply(const ComplexVec& x) const override;
  ComplexVec adjoint_apply(const ComplexVec& y) const override;

private:
  std::size_t m_;
  std::size_t n_;
};

/// Explicit matrix of an operator, column by column. Test and oracle use only.
ComplexMat materialize(const LinearOperator& op);

struct SpectralEstimate {
  double value = 0.0;  // estimate of lambda_max(H^H H)
  int iterations_used = 0;
  double residual = 0.0;  // ||H^H H v - value v|| for the final unit vector v
};

inline constexpr double kPowerIterationTol = 1e-8;
inline constexpr int kPowerIterationMaxIter = 5000;

SpectralEstimate power_iteration_lipschitz(const LinearOperator& op,
                                           double tol = kPowerIterationTol,
                                           int max_iter = kPowerIterationMaxIter,
                                           std::uint64_t seed = 0);

struct CgResult {
  RealVec solution;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  std::vector<double> residual_history;  // ||r_k|| including the initial residual
};

using SymmetricMap = std::function<RealVec(const RealVec&)>;

inline constexpr double kCgTol = 1e-10;

/// Conjugate gradients on an SPD map, zero initial guess. Stops when
/// ||A z - rhs|| <= tol * ||rhs||. max_iter <= 0 selects 10 * n.
CgResult cg_solve(const SymmetricMap& spd, const RealVec& rhs, double tol = kCgTol,
                  int max_iter = 0);

/// Solves (I + gamma Re(H^H H)) z = rhs.
CgResult cg_solve_regularized(const LinearOperator& op, double gamma, const RealVec& rhs,
                              double tol = kCgTol, int max_iter = 0);

}  // namespace pnp
