#pragma once

#include <Eigen/Core>

#include "ngkl/errors.hpp"

namespace ngkl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kLn2Pi = 1.8378770664093454835606594728112;

/// Natural log of the gamma function for x > 0.
///
/// Lanczos approximation (g = 7, 9 terms) for x >= 0.5; smaller arguments are
/// shifted up with ln Γ(x) = ln Γ(x + 1) − ln x. Exact zeros are returned at
/// x = 1 and x = 2. Throws DomainError for x <= 0 or non-finite x.
double log_gamma(double x);

/// Digamma ψ(x) = d/dx ln Γ(x) for x > 0.
///
/// Uses ψ(x) = ψ(x + 1) − 1/x until x >= 10, then the asymptotic series in 1/x²
/// through the x^-14 term. Throws DomainError for x <= 0 or non-finite x.
double digamma(double x);

/// Lower Cholesky factor of a symmetric matrix. Only the lower triangle of `a`
/// is read. Throws FactorizationError carrying the index of the first pivot <= 0.
Matrix cholesky_lower(const Matrix& a);

/// Symmetric positive-definite matrix together with its Cholesky factor.
///
/// Construction validates squareness, symmetry (relative tolerance 1e-12 of the
/// largest entry) and positive definiteness. The factor and log-determinant are
/// computed once; instances are immutable.
class SpdMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  explicit SpdMatrix(Matrix a);

  static SpdMatrix identity(Eigen::Index n);
  static SpdMatrix diagonal(const Vector& d);

  [[nodiscard]] Eigen::Index dim() const noexcept { return matrix_.rows(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return matrix_; }
  [[nodiscard]] const Matrix& factor() const noexcept { return factor_; }
  [[nodiscard]] double logdet() const noexcept { return logdet_; }

  /// Solves A·X = B.
  [[nodiscard]] Matrix solve(const Matrix& b) const;
  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] Matrix inverse() const;

  /// s·A, reusing the existing factor (scaled by √s).
  [[nodiscard]] SpdMatrix scaled(double s) const;

  /// xᵀ·A·x evaluated as ‖Lᵀx‖².
  [[nodiscard]] double quadratic_form(const Vector& x) const;

  bool operator==(const SpdMatrix& other) const { return matrix_ == other.matrix_; }

 private:
  SpdMatrix(Matrix a, Matrix l, double logdet)
      : matrix_(std::move(a)), factor_(std::move(l)), logdet_(logdet) {}

  Matrix matrix_;
  Matrix factor_;
  double logdet_;
};

Matrix cholesky(const SpdMatrix& a);
double logdet_spd(const SpdMatrix& a);
Matrix spd_solve(const SpdMatrix& a, const Matrix& b);

}  // namespace ngkl
