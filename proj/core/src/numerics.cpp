#include "ngkl/numerics.hpp"

#include <array>
#include <cmath>
#include <string>

namespace ngkl {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

void require_positive_finite(double x, const char* fn) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(fn) + ": argument must be positive and finite, got " +
                      std::to_string(x));
  }
}

double lanczos_log_gamma(double z) {
  const double x = z - 1.0;
  double series = kLanczosCoefficients[0];
  for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
    series += kLanczosCoefficients[i] / (x + static_cast<double>(i));
  }
  const double t = x + kLanczosG + 0.5;
  return 0.5 * kLn2Pi + (x + 0.5) * std::log(t) - t + std::log(series);
}

}  // namespace

double log_gamma(double x) {
  require_positive_finite(x, "log_gamma");
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x < 0.5) return lanczos_log_gamma(x + 1.0) - std::log(x);
  return lanczos_log_gamma(x);
}

double digamma(double x) {
  require_positive_finite(x, "digamma");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  // Bernoulli-number series: B_2k / (2k x^2k) for k = 1..7.
  const double r = 1.0 / (x * x);
  const double tail =
      r * (1.0 / 12.0 -
           r * (1.0 / 120.0 -
                r * (1.0 / 252.0 -
                     r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * (691.0 / 32760.0 - r / 12.0))))));
  return shift + std::log(x) - 0.5 / x - tail;
}

Matrix cholesky_lower(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("cholesky: matrix is " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + ", expected square");
  }
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (!(pivot > 0.0) || !std::isfinite(pivot)) {
      throw FactorizationError(static_cast<std::size_t>(j), pivot);
    }
    const double ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

SpdMatrix::SpdMatrix(Matrix a) : matrix_(std::move(a)), logdet_(0.0) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw DimensionError("SpdMatrix: expected a non-empty square matrix, got " +
                         std::to_string(matrix_.rows()) + "x" + std::to_string(matrix_.cols()));
  }
  if (!matrix_.allFinite()) throw ParameterError("SpdMatrix: non-finite entry");
  const double scale = matrix_.cwiseAbs().maxCoeff();
  const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    throw ParameterError("SpdMatrix: matrix is not symmetric (max |A - Aᵀ| = " +
                         std::to_string(asym) + ")");
  }
  factor_ = cholesky_lower(matrix_);
  logdet_ = 2.0 * factor_.diagonal().array().log().sum();
}

SpdMatrix SpdMatrix::identity(Eigen::Index n) {
  return SpdMatrix(Matrix::Identity(n, n), Matrix::Identity(n, n), 0.0);
}

SpdMatrix SpdMatrix::diagonal(const Vector& d) { return SpdMatrix(Matrix(d.asDiagonal())); }

Matrix SpdMatrix::solve(const Matrix& b) const {
  if (b.rows() != dim()) {
    throw DimensionError("spd_solve: right-hand side has " + std::to_string(b.rows()) +
                         " rows, expected " + std::to_string(dim()));
  }
  const auto l = factor_.triangularView<Eigen::Lower>();
  Matrix x = l.solve(b);
  l.transpose().solveInPlace(x);
  return x;
}

Vector SpdMatrix::solve(const Vector& b) const {
  const Matrix rhs = b;
  return solve(rhs).col(0);
}

Matrix SpdMatrix::inverse() const {
  const Matrix eye = Matrix::Identity(dim(), dim());
  return solve(eye);
}

SpdMatrix SpdMatrix::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw DomainError("SpdMatrix::scaled: factor must be positive and finite");
  }
  return SpdMatrix(matrix_ * s, factor_ * std::sqrt(s),
                   logdet_ + static_cast<double>(dim()) * std::log(s));
}

double SpdMatrix::quadratic_form(const Vector& x) const {
  if (x.size() != dim()) {
    throw DimensionError("quadratic_form: vector length " + std::to_string(x.size()) +
                         " does not match dimension " + std::to_string(dim()));
  }
  return (factor_.transpose().triangularView<Eigen::Upper>() * x).squaredNorm();
}

Matrix cholesky(const SpdMatrix& a) { return a.factor(); }

double logdet_spd(const SpdMatrix& a) { return a.logdet(); }

Matrix spd_solve(const SpdMatrix& a, const Matrix& b) { return a.solve(b); }

}  // namespace ngkl
