#include "ngkl/distributions.hpp"

#include <cmath>
#include <string>

namespace ngkl {

namespace {

void check_length(const Vector& x, Eigen::Index k, const char* fn) {
  if (x.size() != k) {
    throw DimensionError(std::string(fn) + ": vector length " + std::to_string(x.size()) +
                         " does not match dimension " + std::to_string(k));
  }
}

// (x − μ)ᵀ·L·Lᵀ·(x − μ) without temporaries.
double centred_quadratic(const Vector& x, const Vector& mean, const Matrix& lower) {
  const Eigen::Index k = x.size();
  double q = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) {
    double s = 0.0;
    for (Eigen::Index i = j; i < k; ++i) s += lower(i, j) * (x[i] - mean[i]);
    q += s * s;
  }
  return q;
}

// Solves Lᵀ·w = z in place.
void back_substitute_transpose(const Matrix& lower, Vector& z) {
  const Eigen::Index k = z.size();
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    double s = z[i];
    for (Eigen::Index j = i + 1; j < k; ++j) s -= lower(j, i) * z[j];
    z[i] = s / lower(i, i);
  }
}

}  // namespace

GammaParams::GammaParams(double shape, double rate) : shape_(shape), rate_(rate) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw ParameterError("gamma shape must be positive and finite, got " + std::to_string(shape));
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ParameterError("gamma rate must be positive and finite, got " + std::to_string(rate));
  }
}

MvNormalParams::MvNormalParams(Vector mean, SpdMatrix precision)
    : mean_(std::move(mean)), precision_(std::move(precision)) {
  check_length(mean_, precision_.dim(), "MvNormalParams");
  if (!mean_.allFinite()) throw ParameterError("MvNormalParams: non-finite mean");
}

MvNormalParams MvNormalParams::from_covariance(Vector mean, const Matrix& covariance) {
  const SpdMatrix cov(covariance);
  Matrix precision = cov.inverse();
  precision = 0.5 * (precision + precision.transpose());
  return MvNormalParams(std::move(mean), SpdMatrix(std::move(precision)));
}

NormalGammaParams::NormalGammaParams(Vector mu, SpdMatrix lambda, double shape, double rate)
    : mu_(std::move(mu)), lambda_(std::move(lambda)), gamma_(shape, rate) {
  check_length(mu_, lambda_.dim(), "NormalGammaParams");
  if (!mu_.allFinite()) throw ParameterError("NormalGammaParams: non-finite mu");
}

MvNormalParams NormalGammaParams::conditional(double y) const {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw DomainError("NormalGammaParams::conditional: y must be positive, got " +
                      std::to_string(y));
  }
  return MvNormalParams(mu_, lambda_.scaled(y));
}

double logpdf_mvn(const Vector& x, const MvNormalParams& params) {
  check_length(x, params.dim(), "logpdf_mvn");
  const double k = static_cast<double>(params.dim());
  const double q = centred_quadratic(x, params.mean(), params.precision().factor());
  return 0.5 * params.precision().logdet() - 0.5 * k * kLn2Pi - 0.5 * q;
}

double logpdf_gamma(double y, const GammaParams& params) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw DomainError("logpdf_gamma: y must be positive and finite, got " + std::to_string(y));
  }
  const double a = params.shape();
  const double b = params.rate();
  return a * std::log(b) - log_gamma(a) + (a - 1.0) * std::log(y) - b * y;
}

double logpdf_ng(const Vector& x, double y, const NormalGammaParams& params) {
  check_length(x, params.dim(), "logpdf_ng");
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw DomainError("logpdf_ng: y must be positive and finite, got " + std::to_string(y));
  }
  const double k = static_cast<double>(params.dim());
  const double q = y * centred_quadratic(x, params.mu(), params.lambda().factor());
  const double logdet = params.lambda().logdet() + k * std::log(y);
  return (0.5 * logdet - 0.5 * k * kLn2Pi - 0.5 * q) + logpdf_gamma(y, params.gamma());
}

double sample_gamma(const GammaParams& params, RngStream& rng) {
  double a = params.shape();
  double boost = 1.0;
  if (a < 1.0) {
    boost = std::pow(rng.uniform(), 1.0 / a);
    a += 1.0;
  }
  const double d = a - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z, v;
    do {
      z = rng.normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double z2 = z * z;
    if (u < 1.0 - 0.0331 * z2 * z2 || std::log(u) < 0.5 * z2 + d * (1.0 - v + std::log(v))) {
      return boost * d * v / params.rate();
    }
  }
}

void sample_mvn(const MvNormalParams& params, RngStream& rng, Vector& out) {
  const Eigen::Index k = params.dim();
  out.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) out[i] = rng.normal();
  back_substitute_transpose(params.precision().factor(), out);
  out += params.mean();
}

Vector sample_mvn(const MvNormalParams& params, RngStream& rng) {
  Vector out;
  sample_mvn(params, rng, out);
  return out;
}

void sample_ng(const NormalGammaParams& params, RngStream& rng, NgSample& out) {
  out.y = sample_gamma(params.gamma(), rng);
  const Eigen::Index k = params.dim();
  out.x.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) out.x[i] = rng.normal();
  back_substitute_transpose(params.lambda().factor(), out.x);
  out.x = params.mu() + out.x / std::sqrt(out.y);
}

NgSample sample_ng(const NormalGammaParams& params, RngStream& rng) {
  NgSample out;
  sample_ng(params, rng, out);
  return out;
}

}  // namespace ngkl
