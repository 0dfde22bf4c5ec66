#pragma once

#include <Eigen/Core>

#include "ngkl/numerics.hpp"
#include "ngkl/rng.hpp"

namespace ngkl {

/// Gamma distribution Gam(shape, rate) with density b^a/Γ(a) · y^(a−1) · e^(−b·y).
class GammaParams {
 public:
  GammaParams(double shape, double rate);

  [[nodiscard]] double shape() const noexcept { return shape_; }
  [[nodiscard]] double rate() const noexcept { return rate_; }
  [[nodiscard]] double mean() const noexcept { return shape_ / rate_; }

  bool operator==(const GammaParams&) const = default;

 private:
  double shape_;
  double rate_;
};

/// Multivariate normal distribution parameterized by mean and precision.
class MvNormalParams {
 public:
  MvNormalParams(Vector mean, SpdMatrix precision);

  static MvNormalParams from_covariance(Vector mean, const Matrix& covariance);

  [[nodiscard]] Eigen::Index dim() const noexcept { return mean_.size(); }
  [[nodiscard]] const Vector& mean() const noexcept { return mean_; }
  [[nodiscard]] const SpdMatrix& precision() const noexcept { return precision_; }
  [[nodiscard]] Matrix covariance() const { return precision_.inverse(); }

  bool operator==(const MvNormalParams& o) const {
    return mean_ == o.mean_ && precision_ == o.precision_;
  }

 private:
  Vector mean_;
  SpdMatrix precision_;
};

/// Normal-gamma distribution: y ~ Gam(shape, rate), x | y ~ N(mu, (y·lambda)⁻¹).
class NormalGammaParams {
 public:
  NormalGammaParams(Vector mu, SpdMatrix lambda, double shape, double rate);

  [[nodiscard]] Eigen::Index dim() const noexcept { return mu_.size(); }
  [[nodiscard]] const Vector& mu() const noexcept { return mu_; }
  [[nodiscard]] const SpdMatrix& lambda() const noexcept { return lambda_; }
  [[nodiscard]] double shape() const noexcept { return gamma_.shape(); }
  [[nodiscard]] double rate() const noexcept { return gamma_.rate(); }
  [[nodiscard]] const GammaParams& gamma() const noexcept { return gamma_; }

  /// Distribution of x given y: N(mu, (y·lambda)⁻¹).
  [[nodiscard]] MvNormalParams conditional(double y) const;

  bool operator==(const NormalGammaParams& o) const {
    return mu_ == o.mu_ && lambda_ == o.lambda_ && gamma_ == o.gamma_;
  }

 private:
  Vector mu_;
  SpdMatrix lambda_;
  GammaParams gamma_;
};

struct NgSample {
  Vector x;
  double y = 1.0;
};

double logpdf_mvn(const Vector& x, const MvNormalParams& params);
double logpdf_gamma(double y, const GammaParams& params);
double logpdf_ng(const Vector& x, double y, const NormalGammaParams& params);
inline double logpdf_ng(const NgSample& s, const NormalGammaParams& params) {
  return logpdf_ng(s.x, s.y, params);
}

/// Marsaglia–Tsang squeeze sampler; shapes below 1 are boosted via Gam(a + 1)·U^(1/a).
double sample_gamma(const GammaParams& params, RngStream& rng);

/// x = mean + L⁻ᵀ·z where precision = L·Lᵀ and z is standard normal.
Vector sample_mvn(const MvNormalParams& params, RngStream& rng);
void sample_mvn(const MvNormalParams& params, RngStream& rng, Vector& out);

NgSample sample_ng(const NormalGammaParams& params, RngStream& rng);
void sample_ng(const NormalGammaParams& params, RngStream& rng, NgSample& out);

}  // namespace ngkl
