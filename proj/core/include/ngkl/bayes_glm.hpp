#pragma once

#include <span>
#include <vector>

#include "ngkl/distributions.hpp"
#include "ngkl/numerics.hpp"

namespace ngkl {

/// Sufficient statistics of a GLM dataset under known noise precision P:
/// XᵀPX, XᵀPy, yᵀPy and the row count. Statistics of independent datasets add.
struct GlmSufficientStats {
  Matrix gram;
  Vector cross;
  double y_py = 0.0;
  Eigen::Index n = 0;

  GlmSufficientStats& operator+=(const GlmSufficientStats& o);
};

/// Data y (n), design X (n×p) and noise precision P = V⁻¹ (n×n) of the model
/// y = Xβ + ε, ε ~ N(0, (τP)⁻¹). X must have full column rank.
class GlmDataset {
 public:
  GlmDataset(Vector y, Matrix x, SpdMatrix noise_precision);
  /// P = I_n.
  GlmDataset(Vector y, Matrix x);

  [[nodiscard]] Eigen::Index n() const noexcept { return y_.size(); }
  [[nodiscard]] Eigen::Index p() const noexcept { return x_.cols(); }
  [[nodiscard]] const Vector& y() const noexcept { return y_; }
  [[nodiscard]] const Matrix& x() const noexcept { return x_; }
  [[nodiscard]] const SpdMatrix& noise_precision() const noexcept { return p_; }
  [[nodiscard]] bool identity_noise() const noexcept { return identity_noise_; }

  /// Lᵀ·X and Lᵀ·y where P = L·Lᵀ.
  [[nodiscard]] const Matrix& whitened_x() const noexcept { return wx_; }
  [[nodiscard]] const Vector& whitened_y() const noexcept { return wy_; }

  [[nodiscard]] GlmSufficientStats stats() const;

 private:
  void validate_and_whiten();

  Vector y_;
  Matrix x_;
  SpdMatrix p_;
  bool identity_noise_;
  Matrix wx_;
  Vector wy_;
};

/// Concatenates datasets row-wise with block-diagonal noise precision.
GlmDataset stack_datasets(std::span<const GlmDataset> parts);

struct ModelQuality {
  double lme = 0.0;
  double accuracy = 0.0;
  double complexity = 0.0;
};

struct GlmFit {
  NormalGammaParams prior;
  NormalGammaParams posterior;
  ModelQuality quality;
  /// ln p(y|m) from the ratio of normalizing constants, kept for auditing.
  double lme_direct = 0.0;
};

/// Decomposed and direct LME must agree to this absolute tolerance.
inline constexpr double kLmeConsistencyTolerance = 1e-6;

/// Conjugate normal-gamma posterior for the GLM.
/// Throws NumericalError if the posterior rate comes out non-positive.
NormalGammaParams fit_posterior(const GlmDataset& data, const NormalGammaParams& prior);
NormalGammaParams fit_posterior(const GlmSufficientStats& stats, const NormalGammaParams& prior);

/// KL[posterior || prior].
double complexity(const NormalGammaParams& prior, const NormalGammaParams& posterior);

/// Posterior expected log-likelihood ⟨ln N(y; Xβ, (τP)⁻¹)⟩.
double accuracy(const GlmDataset& data, const NormalGammaParams& posterior);

/// ln p(y|m) as the ratio of prior and posterior normalizing constants.
double log_model_evidence_direct(const GlmDataset& data, const NormalGammaParams& prior,
                                 const NormalGammaParams& posterior);

/// Fits the posterior and reports LME = accuracy − complexity. The direct
/// closed form is evaluated as well; a mismatch above kLmeConsistencyTolerance
/// raises NumericalError.
GlmFit log_model_evidence(const GlmDataset& data, const NormalGammaParams& prior);

/// Reference prior the training folds start from in cross-validation.
struct CvPriorPolicy {
  double lambda_ref = 1e-6;
  double a0 = 1e-3;
  double b0 = 1e-3;

  [[nodiscard]] NormalGammaParams reference_prior(Eigen::Index p) const;
};

struct CvEvidence {
  double lme = 0.0;
  double accuracy = 0.0;
  double complexity = 0.0;
  std::vector<GlmFit> folds;
};

/// Leave-one-session-out cross-validated LME. For each session, the other
/// sessions update the reference prior; the resulting posterior is the prior
/// for the held-out session. Per-fold LME, accuracy and complexity are summed.
CvEvidence cv_log_model_evidence(std::span<const GlmDataset> sessions,
                                 const CvPriorPolicy& policy = {});

}  // namespace ngkl
