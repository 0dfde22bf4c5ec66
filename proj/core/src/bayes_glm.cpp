#include "ngkl/bayes_glm.hpp"

#include <Eigen/QR>
#include <cmath>
#include <sstream>
#include <string>

#include "ngkl/divergence.hpp"

namespace ngkl {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void check_prior_dim(Eigen::Index p, const NormalGammaParams& prior, const char* fn) {
  if (prior.dim() != p) {
    throw DimensionError(std::string(fn) + ": prior has dimension " +
                         std::to_string(prior.dim()) + " but the design has " +
                         std::to_string(p) + " columns");
  }
}

}  // namespace

GlmSufficientStats& GlmSufficientStats::operator+=(const GlmSufficientStats& o) {
  if (gram.rows() != o.gram.rows()) {
    throw DimensionError("GlmSufficientStats: cannot add statistics of different designs");
  }
  gram += o.gram;
  cross += o.cross;
  y_py += o.y_py;
  n += o.n;
  return *this;
}

GlmDataset::GlmDataset(Vector y, Matrix x, SpdMatrix noise_precision)
    : y_(std::move(y)), x_(std::move(x)), p_(std::move(noise_precision)), identity_noise_(false) {
  validate_and_whiten();
}

GlmDataset::GlmDataset(Vector y, Matrix x)
    : y_(std::move(y)), x_(std::move(x)), p_(SpdMatrix::identity(std::max<Eigen::Index>(y_.size(), 1))),
      identity_noise_(true) {
  validate_and_whiten();
}

void GlmDataset::validate_and_whiten() {
  if (y_.size() == 0) throw DimensionError("GlmDataset: need at least one observation");
  if (x_.cols() == 0) throw DimensionError("GlmDataset: design matrix has no columns");
  if (x_.rows() != y_.size()) {
    throw DimensionError("GlmDataset: design has " + std::to_string(x_.rows()) +
                         " rows but y has " + std::to_string(y_.size()) + " entries");
  }
  if (p_.dim() != y_.size()) {
    throw DimensionError("GlmDataset: noise precision is " + std::to_string(p_.dim()) + "x" +
                         std::to_string(p_.dim()) + ", expected " + std::to_string(y_.size()));
  }
  if (!y_.allFinite() || !x_.allFinite()) throw ParameterError("GlmDataset: non-finite data");

  if (identity_noise_) {
    wx_ = x_;
    wy_ = y_;
  } else {
    const auto lt = p_.factor().transpose().triangularView<Eigen::Upper>();
    wx_ = lt * x_;
    wy_ = lt * y_;
  }

  const Eigen::ColPivHouseholderQR<Matrix> qr(wx_);
  if (qr.rank() < x_.cols()) {
    throw RankDeficientError("GlmDataset: design matrix has rank " + std::to_string(qr.rank()) +
                             " < " + std::to_string(x_.cols()) + " columns");
  }
}

GlmSufficientStats GlmDataset::stats() const {
  return GlmSufficientStats{symmetrized(wx_.transpose() * wx_), wx_.transpose() * wy_,
                            wy_.squaredNorm(), n()};
}

GlmDataset stack_datasets(std::span<const GlmDataset> parts) {
  if (parts.empty()) throw DimensionError("stack_datasets: nothing to stack");
  Eigen::Index n = 0;
  const Eigen::Index p = parts.front().p();
  bool all_identity = true;
  for (const auto& d : parts) {
    if (d.p() != p) throw DimensionError("stack_datasets: designs differ in column count");
    n += d.n();
    all_identity = all_identity && d.identity_noise();
  }
  Vector y(n);
  Matrix x(n, p);
  Matrix prec = Matrix::Zero(n, n);
  Eigen::Index row = 0;
  for (const auto& d : parts) {
    y.segment(row, d.n()) = d.y();
    x.middleRows(row, d.n()) = d.x();
    prec.block(row, row, d.n(), d.n()) = d.noise_precision().matrix();
    row += d.n();
  }
  if (all_identity) return GlmDataset(std::move(y), std::move(x));
  return GlmDataset(std::move(y), std::move(x), SpdMatrix(std::move(prec)));
}

NormalGammaParams fit_posterior(const GlmSufficientStats& stats, const NormalGammaParams& prior) {
  check_prior_dim(stats.gram.rows(), prior, "fit_posterior");
  if (stats.n < 1) throw DimensionError("fit_posterior: need at least one observation");
  const Matrix& lambda0 = prior.lambda().matrix();
  SpdMatrix lambda_n(symmetrized(stats.gram + lambda0));
  const Vector rhs = stats.cross + lambda0 * prior.mu();
  Vector mu_n = lambda_n.solve(rhs);
  mu_n += lambda_n.solve(Vector(rhs - lambda_n.matrix() * mu_n));  // one refinement step
  const double a_n = prior.shape() + 0.5 * static_cast<double>(stats.n);
  const double b_n = prior.rate() + 0.5 * (stats.y_py + prior.lambda().quadratic_form(prior.mu()) -
                                           mu_n.dot(rhs));
  if (!(b_n > 0.0) || !std::isfinite(b_n)) {
    std::ostringstream os;
    os << "fit_posterior: posterior rate b_n = " << b_n
       << " is not positive (catastrophic cancellation)";
    throw NumericalError(os.str());
  }
  return NormalGammaParams(std::move(mu_n), std::move(lambda_n), a_n, b_n);
}

NormalGammaParams fit_posterior(const GlmDataset& data, const NormalGammaParams& prior) {
  check_prior_dim(data.p(), prior, "fit_posterior");
  return fit_posterior(data.stats(), prior);
}

double complexity(const NormalGammaParams& prior, const NormalGammaParams& posterior) {
  return kl_normal_gamma(posterior, prior);
}

double accuracy(const GlmDataset& data, const NormalGammaParams& posterior) {
  check_prior_dim(data.p(), posterior, "accuracy");
  const double n = static_cast<double>(data.n());
  const double a_n = posterior.shape();
  const double b_n = posterior.rate();
  const Vector residual = data.whitened_y() - data.whitened_x() * posterior.mu();
  // tr(XᵀPX·Λn⁻¹) = ‖Ln⁻¹·(LᵀX)ᵀ‖²_F
  const Matrix spread =
      posterior.lambda().factor().triangularView<Eigen::Lower>().solve(data.whitened_x().transpose());
  return 0.5 * data.noise_precision().logdet() - 0.5 * n * kLn2Pi +
         0.5 * n * (digamma(a_n) - std::log(b_n)) -
         0.5 * (a_n / b_n * residual.squaredNorm() + spread.squaredNorm());
}

double log_model_evidence_direct(const GlmDataset& data, const NormalGammaParams& prior,
                                 const NormalGammaParams& posterior) {
  const double n = static_cast<double>(data.n());
  const double a0 = prior.shape(), b0 = prior.rate();
  const double an = posterior.shape(), bn = posterior.rate();
  return -0.5 * n * kLn2Pi + 0.5 * data.noise_precision().logdet() +
         0.5 * (prior.lambda().logdet() - posterior.lambda().logdet()) + a0 * std::log(b0) -
         an * std::log(bn) + log_gamma(an) - log_gamma(a0);
}

GlmFit log_model_evidence(const GlmDataset& data, const NormalGammaParams& prior) {
  NormalGammaParams posterior = fit_posterior(data, prior);
  ModelQuality q;
  q.accuracy = accuracy(data, posterior);
  q.complexity = complexity(prior, posterior);
  q.lme = q.accuracy - q.complexity;
  const double direct = log_model_evidence_direct(data, prior, posterior);
  if (!(std::abs(q.lme - direct) <= kLmeConsistencyTolerance)) {
    std::ostringstream os;
    os.precision(17);
    os << "log_model_evidence: accuracy - complexity = " << q.lme
       << " disagrees with the direct evidence " << direct;
    throw NumericalError(os.str());
  }
  return GlmFit{prior, std::move(posterior), q, direct};
}

NormalGammaParams CvPriorPolicy::reference_prior(Eigen::Index p) const {
  return NormalGammaParams(Vector::Zero(p), SpdMatrix::identity(p).scaled(lambda_ref), a0, b0);
}

CvEvidence cv_log_model_evidence(std::span<const GlmDataset> sessions,
                                 const CvPriorPolicy& policy) {
  if (sessions.size() < 2) {
    throw std::invalid_argument("cv_log_model_evidence: need at least 2 sessions, got " +
                                std::to_string(sessions.size()));
  }
  const Eigen::Index p = sessions.front().p();
  for (const auto& s : sessions) {
    if (s.p() != p) throw DimensionError("cv_log_model_evidence: sessions differ in column count");
  }
  const NormalGammaParams reference = policy.reference_prior(p);
  std::vector<GlmSufficientStats> stats;
  stats.reserve(sessions.size());
  for (const auto& s : sessions) stats.push_back(s.stats());

  CvEvidence out;
  out.folds.reserve(sessions.size());
  for (std::size_t held = 0; held < sessions.size(); ++held) {
    GlmSufficientStats training{Matrix::Zero(p, p), Vector::Zero(p), 0.0, 0};
    for (std::size_t j = 0; j < sessions.size(); ++j) {
      if (j != held) training += stats[j];
    }
    const NormalGammaParams trained = fit_posterior(training, reference);
    GlmFit fit = log_model_evidence(sessions[held], trained);
    out.lme += fit.quality.lme;
    out.accuracy += fit.quality.accuracy;
    out.complexity += fit.quality.complexity;
    out.folds.push_back(std::move(fit));
  }
  return out;
}

}  // namespace ngkl
