#include "ngkl/divergence.hpp"

#include <Eigen/Core>

namespace ngkl {

namespace {

void check_same_dim(Eigen::Index a, Eigen::Index b, const char* fn) {
  if (a != b) {
    throw DimensionError(std::string(fn) + ": dimensions differ (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

double clamp_kl(double raw, const char* fn) {
  if (std::isnan(raw) || raw < -kNegativeKlTolerance) {
    throw NumericalError(std::string(fn) + ": closed form evaluated to " + std::to_string(raw));
  }
  return raw < 0.0 ? 0.0 : raw;
}

// tr(A·B⁻¹) = ‖L_B⁻¹·L_A‖²_F with A = L_A·L_Aᵀ, B = L_B·L_Bᵀ.
double trace_ratio(const SpdMatrix& a, const SpdMatrix& b) {
  const Matrix m = b.factor().triangularView<Eigen::Lower>().solve(a.factor());
  return m.squaredNorm();
}

double kl_gamma_raw(const GammaParams& p, const GammaParams& q) {
  const double a1 = p.shape(), b1 = p.rate();
  const double a2 = q.shape(), b2 = q.rate();
  return a2 * std::log(b1 / b2) - (log_gamma(a1) - log_gamma(a2)) + (a1 - a2) * digamma(a1) -
         (b1 - b2) * a1 / b1;
}

}  // namespace

double kl_mvn(const MvNormalParams& p, const MvNormalParams& q) {
  check_same_dim(p.dim(), q.dim(), "kl_mvn");
  if (p == q) return 0.0;
  const double k = static_cast<double>(p.dim());
  const Vector diff = q.mean() - p.mean();
  const double maha = q.precision().quadratic_form(diff);
  const double trace = trace_ratio(q.precision(), p.precision());
  // ln(|Σp|/|Σq|) = ln|Λq| − ln|Λp|
  const double log_ratio = q.precision().logdet() - p.precision().logdet();
  return clamp_kl(0.5 * (maha + trace - log_ratio - k), "kl_mvn");
}

double kl_gamma(const GammaParams& p, const GammaParams& q) {
  if (p == q) return 0.0;
  return clamp_kl(kl_gamma_raw(p, q), "kl_gamma");
}

double expected_conditional_mvn_kl(const NormalGammaParams& p, const NormalGammaParams& q) {
  check_same_dim(p.dim(), q.dim(), "expected_conditional_mvn_kl");
  if (p.mu() == q.mu() && p.lambda() == q.lambda()) return 0.0;
  const double k = static_cast<double>(p.dim());
  const Vector diff = q.mu() - p.mu();
  const double maha = q.lambda().quadratic_form(diff);
  const double trace = trace_ratio(q.lambda(), p.lambda());
  const double log_ratio = q.lambda().logdet() - p.lambda().logdet();
  return 0.5 * p.gamma().mean() * maha + 0.5 * trace - 0.5 * log_ratio - 0.5 * k;
}

double kl_normal_gamma(const NormalGammaParams& p, const NormalGammaParams& q) {
  check_same_dim(p.dim(), q.dim(), "kl_normal_gamma");
  if (p == q) return 0.0;
  const double gamma_part = p.gamma() == q.gamma() ? 0.0 : kl_gamma_raw(p.gamma(), q.gamma());
  return clamp_kl(expected_conditional_mvn_kl(p, q) + gamma_part, "kl_normal_gamma");
}

namespace detail {

std::string describe_sample(const Vector& x) {
  std::ostringstream os;
  os << "x=[";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << "]";
  return os.str();
}

std::string describe_sample(const NgSample& s) {
  return describe_sample(s.x) + ", " + describe_sample(s.y);
}

void validate_sample_count(std::size_t n_samples) {
  if (n_samples < kMinMonteCarloSamples) {
    throw std::invalid_argument("kl_monte_carlo: need at least " +
                                std::to_string(kMinMonteCarloSamples) + " samples, got " +
                                std::to_string(n_samples));
  }
}

KlEstimate finish_estimate(const RunningMoments& m) {
  const double n = static_cast<double>(m.count);
  const double variance = m.count > 1 ? m.m2 / (n - 1.0) : 0.0;
  return KlEstimate{m.mean, std::sqrt(variance / n), m.count};
}

void throw_non_finite(std::size_t index, const std::string& sample, double lp, double lq) {
  std::ostringstream os;
  os << "kl_monte_carlo: non-finite log density at sample " << index << " (" << sample
     << "): ln p = " << lp << ", ln q = " << lq;
  throw NumericalError(os.str());
}

}  // namespace detail

KlEstimate kl_monte_carlo_mvn(const MvNormalParams& p, const MvNormalParams& q,
                              std::size_t n_samples, const RngStream& rng, unsigned workers) {
  check_same_dim(p.dim(), q.dim(), "kl_monte_carlo_mvn");
  return kl_monte_carlo<Vector>([&](const Vector& x) { return logpdf_mvn(x, p); },
                                [&](const Vector& x) { return logpdf_mvn(x, q); },
                                [&](RngStream& r, Vector& out) { sample_mvn(p, r, out); },
                                n_samples, rng, workers);
}

KlEstimate kl_monte_carlo_gamma(const GammaParams& p, const GammaParams& q,
                                std::size_t n_samples, const RngStream& rng, unsigned workers) {
  return kl_monte_carlo<double>([&](double y) { return logpdf_gamma(y, p); },
                                [&](double y) { return logpdf_gamma(y, q); },
                                [&](RngStream& r, double& out) { out = sample_gamma(p, r); },
                                n_samples, rng, workers);
}

KlEstimate kl_monte_carlo_ng(const NormalGammaParams& p, const NormalGammaParams& q,
                             std::size_t n_samples, const RngStream& rng, unsigned workers) {
  check_same_dim(p.dim(), q.dim(), "kl_monte_carlo_ng");
  return kl_monte_carlo<NgSample>([&](const NgSample& s) { return logpdf_ng(s, p); },
                                  [&](const NgSample& s) { return logpdf_ng(s, q); },
                                  [&](RngStream& r, NgSample& out) { sample_ng(p, r, out); },
                                  n_samples, rng, workers);
}

}  // namespace ngkl
