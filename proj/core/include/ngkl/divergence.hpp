#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "ngkl/distributions.hpp"
#include "ngkl/parallel.hpp"
#include "ngkl/rng.hpp"

namespace ngkl {

/// Negative closed-form results down to this value are treated as rounding and clamped to 0.
inline constexpr double kNegativeKlTolerance = 1e-10;

/// Closed-form KL[P || Q] between two multivariate normals.
double kl_mvn(const MvNormalParams& p, const MvNormalParams& q);

/// Closed-form KL[P || Q] between two gamma distributions.
double kl_gamma(const GammaParams& p, const GammaParams& q);

/// Closed-form KL[P || Q] between two normal-gamma distributions.
///
/// Computed as the p(y)-expectation of the conditional normal KL plus the
/// gamma KL of the marginals, so that the chain rule holds to rounding.
double kl_normal_gamma(const NormalGammaParams& p, const NormalGammaParams& q);

/// ⟨KL[p(x|y) || q(x|y)]⟩ over y ~ p(y). Not clamped.
double expected_conditional_mvn_kl(const NormalGammaParams& p, const NormalGammaParams& q);

struct KlEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t sample_count = 0;
};

inline constexpr std::size_t kMinMonteCarloSamples = 100;
/// Sample index space is cut into this many fixed chunks, each with its own
/// derived stream, so the estimate does not depend on the worker count.
inline constexpr std::size_t kMonteCarloChunks = 64;

namespace detail {

struct RunningMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }

  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    const double n = static_cast<double>(count + o.count);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.count) / n;
    m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
    count += o.count;
  }
};

inline std::string describe_sample(double y) { return "y=" + std::to_string(y); }
std::string describe_sample(const Vector& x);
std::string describe_sample(const NgSample& s);

void validate_sample_count(std::size_t n_samples);
KlEstimate finish_estimate(const RunningMoments& moments);
[[noreturn]] void throw_non_finite(std::size_t index, const std::string& sample, double lp,
                                   double lq);

}  // namespace detail

/// Monte Carlo estimate of KL[P || Q] = E_P[ln p − ln q].
///
/// `sampler(RngStream&, Sample&)` draws from P into its second argument.
/// Samples are split into kMonteCarloChunks chunks; chunk c uses rng.derive(c).
/// Throws NumericalError if either log density is non-finite at a sample.
template <typename Sample, typename LogPdfP, typename LogPdfQ, typename Sampler>
KlEstimate kl_monte_carlo(const LogPdfP& logpdf_p, const LogPdfQ& logpdf_q,
                          const Sampler& sampler, std::size_t n_samples, const RngStream& rng,
                          unsigned workers = 0) {
  detail::validate_sample_count(n_samples);
  std::vector<detail::RunningMoments> chunks(kMonteCarloChunks);
  parallel_for(kMonteCarloChunks, workers, [&](std::size_t c) {
    const std::size_t begin = n_samples * c / kMonteCarloChunks;
    const std::size_t end = n_samples * (c + 1) / kMonteCarloChunks;
    RngStream stream = rng.derive(c);
    Sample s{};
    detail::RunningMoments acc;
    for (std::size_t i = begin; i < end; ++i) {
      sampler(stream, s);
      const double lp = logpdf_p(s);
      const double lq = logpdf_q(s);
      if (!std::isfinite(lp) || !std::isfinite(lq)) {
        detail::throw_non_finite(i, detail::describe_sample(s), lp, lq);
      }
      acc.push(lp - lq);
    }
    chunks[c] = acc;
  });
  detail::RunningMoments total;
  for (const auto& c : chunks) total.merge(c);
  return detail::finish_estimate(total);
}

KlEstimate kl_monte_carlo_mvn(const MvNormalParams& p, const MvNormalParams& q,
                              std::size_t n_samples, const RngStream& rng, unsigned workers = 0);
KlEstimate kl_monte_carlo_gamma(const GammaParams& p, const GammaParams& q,
                                std::size_t n_samples, const RngStream& rng,
                                unsigned workers = 0);
KlEstimate kl_monte_carlo_ng(const NormalGammaParams& p, const NormalGammaParams& q,
                             std::size_t n_samples, const RngStream& rng, unsigned workers = 0);

}  // namespace ngkl
