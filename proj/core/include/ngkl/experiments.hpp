#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ngkl/bayes_glm.hpp"
#include "ngkl/rng.hpp"

namespace ngkl {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Polynomial basis-function sweep

struct PolySweepConfig {
  std::size_t n_simulations = 100;
  std::size_t n_points = 100;
  int p_true = 5;
  int p_min = 0;
  int p_max = 20;
  double noise_variance = 1.0;
  std::uint64_t master_seed = 0;

  /// Throws ParameterError if the fields are inconsistent.
  void validate() const;
};

/// n values from −1 to +1 inclusive with step 2/(n − 1).
Vector equally_spaced(std::size_t n);

/// Vandermonde design: entry (i, j) = x_i^j for j = 0..order. Requires |x_i| <= 1.
Matrix build_poly_design(const Vector& x, int order);

struct PolynomialSample {
  Vector x;
  Vector y;
  Vector beta_true;
};

/// One replication: β_true ~ N(0, I) of length p_true + 1 (from replication.derive(0)),
/// noise ~ N(0, noise_variance·I) (from replication.derive(1)), y = X_{p_true}·β_true + ε.
PolynomialSample simulate_polynomial(const PolySweepConfig& config, const RngStream& replication);

/// Stream assigned to a replication index of a sweep or study.
inline RngStream replication_stream(std::uint64_t master_seed, std::size_t replication) {
  return RngStream(master_seed, static_cast<std::uint64_t>(replication));
}

/// μ0 = 0, Λ0 = I, a0 = 1, b0 = 1 over order + 1 coefficients.
NormalGammaParams poly_sweep_prior(int order);

struct SweepRow {
  int order = 0;
  double mean_lme = 0.0;
  double mean_accuracy = 0.0;
  double mean_complexity = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Order with maximal mean LME; ties go to the smaller order. −1 if rows is empty.
  int argmax_order = -1;
  /// Per-replication argmax of the LME over orders.
  std::vector<int> replication_argmax;
};

/// Fits every order in [p_min, p_max] to every replication and averages the
/// model quality measures. Aggregation runs in replication order, so the
/// result is bit-identical for any worker count.
SweepResult run_poly_sweep(const PolySweepConfig& config, unsigned workers = 0);

/// Argmax with ties resolved toward the first (smallest-order) entry.
int argmax_order(const std::vector<SweepRow>& rows);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Cross-validated model comparison on synthetic multi-session data

enum class CvModel { A, B };

std::string to_string(CvModel m);
CvModel cv_model_from_string(const std::string& s);

struct CvStudyConfig {
  std::size_t n_replications = 100;
  std::size_t n_sessions = 5;
  std::size_t trials_per_condition = 3;
  double noise_variance = 1.0;
  CvModel generator = CvModel::B;
  std::uint64_t master_seed = 0;
  CvPriorPolicy prior;

  void validate() const;
};

/// Levels of each factor of the 4×4 factorial design and their modulator values.
inline constexpr int kFactorLevels = 4;

/// Flexible design: one indicator column per (left, right) condition, 16 columns.
/// Rows enumerate the conditions trials_per_condition times.
Matrix factorial_design(std::size_t trials_per_condition);

/// Constrained design with columns [1, PM_left, PM_right], PM = level/3 ∈ {0, 1/3, 2/3, 1}.
/// Each column is a fixed linear combination of the factorial design's columns.
Matrix parametric_design(std::size_t trials_per_condition);

struct CvReplication {
  std::size_t replication = 0;
  double cvlme_a = 0.0;
  double cvlme_b = 0.0;
  double acc_a = 0.0;
  double acc_b = 0.0;
  double com_a = 0.0;
  double com_b = 0.0;
};

/// Differences are B − A, so positive ΔcvLME and negative ΔCom favor B.
struct CvStudyReport {
  std::vector<CvReplication> rows;
  double mean_delta_lme = 0.0;
  double mean_delta_acc = 0.0;
  double mean_delta_com = 0.0;
  double fraction_lme_favors_b = 0.0;
  double fraction_com_favors_b = 0.0;
};

CvStudyReport run_cv_study(const CvStudyConfig& config, const Matrix& design_a,
                           const Matrix& design_b, unsigned workers = 0);
CvStudyReport run_cv_study(const CvStudyConfig& config, unsigned workers = 0);

void write_cv_csv(const CvStudyReport& report, const std::filesystem::path& path);

}  // namespace ngkl
