#include "ngkl/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ngkl/parallel.hpp"

namespace ngkl {

namespace {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

void PolySweepConfig::validate() const {
  if (n_simulations == 0) throw ParameterError("n_simulations must be positive");
  if (n_points < 2) throw ParameterError("n_points must be at least 2");
  if (p_min < 0) throw ParameterError("p_min must be non-negative");
  if (!(p_min <= p_true && p_true <= p_max)) {
    throw ParameterError("require p_min <= p_true <= p_max");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw ParameterError("noise_variance must be non-negative and finite");
  }
}

Vector equally_spaced(std::size_t n) {
  if (n < 2) throw ParameterError("equally_spaced: need n >= 2, got " + std::to_string(n));
  Vector x(static_cast<Eigen::Index>(n));
  const double step = 2.0 / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[static_cast<Eigen::Index>(i)] = -1.0 + step * static_cast<double>(i);
  x[static_cast<Eigen::Index>(n - 1)] = 1.0;
  return x;
}

Matrix build_poly_design(const Vector& x, int order) {
  if (order < 0) throw ParameterError("build_poly_design: order must be non-negative");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(std::abs(x[i]) <= 1.0)) {
      throw DomainError("build_poly_design: x[" + std::to_string(i) + "] = " +
                        std::to_string(x[i]) + " lies outside [-1, 1]");
    }
  }
  Matrix design(x.size(), order + 1);
  design.col(0).setOnes();
  for (int j = 1; j <= order; ++j) design.col(j) = design.col(j - 1).cwiseProduct(x);
  return design;
}

PolynomialSample simulate_polynomial(const PolySweepConfig& config, const RngStream& replication) {
  config.validate();
  PolynomialSample s;
  s.x = equally_spaced(config.n_points);
  RngStream coef_rng = replication.derive(0);
  RngStream noise_rng = replication.derive(1);
  s.beta_true.resize(config.p_true + 1);
  for (Eigen::Index j = 0; j < s.beta_true.size(); ++j) s.beta_true[j] = coef_rng.normal();
  const double sigma = std::sqrt(config.noise_variance);
  s.y = build_poly_design(s.x, config.p_true) * s.beta_true;
  for (Eigen::Index i = 0; i < s.y.size(); ++i) s.y[i] += sigma * noise_rng.normal();
  return s;
}

NormalGammaParams poly_sweep_prior(int order) {
  return NormalGammaParams(Vector::Zero(order + 1), SpdMatrix::identity(order + 1), 1.0, 1.0);
}

int argmax_order(const std::vector<SweepRow>& rows) {
  if (rows.empty()) return -1;
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].mean_lme > rows[best].mean_lme) best = i;
  }
  return rows[best].order;
}

SweepResult run_poly_sweep(const PolySweepConfig& config, unsigned workers) {
  config.validate();
  const std::size_t n_orders = static_cast<std::size_t>(config.p_max - config.p_min + 1);
  std::vector<std::vector<ModelQuality>> quality(config.n_simulations,
                                                 std::vector<ModelQuality>(n_orders));

  parallel_for(config.n_simulations, workers, [&](std::size_t rep) {
    const PolynomialSample sample =
        simulate_polynomial(config, replication_stream(config.master_seed, rep));
    for (std::size_t k = 0; k < n_orders; ++k) {
      const int order = config.p_min + static_cast<int>(k);
      try {
        const GlmDataset data(sample.y, build_poly_design(sample.x, order));
        quality[rep][k] = log_model_evidence(data, poly_sweep_prior(order)).quality;
      } catch (const std::exception& e) {
        throw ExperimentError("replication " + std::to_string(rep) + ", order " +
                              std::to_string(order) + ": " + e.what());
      }
    }
  });

  SweepResult result;
  result.rows.resize(n_orders);
  result.replication_argmax.reserve(config.n_simulations);
  for (std::size_t rep = 0; rep < config.n_simulations; ++rep) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < n_orders; ++k) {
      result.rows[k].mean_lme += quality[rep][k].lme;
      result.rows[k].mean_accuracy += quality[rep][k].accuracy;
      result.rows[k].mean_complexity += quality[rep][k].complexity;
      if (quality[rep][k].lme > quality[rep][best].lme) best = k;
    }
    result.replication_argmax.push_back(config.p_min + static_cast<int>(best));
  }
  const double n = static_cast<double>(config.n_simulations);
  for (std::size_t k = 0; k < n_orders; ++k) {
    auto& row = result.rows[k];
    row.order = config.p_min + static_cast<int>(k);
    row.mean_lme /= n;
    row.mean_accuracy /= n;
    row.mean_complexity /= n;
  }
  result.argmax_order = argmax_order(result.rows);
  return result;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "order,mean_lme,mean_acc,mean_com\n";
  for (const auto& r : result.rows) {
    out << r.order << ',' << format_value(r.mean_lme) << ',' << format_value(r.mean_accuracy)
        << ',' << format_value(r.mean_complexity) << '\n';
  }
  finish_write(out, path);
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != "order,mean_lme,mean_acc,mean_com") {
    throw IoError("'" + path.string() + "' does not start with the sweep CSV header");
  }
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    SweepRow r;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(fields >> r.order >> c1 >> r.mean_lme >> c2 >> r.mean_accuracy >> c3 >>
          r.mean_complexity) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw IoError("'" + path.string() + "' line " + std::to_string(line_no) + " is malformed");
    }
    rows.push_back(r);
  }
  return rows;
}

std::string to_string(CvModel m) { return m == CvModel::A ? "A" : "B"; }

CvModel cv_model_from_string(const std::string& s) {
  if (s == "A" || s == "a") return CvModel::A;
  if (s == "B" || s == "b") return CvModel::B;
  throw ParameterError("generator must be \"A\" or \"B\", got \"" + s + "\"");
}

void CvStudyConfig::validate() const {
  if (n_replications == 0) throw ParameterError("n_replications must be positive");
  if (n_sessions < 2) throw ParameterError("n_sessions must be at least 2");
  if (trials_per_condition == 0) throw ParameterError("trials_per_condition must be positive");
  if (!(noise_variance > 0.0) || !std::isfinite(noise_variance)) {
    throw ParameterError("noise_variance must be positive and finite");
  }
  if (!(prior.lambda_ref > 0.0 && prior.a0 > 0.0 && prior.b0 > 0.0)) {
    throw ParameterError("reference prior parameters must be positive");
  }
}

Matrix factorial_design(std::size_t trials_per_condition) {
  const int conditions = kFactorLevels * kFactorLevels;
  const auto n = static_cast<Eigen::Index>(trials_per_condition) * conditions;
  Matrix a = Matrix::Zero(n, conditions);
  Eigen::Index row = 0;
  for (std::size_t t = 0; t < trials_per_condition; ++t) {
    for (int c = 0; c < conditions; ++c) a(row++, c) = 1.0;
  }
  return a;
}

Matrix parametric_design(std::size_t trials_per_condition) {
  const Matrix a = factorial_design(trials_per_condition);
  // Column weights over the 16 conditions, c = left·4 + right.
  Matrix weights(kFactorLevels * kFactorLevels, 3);
  for (int left = 0; left < kFactorLevels; ++left) {
    for (int right = 0; right < kFactorLevels; ++right) {
      const int c = left * kFactorLevels + right;
      weights(c, 0) = 1.0;
      weights(c, 1) = left / 3.0;
      weights(c, 2) = right / 3.0;
    }
  }
  return a * weights;
}

CvStudyReport run_cv_study(const CvStudyConfig& config, const Matrix& design_a,
                           const Matrix& design_b, unsigned workers) {
  config.validate();
  if (design_a.rows() != design_b.rows()) {
    throw DimensionError("run_cv_study: designs must share the number of rows per session");
  }
  const Matrix& generator = config.generator == CvModel::A ? design_a : design_b;
  const double sigma = std::sqrt(config.noise_variance);

  CvStudyReport report;
  report.rows.resize(config.n_replications);
  parallel_for(config.n_replications, workers, [&](std::size_t rep) {
    const RngStream stream = replication_stream(config.master_seed, rep);
    RngStream coef_rng = stream.derive(0);
    Vector beta(generator.cols());
    for (Eigen::Index j = 0; j < beta.size(); ++j) beta[j] = coef_rng.normal();
    const Vector signal = generator * beta;

    std::vector<GlmDataset> sessions_a, sessions_b;
    for (std::size_t s = 0; s < config.n_sessions; ++s) {
      RngStream noise_rng = stream.derive(1 + s);
      Vector y = signal;
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sigma * noise_rng.normal();
      sessions_a.emplace_back(y, design_a);
      sessions_b.emplace_back(std::move(y), design_b);
    }
    try {
      const CvEvidence a = cv_log_model_evidence(sessions_a, config.prior);
      const CvEvidence b = cv_log_model_evidence(sessions_b, config.prior);
      report.rows[rep] = CvReplication{rep, a.lme, b.lme, a.accuracy, b.accuracy, a.complexity,
                                       b.complexity};
    } catch (const std::exception& e) {
      throw ExperimentError("replication " + std::to_string(rep) + ": " + e.what());
    }
  });

  const double n = static_cast<double>(config.n_replications);
  for (const auto& r : report.rows) {
    report.mean_delta_lme += (r.cvlme_b - r.cvlme_a) / n;
    report.mean_delta_acc += (r.acc_b - r.acc_a) / n;
    report.mean_delta_com += (r.com_b - r.com_a) / n;
    report.fraction_lme_favors_b += (r.cvlme_b > r.cvlme_a ? 1.0 : 0.0) / n;
    report.fraction_com_favors_b += (r.com_b < r.com_a ? 1.0 : 0.0) / n;
  }
  return report;
}

CvStudyReport run_cv_study(const CvStudyConfig& config, unsigned workers) {
  return run_cv_study(config, factorial_design(config.trials_per_condition),
                      parametric_design(config.trials_per_condition), workers);
}

void write_cv_csv(const CvStudyReport& report, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "replication,cvlme_a,cvlme_b,acc_a,acc_b,com_a,com_b\n";
  for (const auto& r : report.rows) {
    out << r.replication << ',' << format_value(r.cvlme_a) << ',' << format_value(r.cvlme_b)
        << ',' << format_value(r.acc_a) << ',' << format_value(r.acc_b) << ','
        << format_value(r.com_a) << ',' << format_value(r.com_b) << '\n';
  }
  finish_write(out, path);
}

}  // namespace ngkl
