#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "documents.hpp"
#include "ngkl/divergence.hpp"
#include "ngkl/errors.hpp"

namespace ngkl::cli {
namespace {

struct KlOptions {
  std::string family;
  std::string p_spec;
  std::string q_spec;
  bool check = false;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct FitOptions {
  std::string data_path;
  std::string prior_path;
  std::string posterior_out;
};

struct SweepOptions {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

using CvOptions = SweepOptions;

Eigen::Index dim_of(const GammaParams&) { return 1; }
template <class D>
Eigen::Index dim_of(const D& d) {
  return d.dim();
}

int finish_check(Json& report, double closed_form, const KlEstimate& mc, const KlOptions& o,
                 std::ostream& out) {
  const double diff = std::abs(mc.value - closed_form);
  const double threshold = 3.0 * mc.standard_error;
  const bool pass = diff <= threshold;
  report["check"] = Json{{"mc_samples", mc.sample_count}, {"seed", o.seed},
                         {"estimate", mc.value},         {"standard_error", mc.standard_error},
                         {"abs_difference", diff},       {"threshold_3se", threshold},
                         {"result", pass ? "PASS" : "FAIL"}};
  out << report.dump(2) << '\n';
  return pass ? kOk : kCheckFailed;
}

int cmd_kl(const KlOptions& o, std::ostream& out) {
  const Json p_doc = load_spec(o.p_spec);
  const Json q_doc = load_spec(o.q_spec);
  const RngStream rng(o.seed, 0);
  Json report{{"family", o.family}};

  auto run = [&](const auto& p, const auto& q, auto closed, auto monte_carlo) {
    if (dim_of(p) != dim_of(q))
      throw UsageError("p has dimension " + std::to_string(dim_of(p)) + " but q has " +
                       std::to_string(dim_of(q)));
    report["p"] = to_json(p);
    report["q"] = to_json(q);
    const double kl = closed(p, q);
    report["kl"] = kl;
    if (!o.check) {
      out << report.dump(2) << '\n';
      return static_cast<int>(kOk);
    }
    return finish_check(report, kl, monte_carlo(p, q, o.mc_samples, rng, o.threads), o, out);
  };

  if (o.family == "gamma") {
    return run(gamma_from_json(p_doc), gamma_from_json(q_doc),
               [](const auto& a, const auto& b) { return kl_gamma(a, b); },
               [](const auto&... args) { return kl_monte_carlo_gamma(args...); });
  }
  if (o.family == "mvn") {
    return run(mvn_from_json(p_doc), mvn_from_json(q_doc),
               [](const auto& a, const auto& b) { return kl_mvn(a, b); },
               [](const auto&... args) { return kl_monte_carlo_mvn(args...); });
  }
  return run(ng_from_json(p_doc), ng_from_json(q_doc),
             [](const auto& a, const auto& b) { return kl_normal_gamma(a, b); },
             [](const auto&... args) { return kl_monte_carlo_ng(args...); });
}

int cmd_fit(const FitOptions& o, std::ostream& out) {
  const DataDocument data = dataset_from_json(load_file(o.data_path));
  const NormalGammaParams prior = prior_from_json(load_file(o.prior_path));
  if (prior.dim() != data.dataset.p())
    throw UsageError("prior has " + std::to_string(prior.dim()) + " coefficients but X has " +
                     std::to_string(data.dataset.p()) + " columns");
  const GlmFit fit = log_model_evidence(data.dataset, prior);

  Json notes = Json::array();
  if (data.noise_precision_assumed) notes.push_back("P not given; identity noise precision assumed");
  Json report{{"data", Json{{"path", o.data_path},
                            {"n", data.dataset.n()},
                            {"p", data.dataset.p()},
                            {"P", data.noise_precision_assumed ? "identity (assumed)" : "file"}}},
              {"prior", prior_to_json(prior)},
              {"posterior", to_json(fit.posterior)},
              {"accuracy", fit.quality.accuracy},
              {"complexity", fit.quality.complexity},
              {"lme", fit.quality.lme},
              {"lme_direct", fit.lme_direct},
              {"notes", notes}};
  if (!o.posterior_out.empty()) {
    std::ofstream f(o.posterior_out, std::ios::binary);
    f << prior_to_json(fit.posterior).dump(2) << '\n';
    if (!f) throw IoError("cannot write '" + o.posterior_out + "'");
    report["posterior_out"] = o.posterior_out;
  }
  out << report.dump(2) << '\n';
  return kOk;
}

Json config_document(const std::string& path) {
  return path.empty() ? Json::object() : load_file(path);
}

Json row_json(const SweepRow& r) {
  return Json{{"order", r.order}, {"mean_lme", r.mean_lme}, {"mean_acc", r.mean_accuracy},
              {"mean_com", r.mean_complexity}};
}

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
  PolySweepConfig config = sweep_config_from_json(config_document(o.config_path));
  if (o.seed) config.master_seed = *o.seed;
  config.validate();
  const SweepResult result = run_poly_sweep(config, o.threads);
  write_sweep_csv(result, o.out);
  const SweepRow& best =
      result.rows[static_cast<std::size_t>(result.argmax_order - config.p_min)];
  const Json report{{"config", to_json(config)},
                    {"out", o.out},
                    {"argmax_order", result.argmax_order},
                    {"argmax_row", row_json(best)}};
  out << report.dump(2) << '\n';
  return kOk;
}

int cmd_cv_study(const CvOptions& o, std::ostream& out) {
  CvStudyConfig config = cv_config_from_json(config_document(o.config_path));
  if (o.seed) config.master_seed = *o.seed;
  config.validate();
  const CvStudyReport study = run_cv_study(config, o.threads);
  write_cv_csv(study, o.out);
  const Json report{
      {"config", to_json(config)},
      {"reference_prior",
       Json{{"mu0", "0"}, {"Lambda0", std::to_string(config.prior.lambda_ref) + " * I"},
            {"a0", config.prior.a0}, {"b0", config.prior.b0}}},
      {"models", Json{{"A", "factorial: one indicator per condition (16 columns)"},
                      {"B", "parametric: [1, PM_left, PM_right]"}}},
      {"out", o.out},
      {"mean_delta_cvlme", study.mean_delta_lme},
      {"mean_delta_acc", study.mean_delta_acc},
      {"mean_delta_com", study.mean_delta_com},
      {"fraction_cvlme_favors_b", study.fraction_lme_favors_b},
      {"fraction_com_favors_b", study.fraction_com_favors_b}};
  out << report.dump(2) << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normal-gamma KL divergences and Bayesian GLM model selection"};
  app.name("ngkl");
  app.require_subcommand(1, 1);

  KlOptions kl;
  auto* kl_cmd = app.add_subcommand("kl", "Closed-form KL divergence KL(p || q)");
  kl_cmd->add_option("family", kl.family, "mvn, gamma or ng")
      ->required()
      ->check(CLI::IsMember({"mvn", "gamma", "ng"}));
  kl_cmd->add_option("--p", kl.p_spec, "Parameters of p: key=value list, inline JSON or file")
      ->required();
  kl_cmd->add_option("--q", kl.q_spec, "Parameters of q")->required();
  kl_cmd->add_flag("--check", kl.check, "Compare against a Monte Carlo estimate at 3 SE");
  kl_cmd->add_option("--mc-samples", kl.mc_samples, "Monte Carlo sample count")
      ->capture_default_str();
  kl_cmd->add_option("--seed", kl.seed, "Random seed")->capture_default_str();
  kl_cmd->add_option("--threads", kl.threads, "Worker threads (0 = hardware)");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the conjugate GLM and report Acc, Com and LME");
  fit_cmd->add_option("--data", fit.data_path, "JSON with y, X and optional P")->required();
  fit_cmd->add_option("--prior", fit.prior_path, "JSON with mu0, Lambda0, a0, b0")->required();
  fit_cmd->add_option("--posterior-out", fit.posterior_out,
                      "Write the posterior in prior-file format");

  SweepOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Polynomial order sweep");
  sweep_cmd->add_option("--config", sweep.config_path, "Flat JSON config");
  sweep_cmd->add_option("--out", sweep.out, "CSV output path")->required();
  sweep_cmd->add_option("--seed", sweep.seed, "Overrides master_seed");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = hardware)");

  CvOptions cv;
  auto* cv_cmd = app.add_subcommand("cv-study", "Cross-validated comparison of two designs");
  cv_cmd->add_option("--config", cv.config_path, "Flat JSON config");
  cv_cmd->add_option("--out", cv.out, "CSV output path")->required();
  cv_cmd->add_option("--seed", cv.seed, "Overrides master_seed");
  cv_cmd->add_option("--threads", cv.threads, "Worker threads (0 = hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "ngkl: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*kl_cmd) return cmd_kl(kl, out);
    if (*fit_cmd) return cmd_fit(fit, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out);
    return cmd_cv_study(cv, out);
  } catch (const RankDeficientError& e) {
    err << "ngkl: rank-deficient design: " << e.what() << '\n';
    return kRankDeficient;
  } catch (const NumericalError& e) {
    if (*fit_cmd) {
      err << "ngkl: non-positive posterior rate: " << e.what() << '\n';
      return kNonPositiveRate;
    }
    err << "ngkl: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "ngkl: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace ngkl::cli
