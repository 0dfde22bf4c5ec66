#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ngkl/bayes_glm.hpp"
#include "ngkl/distributions.hpp"
#include "ngkl/experiments.hpp"

namespace ngkl::cli {

using Json = nlohmann::ordered_json;

/// Malformed input or flags; mapped to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts inline JSON (`{...}`), a path to a JSON file, or `key=value,...`
/// with numeric scalars.
Json load_spec(const std::string& spec);
Json load_file(const std::string& path);

GammaParams gamma_from_json(const Json& doc);
MvNormalParams mvn_from_json(const Json& doc);
NormalGammaParams ng_from_json(const Json& doc);

Json to_json(const GammaParams& g);
Json to_json(const MvNormalParams& m);
Json to_json(const NormalGammaParams& ng);

struct DataDocument {
  GlmDataset dataset;
  bool noise_precision_assumed = false;
};
DataDocument dataset_from_json(const Json& doc);

/// Prior schema {"mu0", "Lambda0", "a0", "b0"}.
NormalGammaParams prior_from_json(const Json& doc);
Json prior_to_json(const NormalGammaParams& prior);

PolySweepConfig sweep_config_from_json(const Json& doc);
Json to_json(const PolySweepConfig& config);

CvStudyConfig cv_config_from_json(const Json& doc);
Json to_json(const CvStudyConfig& config);

Json to_json(const Vector& v);
Json to_json(const Matrix& m);

}  // namespace ngkl::cli
