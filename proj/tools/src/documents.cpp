#include "documents.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include "ngkl/errors.hpp"

namespace ngkl::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw UsageError("field '" + key + "': expected a number, got '" + text + "'");
  return v;
}

Json parse_key_values(const std::string& spec) {
  Json doc = Json::object();
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw UsageError("parameter '" + trim(item) + "' is not of the form key=value");
    const std::string key = trim(item.substr(0, eq));
    if (key.empty()) throw UsageError("empty key in '" + spec + "'");
    if (doc.contains(key)) throw UsageError("field '" + key + "' given twice");
    doc[key] = parse_number(key, item.substr(eq + 1));
  }
  if (doc.empty()) throw UsageError("empty parameter specification");
  return doc;
}

Json parse_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(origin + ": invalid JSON (" + e.what() + ")");
  }
}

void require_object(const Json& doc, const char* what) {
  if (!doc.is_object()) throw UsageError(std::string(what) + ": expected a JSON object");
}

void reject_unknown(const Json& doc, std::initializer_list<const char*> known) {
  for (const auto& item : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw UsageError("unknown field '" + item.key() + "'");
  }
}

const Json& field(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw UsageError("missing field '" + std::string(key) + "'");
  return doc.at(key);
}

double real(const Json& v, const std::string& key) {
  if (!v.is_number()) throw UsageError("field '" + key + "': expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw UsageError("field '" + key + "': not finite");
  return x;
}

double real_field(const Json& doc, const char* key) { return real(field(doc, key), key); }

// Scalars stand in for length-1 vectors.
Vector vector_field(const Json& doc, const char* key, bool allow_empty = false) {
  const Json& v = field(doc, key);
  if (v.is_number()) return Vector::Constant(1, real(v, key));
  if (!v.is_array()) throw UsageError("field '" + std::string(key) + "': expected an array");
  if (v.empty() && !allow_empty)
    throw UsageError("field '" + std::string(key) + "': must not be empty");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = real(v[i], std::string(key) + "[" + std::to_string(i) + "]");
  return out;
}

// Row-major arrays of arrays; a scalar stands in for a 1x1 matrix.
Matrix matrix_field(const Json& doc, const char* key) {
  const Json& v = field(doc, key);
  if (v.is_number()) return Matrix::Constant(1, 1, real(v, key));
  const std::string name(key);
  if (!v.is_array() || v.empty())
    throw UsageError("field '" + name + "': expected a non-empty array of rows");
  const std::size_t cols = v[0].is_array() ? v[0].size() : 0;
  if (cols == 0) throw UsageError("field '" + name + "': rows must be non-empty arrays");
  Matrix out(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (!v[r].is_array() || v[r].size() != cols)
      throw UsageError("field '" + name + "': row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < cols; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          real(v[r][c], name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
  }
  return out;
}

SpdMatrix spd_field(const Json& doc, const char* key) {
  try {
    return SpdMatrix(matrix_field(doc, key));
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError("field '" + std::string(key) + "': " + e.what());
  }
}

template <class T>
T count_field(const Json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  const Json& v = doc.at(key);
  if (!v.is_number_integer())
    throw UsageError("field '" + std::string(key) + "': expected an integer");
  if constexpr (std::is_unsigned_v<T>) {
    if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
    const auto s = v.get<std::int64_t>();
    if (s < 0) throw UsageError("field '" + std::string(key) + "': must be non-negative");
    return static_cast<T>(s);
  } else {
    const auto s = v.get<std::int64_t>();
    if (s < std::numeric_limits<T>::min() || s > std::numeric_limits<T>::max())
      throw UsageError("field '" + std::string(key) + "': out of range");
    return static_cast<T>(s);
  }
}

double real_or(const Json& doc, const char* key, double fallback) {
  return doc.contains(key) ? real_field(doc, key) : fallback;
}

// Wraps constructor validation errors so they surface as usage errors.
template <class F>
auto build(const char* what, F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const RankDeficientError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

Json load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

Json load_spec(const std::string& spec) {
  const std::string t = trim(spec);
  if (t.empty()) throw UsageError("empty parameter specification");
  if (t.front() == '{') return parse_text(t, "inline parameters");
  std::error_code ec;
  if (std::filesystem::is_regular_file(t, ec)) return load_file(t);
  return parse_key_values(t);
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
  return out;
}

GammaParams gamma_from_json(const Json& doc) {
  require_object(doc, "gamma parameters");
  reject_unknown(doc, {"a", "b"});
  const double a = real_field(doc, "a");
  const double b = real_field(doc, "b");
  return build("gamma parameters", [&] { return GammaParams(a, b); });
}

MvNormalParams mvn_from_json(const Json& doc) {
  require_object(doc, "mvn parameters");
  reject_unknown(doc, {"mu", "Lambda", "Sigma"});
  Vector mu = vector_field(doc, "mu");
  const bool has_lambda = doc.contains("Lambda");
  if (has_lambda == doc.contains("Sigma"))
    throw UsageError("mvn parameters: give exactly one of 'Lambda' (precision) or 'Sigma' (covariance)");
  if (has_lambda) {
    SpdMatrix lambda = spd_field(doc, "Lambda");
    return build("mvn parameters", [&] { return MvNormalParams(std::move(mu), std::move(lambda)); });
  }
  const Matrix sigma = matrix_field(doc, "Sigma");
  return build("mvn parameters", [&] { return MvNormalParams::from_covariance(std::move(mu), sigma); });
}

NormalGammaParams ng_from_json(const Json& doc) {
  require_object(doc, "ng parameters");
  reject_unknown(doc, {"mu", "Lambda", "a", "b"});
  Vector mu = vector_field(doc, "mu");
  SpdMatrix lambda = spd_field(doc, "Lambda");
  const double a = real_field(doc, "a");
  const double b = real_field(doc, "b");
  return build("ng parameters",
               [&] { return NormalGammaParams(std::move(mu), std::move(lambda), a, b); });
}

Json to_json(const GammaParams& g) { return Json{{"a", g.shape()}, {"b", g.rate()}}; }

Json to_json(const MvNormalParams& m) {
  return Json{{"mu", to_json(m.mean())}, {"Lambda", to_json(m.precision().matrix())}};
}

Json to_json(const NormalGammaParams& ng) {
  return Json{{"mu", to_json(ng.mu())},
              {"Lambda", to_json(ng.lambda().matrix())},
              {"a", ng.shape()},
              {"b", ng.rate()}};
}

DataDocument dataset_from_json(const Json& doc) {
  require_object(doc, "data file");
  reject_unknown(doc, {"y", "X", "P"});
  Vector y = vector_field(doc, "y", true);
  if (y.size() == 0) throw UsageError("data file: 'y' is empty; at least one observation is required");
  Matrix x = matrix_field(doc, "X");
  if (!doc.contains("P"))
    return {build("data file", [&] { return GlmDataset(std::move(y), std::move(x)); }), true};
  SpdMatrix p = spd_field(doc, "P");
  return {build("data file",
                [&] { return GlmDataset(std::move(y), std::move(x), std::move(p)); }),
          false};
}

NormalGammaParams prior_from_json(const Json& doc) {
  require_object(doc, "prior file");
  reject_unknown(doc, {"mu0", "Lambda0", "a0", "b0"});
  Vector mu = vector_field(doc, "mu0");
  SpdMatrix lambda = spd_field(doc, "Lambda0");
  const double a = real_field(doc, "a0");
  const double b = real_field(doc, "b0");
  return build("prior file",
               [&] { return NormalGammaParams(std::move(mu), std::move(lambda), a, b); });
}

Json prior_to_json(const NormalGammaParams& prior) {
  return Json{{"mu0", to_json(prior.mu())},
              {"Lambda0", to_json(prior.lambda().matrix())},
              {"a0", prior.shape()},
              {"b0", prior.rate()}};
}

PolySweepConfig sweep_config_from_json(const Json& doc) {
  require_object(doc, "sweep config");
  reject_unknown(doc, {"n_simulations", "n_points", "p_true", "p_min", "p_max",
                       "noise_variance", "master_seed"});
  PolySweepConfig c;
  c.n_simulations = count_field(doc, "n_simulations", c.n_simulations);
  c.n_points = count_field(doc, "n_points", c.n_points);
  c.p_true = count_field(doc, "p_true", c.p_true);
  c.p_min = count_field(doc, "p_min", c.p_min);
  c.p_max = count_field(doc, "p_max", c.p_max);
  c.noise_variance = real_or(doc, "noise_variance", c.noise_variance);
  c.master_seed = count_field(doc, "master_seed", c.master_seed);
  return c;
}

Json to_json(const PolySweepConfig& c) {
  return Json{{"n_simulations", c.n_simulations}, {"n_points", c.n_points},
              {"p_true", c.p_true},               {"p_min", c.p_min},
              {"p_max", c.p_max},                 {"noise_variance", c.noise_variance},
              {"master_seed", c.master_seed}};
}

CvStudyConfig cv_config_from_json(const Json& doc) {
  require_object(doc, "cv-study config");
  reject_unknown(doc, {"n_replications", "n_sessions", "trials_per_condition", "noise_variance",
                       "generator", "master_seed", "lambda_ref", "a0", "b0"});
  CvStudyConfig c;
  c.n_replications = count_field(doc, "n_replications", c.n_replications);
  c.n_sessions = count_field(doc, "n_sessions", c.n_sessions);
  c.trials_per_condition = count_field(doc, "trials_per_condition", c.trials_per_condition);
  c.noise_variance = real_or(doc, "noise_variance", c.noise_variance);
  if (doc.contains("generator")) {
    const Json& g = doc.at("generator");
    if (!g.is_string()) throw UsageError("field 'generator': expected \"A\" or \"B\"");
    c.generator = build("field 'generator'", [&] { return cv_model_from_string(g.get<std::string>()); });
  }
  c.master_seed = count_field(doc, "master_seed", c.master_seed);
  c.prior.lambda_ref = real_or(doc, "lambda_ref", c.prior.lambda_ref);
  c.prior.a0 = real_or(doc, "a0", c.prior.a0);
  c.prior.b0 = real_or(doc, "b0", c.prior.b0);
  return c;
}

Json to_json(const CvStudyConfig& c) {
  return Json{{"n_replications", c.n_replications},
              {"n_sessions", c.n_sessions},
              {"trials_per_condition", c.trials_per_condition},
              {"noise_variance", c.noise_variance},
              {"generator", to_string(c.generator)},
              {"master_seed", c.master_seed},
              {"lambda_ref", c.prior.lambda_ref},
              {"a0", c.prior.a0},
              {"b0", c.prior.b0}};
}

}  // namespace ngkl::cli
