#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ngkl/divergence.hpp"
#include "oracles.hpp"

using namespace ngkl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

MvNormalParams random_mvn(std::mt19937_64& gen, Eigen::Index k) {
  return MvNormalParams(oracle::random_vector(gen, k), SpdMatrix(oracle::random_spd(gen, k)));
}

GammaParams random_gamma(std::mt19937_64& gen) {
  return GammaParams(oracle::uniform(gen, 0.5, 6.0), oracle::uniform(gen, 0.5, 6.0));
}

NormalGammaParams random_ng(std::mt19937_64& gen, Eigen::Index k) {
  return NormalGammaParams(oracle::random_vector(gen, k), SpdMatrix(oracle::random_spd(gen, k)),
                           oracle::uniform(gen, 0.5, 6.0), oracle::uniform(gen, 0.5, 6.0));
}

void check_within_3se(double closed, const KlEstimate& mc) {
  CHECK_MESSAGE(std::abs(closed - mc.value) <= 3.0 * mc.standard_error,
                "closed form " << closed << ", Monte Carlo " << mc.value << " ± "
                               << mc.standard_error);
}

}  // namespace

TEST_CASE("kl_mvn examples") {
  std::mt19937_64 gen(1);
  const MvNormalParams p = random_mvn(gen, 3);
  CHECK(kl_mvn(p, p) == 0.0);

  const MvNormalParams a(vec({0.0}), SpdMatrix::identity(1));
  const MvNormalParams b(vec({1.0}), SpdMatrix::identity(1));
  CHECK(kl_mvn(a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(oracle::kl_normal_quadrature(0.0, 1.0, 1.0, 1.0) - 0.5) < 1e-10);

  // Unequal variances against quadrature.
  const MvNormalParams c(vec({0.2}), SpdMatrix(Matrix::Constant(1, 1, 1.0 / 0.7)));
  const MvNormalParams d(vec({-0.4}), SpdMatrix(Matrix::Constant(1, 1, 1.0 / 2.3)));
  CHECK(std::abs(kl_mvn(c, d) - oracle::kl_normal_quadrature(0.2, 0.7, -0.4, 2.3)) < 1e-10);

  CHECK_THROWS_AS(kl_mvn(a, random_mvn(gen, 2)), DimensionError);
}

TEST_CASE("kl_mvn matches Monte Carlo at k = 2") {
  std::mt19937_64 gen(2);
  const MvNormalParams p = random_mvn(gen, 2), q = random_mvn(gen, 2);
  check_within_3se(kl_mvn(p, q), kl_monte_carlo_mvn(p, q, 1'000'000, RngStream(2, 0)));
}

TEST_CASE("kl_gamma examples") {
  const GammaParams g11(1, 1), g21(2, 1), g22(2, 2);
  CHECK(kl_gamma(g22, g22) == 0.0);
  CHECK(kl_gamma(g11, g21) == doctest::Approx(oracle::kEulerGamma).epsilon(1e-13));
  CHECK(std::abs(kl_gamma(g11, g21) - oracle::kl_gamma_quadrature(1, 1, 2, 1)) < 1e-6);
  CHECK(std::abs(kl_gamma(g22, g11) - (std::log(2.0) - oracle::kEulerGamma)) < 1e-13);
  CHECK(kl_gamma(g22, g11) == doctest::Approx(0.1159315157).epsilon(1e-9));
  CHECK(std::abs(kl_gamma(g22, g11) - oracle::kl_gamma_quadrature(2, 2, 1, 1)) < 1e-6);

  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GammaParams p = random_gamma(gen), q = random_gamma(gen);
    CHECK(std::abs(kl_gamma(p, q) -
                   oracle::kl_gamma_quadrature(p.shape(), p.rate(), q.shape(), q.rate())) < 1e-8);
  }
}

TEST_CASE("kl_normal_gamma examples") {
  std::mt19937_64 gen(4);
  const NormalGammaParams p = random_ng(gen, 3);
  CHECK(kl_normal_gamma(p, p) == 0.0);

  const NormalGammaParams q(p.mu(), p.lambda(), 4.0, 0.7);
  CHECK(kl_normal_gamma(p, q) == kl_gamma(p.gamma(), q.gamma()));

  const NormalGammaParams r = random_ng(gen, 2), s = random_ng(gen, 2);
  check_within_3se(kl_normal_gamma(r, s), kl_monte_carlo_ng(r, s, 1'000'000, RngStream(4, 0)));
  CHECK_THROWS_AS(kl_normal_gamma(p, r), DimensionError);
}

TEST_CASE("expected_conditional_mvn_kl") {
  std::mt19937_64 gen(5);
  const NormalGammaParams p = random_ng(gen, 3);
  const NormalGammaParams same_normal(p.mu(), p.lambda(), 3.0, 9.0);
  CHECK(expected_conditional_mvn_kl(p, same_normal) == 0.0);

  const NormalGammaParams q = random_ng(gen, 3);
  CHECK(std::abs(kl_normal_gamma(p, q) -
                 (expected_conditional_mvn_kl(p, q) + kl_gamma(p.gamma(), q.gamma()))) < 1e-12);

  // E_y[KL(N(μ1, (yΛ1)⁻¹) || N(μ2, (yΛ2)⁻¹))] by sampling y ~ Gam(a1, b1).
  RngStream rng(5, 0);
  const int n = 100'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = sample_gamma(p.gamma(), rng);
    const double v = kl_mvn(p.conditional(y), q.conditional(y));
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1));
  CHECK(std::abs(expected_conditional_mvn_kl(p, q) - mean) <= 3.0 * se);
}

TEST_CASE("kl_monte_carlo estimator contract") {
  const MvNormalParams a(vec({0.0}), SpdMatrix::identity(1));
  const MvNormalParams b(vec({1.0}), SpdMatrix::identity(1));

  const KlEstimate self = kl_monte_carlo_mvn(a, a, 10'000, RngStream(1, 1));
  CHECK(std::abs(self.value) <= 3.0 * self.standard_error);
  CHECK(self.sample_count == 10'000);

  check_within_3se(0.5, kl_monte_carlo_mvn(a, b, 200'000, RngStream(1, 2)));

  CHECK_THROWS_AS(kl_monte_carlo_mvn(a, b, 99, RngStream(1, 3)), std::invalid_argument);
}

TEST_CASE("kl_monte_carlo is independent of the worker count") {
  std::mt19937_64 gen(6);
  const NormalGammaParams p = random_ng(gen, 3), q = random_ng(gen, 3);
  const RngStream rng(77, 0);
  const KlEstimate one = kl_monte_carlo_ng(p, q, 50'000, rng, 1);
  const KlEstimate four = kl_monte_carlo_ng(p, q, 50'000, rng, 4);
  CHECK(one.value == four.value);
  CHECK(one.standard_error == four.standard_error);
}

TEST_CASE("kl_monte_carlo reports non-finite log densities") {
  std::size_t calls = 0;
  auto logpdf_q = [&](double y) {
    return y > 0.999 ? -std::numeric_limits<double>::infinity() : 0.0;
  };
  try {
    (void)kl_monte_carlo<double>(
        [](double) { return 0.0; }, logpdf_q,
        [&](RngStream& r, double& out) {
          ++calls;
          out = r.uniform();
        },
        100'000, RngStream(3, 3), 1);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("sample") != std::string::npos);
    CHECK(msg.find("y=0.99") != std::string::npos);
  }
}

TEST_CASE("closed forms are non-negative on random pairs") {
  std::mt19937_64 gen(7);
  for (Eigen::Index k : {1, 2, 5}) {
    for (int trial = 0; trial < 1000; ++trial) {
      CHECK(kl_mvn(random_mvn(gen, k), random_mvn(gen, k)) >= -1e-10);
      CHECK(kl_normal_gamma(random_ng(gen, k), random_ng(gen, k)) >= -1e-10);
    }
  }
  for (int trial = 0; trial < 1000; ++trial) {
    CHECK(kl_gamma(random_gamma(gen), random_gamma(gen)) >= -1e-10);
  }
}

TEST_CASE("identity of indiscernibles and the chain rule") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index k = 1 + trial % 5;
    const MvNormalParams m = random_mvn(gen, k);
    const GammaParams g = random_gamma(gen);
    const NormalGammaParams p = random_ng(gen, k), q = random_ng(gen, k);
    CHECK(kl_mvn(m, m) == 0.0);
    CHECK(kl_gamma(g, g) == 0.0);
    CHECK(kl_normal_gamma(p, p) == 0.0);
    CHECK(std::abs(kl_normal_gamma(p, q) -
                   (expected_conditional_mvn_kl(p, q) + kl_gamma(p.gamma(), q.gamma()))) < 1e-12);
  }
}

TEST_CASE("KL is asymmetric") {
  const GammaParams g11(1, 1), g21(2, 1);
  CHECK(std::abs(kl_gamma(g11, g21) - kl_gamma(g21, g11)) > 0.1);
}

TEST_CASE("near-identical arguments never go meaningfully negative") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 200; ++trial) {
    const NormalGammaParams p = random_ng(gen, 4);
    Matrix l = p.lambda().matrix() * (1.0 + 1e-15);
    const NormalGammaParams q(p.mu(), SpdMatrix(l), p.shape(), p.rate());
    const double kl = kl_normal_gamma(p, q);
    CHECK(kl >= 0.0);
    CHECK(kl < 1e-10);
  }
}
