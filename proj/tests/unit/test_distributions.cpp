#include <doctest.h>

#include <cmath>
#include <random>

#include "ngkl/distributions.hpp"
#include "oracles.hpp"

using namespace ngkl;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

SpdMatrix scalar_spd(double v) { return SpdMatrix(Matrix::Constant(1, 1, v)); }

MvNormalParams normal1(double mean, double precision) {
  return MvNormalParams(vec({mean}), scalar_spd(precision));
}

}  // namespace

TEST_CASE("parameter records validate their invariants") {
  CHECK_THROWS_AS(GammaParams(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(GammaParams(1.0, -2.0), ParameterError);
  CHECK_THROWS_AS(MvNormalParams(vec({0.0, 1.0}), SpdMatrix::identity(3)), DimensionError);
  CHECK_THROWS_AS(NormalGammaParams(vec({0.0}), SpdMatrix::identity(1), 1.0, 0.0),
                  ParameterError);
  CHECK_THROWS_AS(NormalGammaParams(vec({0.0}), SpdMatrix::identity(2), 1.0, 1.0),
                  DimensionError);
}

TEST_CASE("logpdf_mvn") {
  CHECK(logpdf_mvn(vec({0.0}), normal1(0.0, 1.0)) ==
        doctest::Approx(-0.5 * kLn2Pi).epsilon(1e-15));
  CHECK(-0.5 * kLn2Pi == doctest::Approx(-0.9189385332).epsilon(1e-10));

  const MvNormalParams two(vec({0.3, -1.2}), SpdMatrix::identity(2));
  CHECK(logpdf_mvn(vec({0.3, -1.2}), two) == doctest::Approx(-kLn2Pi).epsilon(1e-15));

  const MvNormalParams narrow = normal1(0.0, 4.0);
  const double expected = 0.5 * std::log(4.0) - 0.5 * kLn2Pi - 2.0;
  CHECK(logpdf_mvn(vec({1.0}), narrow) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(std::exp(logpdf_mvn(vec({1.0}), narrow)) ==
        doctest::Approx(oracle::normal_pdf(1.0, 0.0, 0.25)).epsilon(1e-13));
  const double mass = oracle::integrate(
      [&](double x) { return std::exp(logpdf_mvn(vec({x}), narrow)); }, -5.0, 5.0);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(logpdf_mvn(vec({0.0, 0.0}), narrow), DimensionError);
}

TEST_CASE("logpdf_mvn matches the covariance-form density") {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix cov = oracle::random_spd(gen, 3);
    const Vector mean = oracle::random_vector(gen, 3);
    const Vector x = oracle::random_vector(gen, 3);
    const auto params = MvNormalParams::from_covariance(mean, cov);
    const Vector d = x - mean;
    const double ref = -0.5 * std::log(oracle::cofactor_determinant(cov)) - 1.5 * kLn2Pi -
                       0.5 * d.dot(cov.ldlt().solve(d));
    CHECK(logpdf_mvn(x, params) == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("logpdf_gamma") {
  CHECK(logpdf_gamma(1.0, GammaParams(1, 1)) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(logpdf_gamma(2.0, GammaParams(1, 1)) == doctest::Approx(-2.0).epsilon(1e-15));
  const GammaParams g(2.0, 3.0);
  CHECK(logpdf_gamma(1.5, g) ==
        doctest::Approx(2.0 * std::log(3.0) + std::log(1.5) - 4.5).epsilon(1e-14));
  const double mass =
      oracle::integrate_half_line([&](double y) { return std::exp(logpdf_gamma(y, g)); });
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(logpdf_gamma(0.0, g), DomainError);
  CHECK_THROWS_AS(logpdf_gamma(-1.0, g), DomainError);
  // a < 1 diverges at 0 but stays finite for any y > 0.
  CHECK(std::isfinite(logpdf_gamma(1e-300, GammaParams(0.5, 1.0))));
}

TEST_CASE("logpdf_ng decomposes into conditional normal and gamma") {
  const NormalGammaParams unit(vec({0.0}), SpdMatrix::identity(1), 1.0, 1.0);
  CHECK(logpdf_ng(vec({0.0}), 1.0, unit) ==
        doctest::Approx(-0.5 * kLn2Pi - 1.0).epsilon(1e-15));

  std::mt19937_64 gen(31);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index k = 1 + trial % 4;
    const NormalGammaParams p(oracle::random_vector(gen, k), SpdMatrix(oracle::random_spd(gen, k)),
                              oracle::uniform(gen, 0.3, 5.0), oracle::uniform(gen, 0.3, 5.0));
    const Vector x = oracle::random_vector(gen, k, 2.0);
    const double y = oracle::uniform(gen, 0.05, 4.0);
    const double split = logpdf_mvn(x, p.conditional(y)) + logpdf_gamma(y, p.gamma());
    CHECK(std::abs(logpdf_ng(x, y, p) - split) < 1e-12);
  }
  CHECK_THROWS_AS(logpdf_ng(vec({0.0}), 0.0, unit), DomainError);
}

TEST_CASE("normal-gamma density integrates to one (k = 1)") {
  const NormalGammaParams p(vec({0.7}), scalar_spd(2.0), 2.5, 1.5);
  const double mass = oracle::integrate_half_line([&](double y) {
    const double sd = 1.0 / std::sqrt(y * 2.0);
    return oracle::integrate([&](double x) { return std::exp(logpdf_ng(vec({x}), y, p)); },
                             0.7 - 10.0 * sd, 0.7 + 10.0 * sd);
  });
  CHECK(std::abs(mass - 1.0) < 1e-4);
}

TEST_CASE("sample_gamma moments") {
  struct Case {
    double a, b, tol;
  };
  for (const Case c : {Case{1.0, 1.0, 0.005}, Case{3.0, 2.0, 0.01}, Case{0.5, 2.0, 0.005}}) {
    RngStream rng(42, 0);
    const GammaParams g(c.a, c.b);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += sample_gamma(g, rng);
    CHECK_MESSAGE(std::abs(sum / n - c.a / c.b) < c.tol, "a=" << c.a << " b=" << c.b);
  }
}

TEST_CASE("samplers are deterministic per stream") {
  const GammaParams g(2.0, 1.0);
  const MvNormalParams m(vec({1.0, 2.0}), SpdMatrix::identity(2).scaled(3.0));
  const NormalGammaParams ng(vec({0.0, 1.0}), SpdMatrix::identity(2), 2.0, 3.0);
  RngStream a(7, 3), b(7, 3), c(7, 4);
  bool any_difference = false;
  for (int i = 0; i < 100; ++i) {
    const double ga = sample_gamma(g, a), gb = sample_gamma(g, b), gc = sample_gamma(g, c);
    CHECK(ga == gb);
    any_difference = any_difference || ga != gc;
    CHECK(sample_mvn(m, a) == sample_mvn(m, b));
    const NgSample sa = sample_ng(ng, a), sb = sample_ng(ng, b);
    CHECK(sa.x == sb.x);
    CHECK(sa.y == sb.y);
    (void)sample_mvn(m, c);
    (void)sample_ng(ng, c);
  }
  CHECK(any_difference);
}

TEST_CASE("derived streams depend only on identifiers") {
  RngStream parent(1, 2);
  const RngStream before = parent.derive(5);
  for (int i = 0; i < 10; ++i) (void)parent.next_u64();
  RngStream after = parent.derive(5);
  RngStream fresh = RngStream(1, 2).derive(5);
  CHECK(after.stream() == before.stream());
  CHECK(after.next_u64() == fresh.next_u64());
  CHECK(parent.derive(6).stream() != before.stream());
}

TEST_CASE("sample_mvn moments") {
  RngStream rng(8, 0);
  const int n = 1'000'000;
  {
    const MvNormalParams p = normal1(5.0, 1.0);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_mvn(p, rng)[0];
    CHECK(std::abs(sum / n - 5.0) < 0.005);
  }
  {
    const MvNormalParams p(Vector::Zero(2), SpdMatrix::identity(2));
    Matrix second = Matrix::Zero(2, 2);
    Vector x;
    for (int i = 0; i < n; ++i) {
      sample_mvn(p, rng, x);
      second += x * x.transpose();
    }
    second /= n;
    CHECK((second - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.01);
  }
  {
    Matrix cov(2, 2);
    cov << 2.0, 0.6, 0.6, 0.5;
    const auto p = MvNormalParams::from_covariance(vec({1.0, -1.0}), cov);
    Vector mean = Vector::Zero(2);
    Matrix second = Matrix::Zero(2, 2);
    Vector x;
    const int m = 400'000;
    for (int i = 0; i < m; ++i) {
      sample_mvn(p, rng, x);
      mean += x;
      second += (x - p.mean()) * (x - p.mean()).transpose();
    }
    CHECK((mean / m - p.mean()).cwiseAbs().maxCoeff() < 0.01);
    CHECK((second / m - cov).cwiseAbs().maxCoeff() < 0.02);
  }
}

TEST_CASE("sample_ng moments") {
  RngStream rng(99, 1);
  const NormalGammaParams p(vec({0.0}), SpdMatrix::identity(1), 2.0, 2.0);
  const int n = 1'000'000;
  double sum_y = 0.0, sum_x = 0.0, sum_xx = 0.0;
  NgSample s;
  for (int i = 0; i < n; ++i) {
    sample_ng(p, rng, s);
    sum_y += s.y;
    sum_x += s.x[0];
    sum_xx += s.x[0] * s.x[0];
  }
  CHECK(std::abs(sum_y / n - 1.0) < 0.005);
  const double mean_x = sum_x / n;
  const double var_x = sum_xx / n - mean_x * mean_x;
  // Marginal of x is Student-t with variance b / ((a − 1)·Λ) = 2.
  CHECK(std::abs(var_x - 2.0) < 0.05 * 2.0);
}
