#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "freeconv/convolution.hpp"
#include "freeconv/error.hpp"
#include "freeconv/series.hpp"

using namespace freeconv;

namespace {

double distance(const FormalSeries& a, const FormalSeries& b) {
  double d = 0.0;
  for (std::size_t k = 0; k <= std::max(a.order(), b.order()); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

FormalSeries random_series(std::mt19937_64& rng, std::size_t order, bool zero_constant) {
  std::normal_distribution<double> n(0.0, 1.0);
  FormalSeries f(order);
  for (std::size_t k = 0; k <= order; ++k) f[k] = Complex(n(rng), n(rng)) / double(k + 1);
  if (zero_constant) f[0] = 0.0;
  return f;
}

// Second moment of uv for free unitaries u, v, from the free mixed-moment formula.
Complex second_moment(const CircleMeasure& a, const CircleMeasure& b) {
  const Complex a1 = moment(a, 1), a2 = moment(a, 2), b1 = moment(b, 1), b2 = moment(b, 2);
  // φ(uvuv) = a2 b1² + a1² b2 − a1² b1² for free u, v.
  return a2 * b1 * b1 + a1 * a1 * b2 - a1 * a1 * b1 * b1;
}

}  // namespace

TEST_CASE("series arithmetic") {
  std::mt19937_64 rng(5);
  const std::size_t n = 12;
  const auto f = random_series(rng, n, false);
  const auto g = random_series(rng, n, true);
  auto unit_f = f;
  unit_f[0] = 2.0;
  CHECK(distance(unit_f * unit_f.reciprocal(), FormalSeries::constant(1.0, n)) < 1e-10);
  CHECK(distance((f + g) - g, f) < 1e-14);

  // (1 − x)⁻¹ = Σ xᵏ
  FormalSeries one_minus_x(n);
  one_minus_x[0] = 1.0;
  one_minus_x[1] = -1.0;
  const auto geo = one_minus_x.reciprocal();
  for (std::size_t k = 0; k <= n; ++k) CHECK(std::abs(geo[k] - 1.0) < 1e-14);

  CHECK(distance(FormalSeries::identity(n).compose(g), g) < 1e-14);
  const auto d = f.derivative();
  for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(d[k] - double(k + 1) * f[k + 1]) < 1e-14);
  CHECK(distance(g.shift_down(), FormalSeries([&] {
                   std::vector<Complex> c;
                   for (std::size_t k = 1; k <= n; ++k) c.push_back(g[k]);
                   return c;
                 }())) < 1e-15);
}

TEST_CASE("reversion is an involution and a compositional inverse") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_series(rng, 16, true);
    f[1] = Complex(1.0 + trial * 0.1, 0.3);
    const auto g = f.revert();
    CHECK(distance(f.compose(g), FormalSeries::identity(16)) < 1e-9);
    CHECK(distance(g.compose(f), FormalSeries::identity(16)) < 1e-9);
    CHECK(distance(g.revert(), f) < 1e-8);
  }
}

TEST_CASE("psi and eta series") {
  const CircleMeasure m = bernoulli(0.7);
  const auto psi = psi_series(m, 6);
  CHECK(psi[0] == Complex(0.0));
  for (std::size_t k = 1; k <= 6; ++k) CHECK(std::abs(psi[k] - moment(m, int(k))) < 1e-15);
  const auto eta = eta_series(m, 6);
  // h = (a + z)/(1 + a z) with a = 0.4, so η = z h.
  const double a = 0.4;
  FormalSeries h(6);
  for (std::size_t k = 0; k <= 5; ++k) h[k] = k == 0 ? Complex(a) : (1 - a * a) * std::pow(-a, double(k - 1));
  for (std::size_t k = 1; k <= 6; ++k) CHECK(std::abs(eta[k] - h[k - 1]) < 1e-14);
}

TEST_CASE("oracle: unit mass is neutral and low moments follow freeness") {
  const CircleMeasure a = validate(atomic({{UnitAngle(0.3), 0.5}, {UnitAngle(2.0), 0.3}, {UnitAngle(4.5), 0.2}}));
  const CircleMeasure b = validate(atomic({{UnitAngle(1.0), 0.6}, {UnitAngle(5.0), 0.4}}));

  const auto unit = boxtimes_moments(point_mass(UnitAngle(0.0)), a, 8);
  for (std::size_t k = 1; k <= 8; ++k) CHECK(std::abs(unit(k) - moment(a, int(k))) < 1e-12);

  const auto ab = boxtimes_moments(a, b, 8);
  const auto ba = boxtimes_moments(b, a, 8);
  CHECK(std::abs(ab(1) - moment(a, 1) * moment(b, 1)) < 1e-14);
  CHECK(std::abs(ab(2) - second_moment(a, b)) < 1e-12);
  for (std::size_t k = 1; k <= 8; ++k) CHECK(std::abs(ab(k) - ba(k)) < 1e-12);
  for (std::size_t k = 1; k <= 8; ++k) CHECK(std::abs(ab(k)) <= 1.0 + 1e-9);
}

TEST_CASE("oracle needs nonzero first moments") {
  CHECK_THROWS_AS(boxtimes_moments(bernoulli(0.5), bernoulli(0.7), 4), ZeroFirstMoment);
  CHECK_THROWS_AS(boxtimes_moments(haar(), bernoulli(0.7), 4), ZeroFirstMoment);
}

TEST_CASE("oracle agrees with the subordination solver") {
  const CircleMeasure a = validate(atomic({{UnitAngle(0.3), 0.5}, {UnitAngle(2.0), 0.3}, {UnitAngle(4.5), 0.2}}));
  CircleMeasure b = atomic({{UnitAngle(1.0), 0.45}});
  b.ac = UniformArc{UnitAngle(3.0), 2.0, 0.55};
  b = validate(b);
  ConvolutionOptions o;
  o.grid_size = 1024;
  const auto r = convolve(a, b, o);
  CHECK(compare_moments(r, boxtimes_moments(a, b, 8)) < 1e-5);
}
