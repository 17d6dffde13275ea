#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "freeconv/error.hpp"
#include "freeconv/herglotz.hpp"

using namespace freeconv;

namespace {

// ψ(z) = Σ_{n≥1} m_n z^n, summed directly from the moments.
Complex psi_series(const CircleMeasure& m, Complex z, int terms = 400) {
  Complex sum = 0.0, zn = 1.0;
  for (int n = 1; n <= terms; ++n) {
    zn *= z;
    sum += moment(m, n) * zn;
  }
  return sum;
}

CircleMeasure arc_measure() {
  CircleMeasure m = atomic({{UnitAngle(1.0), 0.25}, {UnitAngle(4.0), 0.25}});
  m.ac = UniformArc{UnitAngle(2.0), 1.5, 0.5};
  return validate(m);
}

CircleMeasure grid_measure() {
  CircleMeasure m;
  m.ac = sample_density([](double t) { return 1.0 + 0.8 * std::sin(2 * t); }, 1.0, 128);
  return validate(m);
}

}  // namespace

TEST_CASE("psi of atoms has the closed form") {
  const double p = 0.3;
  const Transform t(bernoulli(p));
  for (Complex z : {Complex(0.2, 0.1), Complex(-0.6, 0.3), Complex(0.0, 0.95)}) {
    const Complex ref = p * z / (1.0 - z) - (1.0 - p) * z / (1.0 + z);
    CHECK(std::abs(t.psi(z) - ref) < 1e-14);
    CHECK(std::abs(t.eta(z) - ref / (1.0 + ref)) < 1e-14);
  }
}

TEST_CASE("h of a Bernoulli measure is a Mobius map") {
  // For p·δ_1 + (1 − p)·δ_{−1}: η(z) = z(2p − 1 + z)/(1 + (2p − 1)z), so h = (a + z)/(1 + a z), a = 2p − 1.
  const double p = 0.8, a = 2 * p - 1;
  const Transform t(bernoulli(p));
  for (Complex z : {Complex(0.0, 0.0), Complex(1e-9, 0.0), Complex(0.5, -0.4), Complex(-0.3, 0.9)}) {
    CHECK(std::abs(t.h(z) - (a + z) / (1.0 + a * z)) < 1e-13);
    const Jet j = t.h_jet(z);
    CHECK(std::abs(j.derivative - (1.0 - a * a) / ((1.0 + a * z) * (1.0 + a * z))) < 1e-11);
  }
}

TEST_CASE("transforms match the moment series") {
  for (const CircleMeasure& m : {arc_measure(), grid_measure(), haar()}) {
    const Transform t(m);
    for (Complex z : {Complex(0.3, 0.2), Complex(-0.5, 0.1), Complex(1e-6, 2e-6), Complex(0.0, -0.6)}) {
      const Complex ref = psi_series(m, z);
      CHECK(std::abs(t.psi(z) - ref) < 1e-12);
      if (std::abs(z) > 0) CHECK(std::abs(t.h(z) - ref / (1.0 + ref) / z) < 1e-10);
    }
    CHECK(std::abs(t.first_moment() - moment(m, 1)) < 1e-14);
  }
}

TEST_CASE("real part of psi stays above -1/2 and |eta| below |z|") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Transform t(arc_measure());
  for (int i = 0; i < 500; ++i) {
    const Complex z = std::polar(std::sqrt(u(rng)) * 0.999, kTwoPi * u(rng));
    CHECK(t.psi(z).real() > -0.5);
    CHECK(std::abs(t.eta(z)) <= std::abs(z) * (1 + 1e-12));
  }
}

TEST_CASE("evaluation outside the open disk is rejected") {
  const Transform t(bernoulli(0.5));
  CHECK_THROWS_AS(t.psi(Complex(1.0, 0.0)), EvaluationOutsideDisk);
  CHECK_THROWS_AS(t.h(Complex(0.8, 0.8)), EvaluationOutsideDisk);
}

TEST_CASE("schedule construction") {
  const auto s = RadialSchedule::geometric(3, 6);
  REQUIRE(s.radii.size() == 4);
  CHECK(s.radii.front() == doctest::Approx(0.875));
  CHECK(s.radii.back() == doctest::Approx(1.0 - 1.0 / 64));
  CHECK_NOTHROW(s.check());
}

TEST_CASE("boundary density recovers the absolutely continuous part") {
  const auto schedule = RadialSchedule::standard();
  SUBCASE("uniform arc") {
    const Transform t(arc_measure());
    auto psi = [&](Complex z) { return t.psi(z); };
    const auto inside = poisson_density(psi, UnitAngle(2.7), schedule);
    CHECK(inside.status == LimitStatus::Converged);
    CHECK(inside.value == doctest::Approx(0.5 / 1.5).epsilon(1e-6));
    const auto outside = poisson_density(psi, UnitAngle(5.5), schedule);
    CHECK(std::abs(outside.value) < 1e-6);
  }
  SUBCASE("grid cell centres") {
    const CircleMeasure m = grid_measure();
    const Transform t(m);
    auto psi = [&](Complex z) { return t.psi(z); };
    const auto& g = std::get<DensityGrid>(m.ac);
    for (std::size_t k : {0u, 17u, 64u, 101u}) {
      const auto lim = poisson_density(psi, g.center(k), schedule);
      CHECK(lim.value == doctest::Approx(g.values[k]).epsilon(1e-6));
    }
  }
  SUBCASE("Haar") {
    auto psi = [](Complex) { return Complex(0.0); };
    CHECK(poisson_density(psi, UnitAngle(1.0), schedule).value == doctest::Approx(1.0 / kTwoPi));
  }
}

TEST_CASE("radial atom mass and divergence at atoms") {
  const auto schedule = RadialSchedule::standard();
  const Transform t(arc_measure());
  auto psi = [&](Complex z) { return t.psi(z); };
  CHECK(radial_atom_mass(psi, UnitAngle(1.0), schedule) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(radial_atom_mass(psi, UnitAngle(4.0), schedule) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(radial_atom_mass(psi, UnitAngle(3.0), schedule) < 1e-6);
  CHECK(poisson_density(psi, UnitAngle(1.0), schedule).status == LimitStatus::Divergent);
}

TEST_CASE("extrapolation of a quadratic in 1 - r is exact") {
  const auto s = RadialSchedule::geometric(4, 12);
  std::vector<double> f;
  for (double r : s.radii) f.push_back(2.0 + 3.0 * (1 - r) - 5.0 * (1 - r) * (1 - r));
  const auto lim = extrapolate_limit(s.radii, f);
  CHECK(lim.status == LimitStatus::Converged);
  CHECK(lim.value == doctest::Approx(2.0).epsilon(1e-12));
}
