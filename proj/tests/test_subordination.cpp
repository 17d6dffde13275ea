#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "freeconv/subordination.hpp"

using namespace freeconv;

namespace {

CircleMeasure three_atoms() {
  return validate(atomic({{UnitAngle(0.0), 0.5}, {UnitAngle(2.0), 0.3}, {UnitAngle(4.5), 0.2}}));
}

CircleMeasure with_arc() {
  CircleMeasure m = atomic({{UnitAngle(1.0), 0.4}});
  m.ac = UniformArc{UnitAngle(3.0), 2.0, 0.6};
  return validate(m);
}

std::vector<Complex> sample_points(int n, double rmax, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Complex> pts;
  for (int i = 0; i < n; ++i) pts.push_back(std::polar(rmax * std::sqrt(u(rng)), kTwoPi * u(rng)));
  return pts;
}

}  // namespace

TEST_CASE("fixed point satisfies both subordination equations") {
  const Transform t1(three_atoms()), t2(with_arc());
  for (Complex z : sample_points(60, 0.99, 1)) {
    const auto s = solve_at(t1, t2, z);
    REQUIRE(s.converged);
    CHECK(std::abs(s.omega1 - z * t2.h(s.omega2)) < 1e-11);
    CHECK(std::abs(s.omega2 - z * t1.h(s.omega1)) < 1e-11);
    // η = η₁(ω₁) = η₂(ω₂) = ω₁ω₂/z
    CHECK(std::abs(s.eta - t1.eta(s.omega1)) < 1e-10);
    CHECK(std::abs(s.eta - t2.eta(s.omega2)) < 1e-10);
    if (std::abs(z) > 1e-3) CHECK(std::abs(s.eta - s.omega1 * s.omega2 / z) < 1e-10);
    CHECK(std::abs(s.omega1) <= std::abs(z) * (1 + 1e-12));
    CHECK(std::abs(s.omega2) <= std::abs(z) * (1 + 1e-12));
  }
}

TEST_CASE("the unit point mass is neutral") {
  const CircleMeasure m = with_arc();
  const Transform t1(point_mass(UnitAngle(0.0))), t2(m);
  for (Complex z : sample_points(30, 0.95, 2)) {
    const auto s = solve_at(t1, t2, z);
    CHECK(std::abs(s.eta - t2.eta(z)) < 1e-11);
  }
}

TEST_CASE("Haar absorbs everything") {
  const Transform t1(haar()), t2(three_atoms());
  for (Complex z : sample_points(20, 0.95, 3)) CHECK(std::abs(solve_at(t1, t2, z).eta) < 1e-14);
}

TEST_CASE("swapping the factors swaps the subordination functions") {
  const Transform t1(three_atoms()), t2(with_arc());
  for (Complex z : sample_points(30, 0.98, 4)) {
    const auto a = solve_at(t1, t2, z);
    const auto b = solve_at(t2, t1, z);
    CHECK(std::abs(a.eta - b.eta) < 1e-10);
    CHECK(std::abs(a.omega1 - b.omega2) < 1e-10);
  }
}

TEST_CASE("first moments multiply") {
  // η(z) = m₁z + O(z²), and m₁ is multiplicative under the convolution.
  const double p = 0.7, q = 0.6, a = 2 * p - 1, b = 2 * q - 1;
  const Transform t1(bernoulli(p)), t2(bernoulli(q));
  const Complex z = 1e-4;
  const auto s = solve_at(t1, t2, z);
  CHECK(std::abs(s.eta / z - a * b) < 1e-3);
}

TEST_CASE("residuals decrease in the tail") {
  const Transform t1(three_atoms()), t2(three_atoms());
  SolverOptions opt;
  for (Complex z : sample_points(20, 0.999, 5)) {
    const auto s = iterate_fixed_point(t1, t2, z, 0.0, opt);
    REQUIRE(s.converged);
    CHECK(s.residual < opt.tol);
    for (std::size_t i = 1; i < s.residual_tail.size(); ++i)
      CHECK(s.residual_tail[i] <= s.residual_tail[i - 1] * (1 + 1e-9) + 1e-15);
  }
}

TEST_CASE("ray solution warm starts along the schedule") {
  const Transform t1(three_atoms()), t2(with_arc());
  const auto schedule = RadialSchedule::geometric(2, 20);
  const auto ray = solve_ray(t1, t2, UnitAngle(0.7), schedule);
  REQUIRE(ray.size() == schedule.radii.size());
  for (std::size_t i = 0; i < ray.size(); ++i) {
    CHECK(ray[i].converged);
    CHECK(std::abs(ray[i].z) == doctest::Approx(schedule.radii[i]));
    const auto cold = solve_at(t1, t2, ray[i].z);
    CHECK(std::abs(cold.eta - ray[i].eta) < 1e-9);
  }
}
