#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "freeconv/convolution.hpp"
#include "freeconv/error.hpp"
#include "freeconv/regularity.hpp"

using namespace freeconv;

namespace {

CircleMeasure three_atoms() {
  return validate(atomic({{UnitAngle(0.0), 0.5}, {UnitAngle(2.0), 0.3}, {UnitAngle(4.5), 0.2}}));
}

CircleMeasure spread(double big) {
  const double rest = (1.0 - big) / 3.0;
  return validate(atomic({{UnitAngle(0.0), big}, {UnitAngle(1.5), rest}, {UnitAngle(3.0), rest}, {UnitAngle(4.5), rest}}));
}

}  // namespace

TEST_CASE("verdicts follow the largest pair sum") {
  CHECK(classify(spread(0.4), spread(0.4)).verdict == Verdict::BoundedDensity);
  CHECK(classify(bernoulli(0.5), bernoulli(0.5)).verdict == Verdict::AbsolutelyContinuous);
  CHECK(classify(bernoulli(0.7), bernoulli(0.7)).verdict == Verdict::HasAtoms);

  const auto rep = classify(three_atoms(), bernoulli(0.8));
  CHECK(rep.verdict == Verdict::HasAtoms);
  CHECK(rep.max_pair_sum == doctest::Approx(1.3));
  REQUIRE(rep.predicted_atoms.size() == 2);
  CHECK(rep.predicted_atoms[0].mass == doctest::Approx(0.3));
  CHECK(rep.predicted_atoms[1].mass == doctest::Approx(0.1));
  // The 0.2 + 0.8 pair sits exactly at 1: a singular candidate but not an atom.
  CHECK(rep.critical_pairs.size() == 3);
  CHECK(rep.singular_candidates.size() == 3);
  CHECK(rep.singular_part_purely_atomic);
}

TEST_CASE("a measure with a continuous part has no critical pairs against small atoms") {
  CircleMeasure m = atomic({{UnitAngle(1.0), 0.4}});
  m.ac = UniformArc{UnitAngle(3.0), 2.0, 0.6};
  const auto rep = classify(validate(m), spread(0.55));
  CHECK(rep.critical_pairs.empty());
  CHECK(rep.verdict == Verdict::BoundedDensity);
}

TEST_CASE("point masses are rejected") {
  CHECK_THROWS_AS(classify(point_mass(UnitAngle(1.0)), haar()), PointMassInput);
  CHECK_THROWS_AS(critical_pairs(bernoulli(0.5), bernoulli(1.0)), PointMassInput);
}

TEST_CASE("singular set keeps equality points and drops nothing spurious") {
  // μ₁({0}) + μ₂({0}) = 1 exactly: η → 1 at the point 1.
  const CircleMeasure m1 = validate(atomic({{UnitAngle(0.0), 0.6}, {UnitAngle(2.0), 0.4}}));
  const CircleMeasure m2 = validate(atomic({{UnitAngle(0.0), 0.4}, {UnitAngle(3.0), 0.3}, {UnitAngle(5.0), 0.3}}));
  const auto checks = check_singular_candidates(m1, m2);
  REQUIRE(checks.size() == 1);
  CHECK(checks[0].status == SingularStatus::Confirmed);
  CHECK(checks[0].final_gap < 1e-4);
  for (std::size_t i = 1; i < checks[0].gaps.size(); ++i) CHECK(checks[0].gaps[i] <= checks[0].gaps[i - 1] * (1 + 1e-9));
  const auto set = singular_set(m1, m2);
  REQUIRE(set.size() == 1);
  CHECK(set[0].radians() == 0.0);
}

TEST_CASE("atoms of the product are singular points") {
  const auto set = singular_set(three_atoms(), bernoulli(0.8));
  CHECK(set.size() >= 2);
}

TEST_CASE("arc_mass sums quadrature nodes and atoms strictly inside the arc") {
  ConvolutionResult r;
  r.quadrature = {{0.5, 0.1}, {1.5, 0.2}, {3.0, 0.3}, {6.0, 0.05}};
  r.atoms.push_back({{UnitAngle(2.0), 0.35}, 0.35, true});
  CHECK(arc_mass(r, UnitAngle(1.0), UnitAngle(2.5)) == doctest::Approx(0.55));
  // Wraps through 0.
  CHECK(arc_mass(r, UnitAngle(5.0), UnitAngle(1.0)) == doctest::Approx(0.15));
  // Endpoint atoms are excluded.
  CHECK(arc_mass(r, UnitAngle(2.0), UnitAngle(4.0)) == doctest::Approx(0.3));
  // Equal endpoints mean the whole circle minus the point.
  CHECK(arc_mass(r, UnitAngle(4.0), UnitAngle(4.0)) == doctest::Approx(1.0));
}

TEST_CASE("arc positivity hypotheses") {
  ConvolutionOptions o;
  o.grid_size = 256;
  const auto r = convolve(bernoulli(0.7), bernoulli(0.7), o);
  CHECK_THROWS_AS(arc_positivity(bernoulli(0.7), bernoulli(0.7), r), HypothesisNotMet);

  const auto r2 = convolve(spread(0.4), spread(0.4), o);
  CHECK_THROWS_AS(arc_positivity(spread(0.4), spread(0.4), r2), PreconditionFailed);
}

TEST_CASE("arc positivity between two atoms of the product") {
  const CircleMeasure m1 = validate(atomic({{UnitAngle(0.0), 0.7}, {UnitAngle::from_pi_multiple(1.0), 0.3}}));
  const CircleMeasure m2 = validate(atomic({{UnitAngle(0.0), 0.5}, {UnitAngle::from_pi_multiple(1.0), 0.4},
                                            {UnitAngle::from_pi_multiple(0.5), 0.1}}));
  ConvolutionOptions o;
  o.grid_size = 512;
  const auto r = convolve(m1, m2, o);
  const auto arcs = arc_positivity(m1, m2, r);
  REQUIRE(arcs.size() == 2);
  double total = 0.0;
  for (const auto& a : arcs) {
    CHECK(a.positive);
    total += a.mass;
  }
  // Two atoms (0.2 at 0, 0.1 at π) sit on the arc endpoints.
  CHECK(total == doctest::Approx(0.7).epsilon(1e-4));
}

TEST_CASE("equality probe needs an exact pair") {
  const auto pairs = critical_pairs(three_atoms(), bernoulli(0.8));
  REQUIRE(pairs.size() == 3);
  CHECK_THROWS_AS(equality_case_probe(three_atoms(), bernoulli(0.8), pairs[0]), PreconditionFailed);
  for (const auto& p : pairs)
    if (std::abs(p.mass_sum - 1.0) < kPairSumTol) {
      const auto g = equality_case_probe(three_atoms(), bernoulli(0.8), p);
      CHECK(g.samples.size() == 15);
      CHECK(g.samples.front().density < g.samples.back().density);
    }
}
