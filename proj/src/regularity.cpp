#include "freeconv/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freeconv/convolution.hpp"

namespace freeconv {

namespace {

void require_no_point_mass(const CircleMeasure& m1, const CircleMeasure& m2) {
  if (is_point_mass(m1) || is_point_mass(m2))
    throw PointMassInput("a point-mass factor only rotates the other measure");
}

bool by_angle(UnitAngle a, UnitAngle b) { return a.radians() < b.radians(); }

// Offset of theta counter-clockwise from `from`, in [0, 2π).
double ccw_offset(UnitAngle from, UnitAngle theta) { return (theta - from).radians(); }

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::BoundedDensity: return "BoundedDensity";
    case Verdict::AbsolutelyContinuous: return "AbsolutelyContinuous";
    case Verdict::HasAtoms: return "HasAtoms";
  }
  return "unknown";
}

const char* to_string(SingularStatus s) {
  switch (s) {
    case SingularStatus::Confirmed: return "confirmed";
    case SingularStatus::Rejected: return "rejected";
    case SingularStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::vector<CriticalPair> critical_pairs(const CircleMeasure& m1, const CircleMeasure& m2) {
  const CircleMeasure v1 = validate(m1), v2 = validate(m2);
  require_no_point_mass(v1, v2);
  std::vector<CriticalPair> pairs;
  for (const auto& a1 : v1.atoms)
    for (const auto& a2 : v2.atoms) {
      const double sum = a1.mass + a2.mass;
      if (sum >= 1.0 - kPairSumTol) pairs.push_back({a1.angle, a2.angle, sum, a1.angle + a2.angle});
    }
  std::stable_sort(pairs.begin(), pairs.end(), [](const CriticalPair& x, const CriticalPair& y) {
    return by_angle(x.product_angle, y.product_angle);
  });
  return pairs;
}

std::vector<Atom> predicted_atoms(const CircleMeasure& m1, const CircleMeasure& m2) {
  std::vector<Atom> atoms;
  for (const auto& p : critical_pairs(m1, m2))
    if (p.mass_sum > 1.0 + kPairSumTol) atoms.push_back({p.product_angle, p.mass_sum - 1.0});
  return atoms;
}

RegularityReport classify(const CircleMeasure& m1, const CircleMeasure& m2) {
  RegularityReport rep;
  rep.critical_pairs = critical_pairs(m1, m2);
  rep.max_pair_sum = m1.largest_atom() + m2.largest_atom();
  for (const auto& p : rep.critical_pairs) {
    if (p.mass_sum > 1.0 + kPairSumTol) rep.predicted_atoms.push_back({p.product_angle, p.mass_sum - 1.0});
    const bool seen = std::any_of(rep.singular_candidates.begin(), rep.singular_candidates.end(),
                                  [&](UnitAngle a) { return circular_distance(a, p.product_angle) <= kAngleMatchTol; });
    if (!seen) rep.singular_candidates.push_back(p.product_angle);
  }
  std::sort(rep.singular_candidates.begin(), rep.singular_candidates.end(), by_angle);

  if (!rep.predicted_atoms.empty())
    rep.verdict = Verdict::HasAtoms;
  else if (rep.max_pair_sum >= 1.0 - kPairSumTol)
    rep.verdict = Verdict::AbsolutelyContinuous;
  else
    rep.verdict = Verdict::BoundedDensity;
  return rep;
}

std::vector<SingularCheck> check_singular_candidates(const CircleMeasure& m1, const CircleMeasure& m2,
                                                     const SingularSetOptions& options) {
  const RegularityReport rep = classify(m1, m2);
  const Transform t1(m1), t2(m2);
  const std::size_t window = std::max<std::size_t>(options.monotone_window, 2);

  std::vector<SingularCheck> out;
  for (UnitAngle alpha : rep.singular_candidates) {
    SingularCheck check{alpha, SingularStatus::Inconclusive, 0.0, {}};
    const auto ray = solve_ray(t1, t2, alpha.conjugate(), options.schedule, options.solver);
    bool solved = true;
    for (const auto& s : ray) {
      check.gaps.push_back(std::abs(s.eta - 1.0));
      solved = solved && s.converged;
    }
    check.final_gap = check.gaps.back();

    const std::size_t n = check.gaps.size();
    const std::size_t first = n >= window ? n - window : 0;
    bool monotone = true;
    for (std::size_t i = first + 1; i < n; ++i)
      monotone = monotone && check.gaps[i] <= check.gaps[i - 1] * (1.0 + 1e-9);

    if (solved && monotone && check.final_gap < options.threshold)
      check.status = SingularStatus::Confirmed;
    else if (solved && check.final_gap >= options.threshold && check.final_gap > 0.9 * check.gaps[first])
      check.status = SingularStatus::Rejected;
    out.push_back(std::move(check));
  }
  return out;
}

std::vector<UnitAngle> singular_set(const CircleMeasure& m1, const CircleMeasure& m2,
                                    const SingularSetOptions& options) {
  std::vector<UnitAngle> confirmed;
  for (const auto& c : check_singular_candidates(m1, m2, options))
    if (c.status == SingularStatus::Confirmed) confirmed.push_back(c.angle);
  return confirmed;
}

double arc_mass(const ConvolutionResult& result, UnitAngle from, UnitAngle to) {
  double length = ccw_offset(from, to);
  if (length == 0.0) length = kTwoPi;
  auto inside = [&](UnitAngle a) {
    const double off = ccw_offset(from, a);
    return off > kAngleMatchTol && off < length - kAngleMatchTol;
  };
  double mass = 0.0;
  for (const auto& q : result.quadrature)
    if (inside(UnitAngle(q.angle))) mass += q.weight;
  for (const auto& a : result.atoms)
    if (inside(a.atom.angle)) mass += a.atom.mass;
  return mass;
}

std::vector<ArcMass> arc_positivity(const CircleMeasure& m1, const CircleMeasure& m2,
                                    const ConvolutionResult& result, const SingularSetOptions& options) {
  const auto s1 = m1.support_size(), s2 = m2.support_size();
  if (s1 && s2 && *s1 <= 2 && *s2 <= 2)
    throw HypothesisNotMet("both factors are supported on at most two points");

  std::vector<UnitAngle> points = singular_set(m1, m2, options);
  if (points.size() < 2) {
    std::ostringstream os;
    os << "arc positivity needs two confirmed singular points, found " << points.size();
    throw PreconditionFailed(os.str());
  }
  std::sort(points.begin(), points.end(), by_angle);

  std::vector<ArcMass> arcs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const UnitAngle from = points[i], to = points[(i + 1) % points.size()];
    const double mass = arc_mass(result, from, to);
    arcs.push_back({from, to, mass, mass > kArcPositivityFloor});
  }
  return arcs;
}

GrowthReport equality_case_probe(const CircleMeasure& m1, const CircleMeasure& m2, const CriticalPair& pair,
                                 const RadialSchedule& schedule, const SolverOptions& solver) {
  if (std::abs(pair.mass_sum - 1.0) > kPairSumTol)
    throw PreconditionFailed("equality probe needs a pair whose masses sum to exactly 1");
  const CircleMeasure v1 = validate(m1), v2 = validate(m2);
  require_no_point_mass(v1, v2);

  GrowthReport rep;
  rep.product_angle = pair.product_angle;
  // Approach from both sides; keep the side with the larger final density.
  std::vector<ProbeSample> sides[2];
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    for (int j = 2; j <= 16; ++j) {
      const double offset = std::ldexp(1.0, -j);
      const UnitAngle theta(pair.product_angle.radians() + sign * offset);
      const RadialLimit lim = density_at(v1, v2, theta, schedule, solver);
      sides[side].push_back({sign * offset, lim.value, lim.status});
    }
  }
  rep.samples = sides[0].back().density >= sides[1].back().density ? sides[0] : sides[1];

  rep.monotone_growth = true;
  for (std::size_t i = 1; i < rep.samples.size(); ++i)
    rep.monotone_growth = rep.monotone_growth && rep.samples[i].density > rep.samples[i - 1].density * (1.0 + 1e-9);
  for (const auto& s : rep.samples) {
    rep.exceeds_10 = rep.exceeds_10 || s.density > 10.0 / kTwoPi;
    rep.exceeds_100 = rep.exceeds_100 || s.density > 100.0 / kTwoPi;
    rep.exceeds_1000 = rep.exceeds_1000 || s.density > 1000.0 / kTwoPi;
  }
  return rep;
}

}  // namespace freeconv
