#pragma once

#include <string>
#include <utility>
#include <vector>

#include "freeconv/herglotz.hpp"
#include "freeconv/subordination.hpp"

namespace freeconv {

struct ConvolutionResult;

/// Absolute tolerance when comparing an atom-pair mass sum with 1.
inline constexpr double kPairSumTol = 1e-9;

/// Atoms α₁ of μ₁ and α₂ of μ₂ with μ₁({α₁}) + μ₂({α₂}) ≥ 1.
struct CriticalPair {
  UnitAngle alpha1;
  UnitAngle alpha2;
  double mass_sum = 0.0;
  UnitAngle product_angle;  // α₁ + α₂
};

enum class Verdict { BoundedDensity, AbsolutelyContinuous, HasAtoms };

const char* to_string(Verdict v);

struct RegularityReport {
  std::vector<CriticalPair> critical_pairs;
  std::vector<Atom> predicted_atoms;
  std::vector<UnitAngle> singular_candidates;
  Verdict verdict = Verdict::BoundedDensity;
  double max_pair_sum = 0.0;
  // The singular part of μ₁ ⊠ μ₂ is always a finite sum of point masses.
  bool singular_part_purely_atomic = true;
};

/// Throws PointMassInput if either factor is a point mass.
std::vector<CriticalPair> critical_pairs(const CircleMeasure& m1, const CircleMeasure& m2);

/// One atom of mass (sum − 1) at the product angle of each pair with sum > 1.
std::vector<Atom> predicted_atoms(const CircleMeasure& m1, const CircleMeasure& m2);

RegularityReport classify(const CircleMeasure& m1, const CircleMeasure& m2);

enum class SingularStatus { Confirmed, Rejected, Inconclusive };

const char* to_string(SingularStatus s);

struct SingularCheck {
  UnitAngle angle;
  SingularStatus status = SingularStatus::Inconclusive;
  double final_gap = 0.0;     // |η − 1| at the largest radius
  std::vector<double> gaps;   // |η − 1| along the ray
};

struct SingularSetOptions {
  /// Longer than the density schedule: |η − 1| decays like √(1 − r) at
  /// equality-case points.
  RadialSchedule schedule = RadialSchedule::geometric(10, 40);
  SolverOptions solver{};
  double threshold = 1e-4;
  std::size_t monotone_window = 5;
};

/// Checks each singular candidate along the ray toward it.
std::vector<SingularCheck> check_singular_candidates(const CircleMeasure& m1, const CircleMeasure& m2,
                                                     const SingularSetOptions& options = {});

/// Candidates confirmed to satisfy η_μ → 1; a subset of the pair products.
std::vector<UnitAngle> singular_set(const CircleMeasure& m1, const CircleMeasure& m2,
                                    const SingularSetOptions& options = {});

struct ArcMass {
  UnitAngle from;  // arc runs counter-clockwise from `from` to `to`
  UnitAngle to;
  double mass = 0.0;
  bool positive = false;
};

inline constexpr double kArcPositivityFloor = 1e-6;

/// Integrates the computed density (and interior atoms) over each open arc
/// between consecutive confirmed singular points.
/// Throws HypothesisNotMet when both factors have at most two support points,
/// PreconditionFailed when fewer than two singular points are confirmed.
std::vector<ArcMass> arc_positivity(const CircleMeasure& m1, const CircleMeasure& m2,
                                    const ConvolutionResult& result, const SingularSetOptions& options = {});

/// Mass of the computed μ on the open arc (from, to), counter-clockwise.
double arc_mass(const ConvolutionResult& result, UnitAngle from, UnitAngle to);

struct ProbeSample {
  double offset = 0.0;   // distance from the product angle
  double density = 0.0;
  LimitStatus status = LimitStatus::Unconverged;
};

struct GrowthReport {
  UnitAngle product_angle;
  std::vector<ProbeSample> samples;  // ordered by decreasing offset
  bool monotone_growth = false;
  bool exceeds_10 = false;    // past 10/(2π)
  bool exceeds_100 = false;   // past 100/(2π)
  bool exceeds_1000 = false;  // past 1000/(2π)
};

/// Density near the product point of an equality pair. Diagnostic only.
GrowthReport equality_case_probe(const CircleMeasure& m1, const CircleMeasure& m2, const CriticalPair& pair,
                                 const RadialSchedule& schedule = RadialSchedule::standard(),
                                 const SolverOptions& solver = {});

}  // namespace freeconv
