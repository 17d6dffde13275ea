#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "freeconv/measure.hpp"

namespace freeconv {

/// Value and complex derivative of an analytic function at a point.
struct Jet {
  Complex value;
  Complex derivative;
};

/// Prepared evaluator for ψ_μ, η_μ = ψ/(1+ψ) and h_μ = η/z on the open disk.
///
/// Atoms are summed in closed form. Arcs and grid densities use the exact
/// logarithmic antiderivative of tz/(1 − tz) over each arc; near z = 0 the
/// quotient ψ/z comes from the moment series instead, so h never divides
/// by a small z.
class Transform {
 public:
  explicit Transform(CircleMeasure m);

  const CircleMeasure& measure() const noexcept { return measure_; }
  Complex first_moment() const noexcept { return first_moment_; }

  Complex psi(Complex z) const;
  Complex eta(Complex z) const;
  Complex h(Complex z) const;
  Jet h_jet(Complex z) const;

 private:
  Jet psi_over_z(Complex z) const;
  Jet ac_psi(Complex z) const;

  CircleMeasure measure_;
  Complex first_moment_;
  std::vector<Complex> ac_moments_;  // m_1..m_K of the AC part, for small |z|
  std::vector<std::pair<double, Complex>> grid_edges_;  // density jump, boundary point
};

Complex psi(const CircleMeasure& m, Complex z);
Complex eta(const CircleMeasure& m, Complex z);
Complex h(const CircleMeasure& m, Complex z);

/// Increasing radii in (0, 1) along which boundary limits are taken.
struct RadialSchedule {
  std::vector<double> radii;

  /// Radii 1 − 2^{−k} for k = k_min..k_max.
  static RadialSchedule geometric(int k_min, int k_max);
  /// Default used for density and atom extraction: k = 10..24.
  static RadialSchedule standard() { return geometric(10, 24); }

  void check() const;
};

enum class LimitStatus { Converged, Divergent, Unconverged };

struct RadialLimit {
  double value = 0.0;        // last extrapolant (or last raw sample when divergent)
  LimitStatus status = LimitStatus::Unconverged;
  double change = 0.0;       // |difference| of the last two extrapolants
  double last_sample = 0.0;  // raw sample at the largest radius
};

inline constexpr double kLimitRelTol = 1e-8;
/// Densities above this (while still growing) are reported as divergent.
inline constexpr double kDivergenceThreshold = 1e6 / kTwoPi;

/// Extrapolates samples f(r_i) to r → 1 with a quadratic in (1 − r) through
/// each consecutive triple of radii. Converged when the last two extrapolants
/// differ by less than rel_tol·max(|value|, floor).
RadialLimit extrapolate_limit(std::span<const double> radii, std::span<const double> samples,
                              double rel_tol = kLimitRelTol, double floor = 0.1);

/// Boundary density at e^{iφ} from ψ sampled at r·e^{−iφ} on the schedule.
RadialLimit density_from_samples(std::span<const double> radii, std::span<const Complex> psi_values);

/// lim (1 − r)·ψ(r·e^{−iα}), clamped to [0, 1].
RadialLimit atom_mass_from_samples(std::span<const double> radii, std::span<const Complex> psi_values);

using PsiFunction = std::function<Complex(Complex)>;

/// Mass of the point e^{iα}. Throws NonConvergent.
double radial_atom_mass(const PsiFunction& psi, UnitAngle alpha, const RadialSchedule& schedule);

/// Density (w.r.t. dθ) at the boundary point e^{iθ}. A Divergent status marks
/// a candidate atom or unbounded point rather than a failure.
RadialLimit poisson_density(const PsiFunction& psi, UnitAngle theta, const RadialSchedule& schedule);

}  // namespace freeconv
