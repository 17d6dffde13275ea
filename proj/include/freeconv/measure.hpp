#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <variant>
#include <vector>

namespace freeconv {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance used to decide that two atoms sit at the same angle.
inline constexpr double kAngleMatchTol = 1e-12;

/// Tolerance on the total mass of a probability measure.
inline constexpr double kMassTol = 1e-9;

/// A point of the unit circle, stored as an angle reduced to [0, 2π).
class UnitAngle {
 public:
  UnitAngle() = default;
  explicit UnitAngle(double radians) : theta_(reduce(radians)) {}

  /// Angle k·π; k is reduced mod 2 first so that rational multiples stay exact.
  static UnitAngle from_pi_multiple(double k);

  double radians() const noexcept { return theta_; }
  Complex point() const { return std::polar(1.0, theta_); }

  /// Angle of the complex conjugate point, e^{-iθ}.
  UnitAngle conjugate() const { return UnitAngle(-theta_); }

  friend UnitAngle operator+(UnitAngle a, UnitAngle b) { return UnitAngle(a.theta_ + b.theta_); }
  friend UnitAngle operator-(UnitAngle a, UnitAngle b) { return UnitAngle(a.theta_ - b.theta_); }
  friend bool operator==(UnitAngle a, UnitAngle b) = default;

 private:
  static double reduce(double radians);
  double theta_ = 0.0;
};

/// Geodesic distance on the circle, in [0, π].
double circular_distance(UnitAngle a, UnitAngle b);

struct Atom {
  UnitAngle angle;
  double mass = 0.0;
};

struct NoAC {};
struct HaarAC {};

/// Uniform density mass/length on the arc [start, start + length).
struct UniformArc {
  UnitAngle start;
  double length = kTwoPi;
  double mass = 0.0;
};

/// Piecewise-constant density against dθ on M equal cells centred at
/// start + 2πk/M. The total mass is the trapezoid sum h·Σ values.
struct DensityGrid {
  UnitAngle start;
  std::vector<double> values;

  double spacing() const { return kTwoPi / static_cast<double>(values.size()); }
  UnitAngle center(std::size_t k) const {
    return UnitAngle(start.radians() + spacing() * static_cast<double>(k));
  }
};

using ACPart = std::variant<NoAC, HaarAC, UniformArc, DensityGrid>;

double ac_mass(const ACPart& ac);

/// Density of the absolutely continuous part at an angle (w.r.t. dθ).
double ac_density(const ACPart& ac, UnitAngle theta);

struct CircleMeasure {
  std::vector<Atom> atoms;
  ACPart ac = NoAC{};

  double atom_mass() const;
  double total_mass() const { return atom_mass() + ac_mass(ac); }
  double largest_atom() const;

  /// Number of support points; nullopt when the support is infinite.
  std::optional<std::size_t> support_size() const;

  /// The pushforward under t ↦ e^{iγ}t.
  CircleMeasure rotated(UnitAngle gamma) const;
};

// Common families.
CircleMeasure point_mass(UnitAngle angle);
CircleMeasure haar();
/// p·δ_1 + (1 − p)·δ_{−1}.
CircleMeasure bernoulli(double p);
CircleMeasure atomic(std::vector<Atom> atoms);

/// Samples density(θ) at the centres of an M-cell grid and rescales it to
/// the requested mass. M defaults to 256.
DensityGrid sample_density(const std::function<double(double)>& density, double mass, std::size_t cells = 256,
                           UnitAngle start = {});

/// Checks all measure invariants. Returns a copy with atoms sorted by angle.
/// Throws ValidationError.
CircleMeasure validate(const CircleMeasure& m);

/// m_n = ∫ t^n dμ(t). Grid densities are integrated exactly cell by cell.
Complex moment(const CircleMeasure& m, int n);

bool is_point_mass(const CircleMeasure& m);

}  // namespace freeconv
