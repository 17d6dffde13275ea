#include "freeconv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freeconv/error.hpp"

namespace freeconv {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// sin(x)/x with the removable singularity filled in.
double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// Position of theta inside the arc starting at `start`, in [0, 2π).
double offset_from(UnitAngle start, UnitAngle theta) { return (theta - start).radians(); }

}  // namespace

double UnitAngle::reduce(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

UnitAngle UnitAngle::from_pi_multiple(double k) {
  double r = std::fmod(k, 2.0);
  if (r < 0.0) r += 2.0;
  if (r >= 2.0) r = 0.0;
  return UnitAngle(r * std::numbers::pi);
}

double circular_distance(UnitAngle a, UnitAngle b) {
  const double d = (a - b).radians();
  return std::min(d, kTwoPi - d);
}

double ac_mass(const ACPart& ac) {
  return std::visit(Overloaded{
                        [](const NoAC&) { return 0.0; },
                        [](const HaarAC&) { return 1.0; },
                        [](const UniformArc& a) { return a.mass; },
                        [](const DensityGrid& g) {
                          double s = 0.0;
                          for (double v : g.values) s += v;
                          return s * g.spacing();
                        },
                    },
                    ac);
}

double ac_density(const ACPart& ac, UnitAngle theta) {
  return std::visit(Overloaded{
                        [](const NoAC&) { return 0.0; },
                        [](const HaarAC&) { return 1.0 / kTwoPi; },
                        [&](const UniformArc& a) {
                          if (a.length >= kTwoPi) return a.mass / kTwoPi;
                          return offset_from(a.start, theta) < a.length ? a.mass / a.length : 0.0;
                        },
                        [&](const DensityGrid& g) {
                          // Cell k covers [c_k − h/2, c_k + h/2).
                          const double h = g.spacing();
                          const double x = offset_from(g.start, theta) + 0.5 * h;
                          auto k = static_cast<std::size_t>(std::floor(x / h));
                          return g.values[k % g.values.size()];
                        },
                    },
                    ac);
}

double CircleMeasure::atom_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.mass;
  return s;
}

double CircleMeasure::largest_atom() const {
  double best = 0.0;
  for (const auto& a : atoms) best = std::max(best, a.mass);
  return best;
}

std::optional<std::size_t> CircleMeasure::support_size() const {
  if (ac_mass(ac) > 0.0) return std::nullopt;
  return atoms.size();
}

CircleMeasure CircleMeasure::rotated(UnitAngle gamma) const {
  CircleMeasure out;
  out.atoms.reserve(atoms.size());
  for (const auto& a : atoms) out.atoms.push_back({a.angle + gamma, a.mass});
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const Atom& x, const Atom& y) { return x.angle.radians() < y.angle.radians(); });
  out.ac = std::visit(Overloaded{
                          [](const NoAC& n) -> ACPart { return n; },
                          [](const HaarAC& h) -> ACPart { return h; },
                          [&](const UniformArc& a) -> ACPart {
                            return UniformArc{a.start + gamma, a.length, a.mass};
                          },
                          [&](const DensityGrid& g) -> ACPart {
                            return DensityGrid{g.start + gamma, g.values};
                          },
                      },
                      ac);
  return out;
}

CircleMeasure point_mass(UnitAngle angle) { return CircleMeasure{{{angle, 1.0}}, NoAC{}}; }

CircleMeasure haar() { return CircleMeasure{{}, HaarAC{}}; }

CircleMeasure bernoulli(double p) {
  CircleMeasure m;
  if (p > 0.0) m.atoms.push_back({UnitAngle(0.0), p});
  if (p < 1.0) m.atoms.push_back({UnitAngle::from_pi_multiple(1.0), 1.0 - p});
  return m;
}

CircleMeasure atomic(std::vector<Atom> atoms) { return CircleMeasure{std::move(atoms), NoAC{}}; }

DensityGrid sample_density(const std::function<double(double)>& density, double mass,
                           std::size_t cells, UnitAngle start) {
  DensityGrid g{start, std::vector<double>(cells)};
  for (std::size_t k = 0; k < cells; ++k) g.values[k] = density(g.center(k).radians());
  const double raw = ac_mass(g);
  if (raw > 0.0)
    for (double& v : g.values) v *= mass / raw;
  return g;
}

CircleMeasure validate(const CircleMeasure& m) {
  CircleMeasure out = m;
  for (const auto& a : out.atoms) {
    if (!(a.mass > 0.0) || a.mass > 1.0 + kMassTol || !std::isfinite(a.angle.radians())) {
      std::ostringstream os;
      os << "atom mass must lie in (0, 1], got " << a.mass;
      throw ValidationError(ValidationCode::InvalidAtom, os.str());
    }
  }
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const Atom& x, const Atom& y) { return x.angle.radians() < y.angle.radians(); });
  for (std::size_t i = 0; i < out.atoms.size(); ++i) {
    const auto& next = out.atoms[(i + 1) % out.atoms.size()];
    if (out.atoms.size() > 1 && circular_distance(out.atoms[i].angle, next.angle) <= kAngleMatchTol)
      throw ValidationError(ValidationCode::DuplicateAtom, "two atoms share an angle");
  }

  std::visit(Overloaded{
                 [](const NoAC&) {},
                 [](const HaarAC&) {},
                 [](const UniformArc& a) {
                   if (a.mass < 0.0)
                     throw ValidationError(ValidationCode::NegativeDensity, "arc mass is negative");
                   if (!(a.length > 0.0) || a.length > kTwoPi + kAngleMatchTol)
                     throw ValidationError(ValidationCode::InvalidAC, "arc length must lie in (0, 2π]");
                 },
                 [](const DensityGrid& g) {
                   if (g.values.size() < 2)
                     throw ValidationError(ValidationCode::InvalidAC, "density grid needs at least two cells");
                   for (double v : g.values)
                     if (!(v >= 0.0) || !std::isfinite(v))
                       throw ValidationError(ValidationCode::NegativeDensity, "density grid has a negative value");
                 },
             },
             out.ac);

  const double total = out.total_mass();
  if (std::abs(total - 1.0) > kMassTol) {
    std::ostringstream os;
    os.precision(17);
    os << "total mass is " << total << ", expected 1";
    throw ValidationError(ValidationCode::NonProbability, os.str());
  }
  return out;
}

Complex moment(const CircleMeasure& m, int n) {
  Complex sum = 0.0;
  const auto nd = static_cast<double>(n);
  for (const auto& a : m.atoms) sum += std::polar(a.mass, nd * a.angle.radians());
  if (n == 0) return sum + ac_mass(m.ac);

  sum += std::visit(Overloaded{
                        [](const NoAC&) { return Complex{}; },
                        [](const HaarAC&) { return Complex{}; },
                        [&](const UniformArc& a) {
                          // (mass/length) ∫_a^{a+L} e^{inθ} dθ
                          const double s = a.start.radians();
                          const Complex diff = std::polar(1.0, nd * (s + a.length)) - std::polar(1.0, nd * s);
                          return a.mass / a.length * diff / Complex(0.0, nd);
                        },
                        [&](const DensityGrid& g) {
                          const double h = g.spacing();
                          const double weight = h * sinc(0.5 * nd * h);
                          Complex acc = 0.0;
                          for (std::size_t k = 0; k < g.values.size(); ++k)
                            acc += std::polar(g.values[k], nd * g.center(k).radians());
                          return weight * acc;
                        },
                    },
                    m.ac);
  return sum;
}

bool is_point_mass(const CircleMeasure& m) {
  return m.atoms.size() == 1 && std::abs(m.atoms.front().mass - 1.0) <= kMassTol && ac_mass(m.ac) == 0.0;
}

}  // namespace freeconv
