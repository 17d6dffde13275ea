#include "freeconv/herglotz.hpp"

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

constexpr Complex kI{0.0, 1.0};
// Below this modulus ψ/z of the AC part comes from its moment series.
constexpr double kSeriesRadius = 0.25;
// 0.25^64 is far below double precision.
constexpr int kSeriesTerms = 64;

void require_inside(Complex z) {
  if (!(std::abs(z) < 1.0)) {
    std::ostringstream os;
    os << "transform evaluated at |z| = " << std::abs(z) << " >= 1";
    throw EvaluationOutsideDisk(os.str());
  }
}

// ∫_{arc} e^{iθ}z/(1 − z e^{iθ}) dθ over [a, b] equals i[log(1 − z e^{ib}) − log(1 − z e^{ia})].
// Returns the bracketed log term for a single endpoint together with its z-derivative.
Jet endpoint_term(Complex z, double angle) {
  const Complex t = std::polar(1.0, angle);
  const Complex one_minus = 1.0 - z * t;
  return {kI * std::log(one_minus), kI * (-t) / one_minus};
}

}  // namespace

Transform::Transform(CircleMeasure m) : measure_(validate(m)) {
  first_moment_ = moment(measure_, 1);
  if (!std::holds_alternative<NoAC>(measure_.ac) && !std::holds_alternative<HaarAC>(measure_.ac)) {
    CircleMeasure ac_only{{}, measure_.ac};
    ac_moments_.reserve(kSeriesTerms);
    for (int n = 1; n <= kSeriesTerms; ++n) ac_moments_.push_back(moment(ac_only, n));
  }
  if (const auto* g = std::get_if<DensityGrid>(&measure_.ac)) {
    const std::size_t n = g->values.size();
    const double half = 0.5 * g->spacing();
    for (std::size_t k = 0; k < n; ++k) {
      const double jump = g->values[k] - g->values[(k + 1) % n];
      if (jump != 0.0) grid_edges_.emplace_back(jump, std::polar(1.0, g->center(k).radians() + half));
    }
  }
}

Jet Transform::ac_psi(Complex z) const {
  return std::visit(Overloaded{
                        [](const NoAC&) { return Jet{}; },
                        [](const HaarAC&) { return Jet{}; },
                        [&](const UniformArc& a) {
                          const double c = a.mass / a.length;
                          const Jet hi = endpoint_term(z, a.start.radians() + a.length);
                          const Jet lo = endpoint_term(z, a.start.radians());
                          return Jet{c * (hi.value - lo.value), c * (hi.derivative - lo.derivative)};
                        },
                        [&](const DensityGrid&) {
                          // Telescoped over shared cell boundaries: Σ (ρ_k − ρ_{k+1})·term(b_k).
                          Complex value = 0.0, deriv = 0.0;
                          for (const auto& [jump, t] : grid_edges_) {
                            const Complex one_minus = 1.0 - z * t;
                            value += jump * std::log(one_minus);
                            deriv -= jump * t / one_minus;
                          }
                          return Jet{kI * value, kI * deriv};
                        },
                    },
                    measure_.ac);
}

// φ(z) = ψ(z)/z and φ'(z).
Jet Transform::psi_over_z(Complex z) const {
  Jet out{};
  for (const auto& a : measure_.atoms) {
    const Complex t = a.angle.point();
    const Complex inv = 1.0 / (1.0 - t * z);
    out.value += a.mass * t * inv;
    out.derivative += a.mass * t * t * inv * inv;
  }
  if (ac_moments_.empty()) return out;

  if (std::abs(z) < kSeriesRadius) {
    Complex value = 0.0, deriv = 0.0;
    for (int n = kSeriesTerms; n >= 1; --n) {
      value = value * z + ac_moments_[n - 1];
      if (n >= 2) deriv = deriv * z + static_cast<double>(n - 1) * ac_moments_[n - 1];
    }
    out.value += value;
    out.derivative += deriv;
  } else {
    const Jet p = ac_psi(z);
    out.value += p.value / z;
    out.derivative += (z * p.derivative - p.value) / (z * z);
  }
  return out;
}

Complex Transform::psi(Complex z) const {
  require_inside(z);
  return z * psi_over_z(z).value;
}

Complex Transform::eta(Complex z) const {
  const Complex p = psi(z);
  return p / (1.0 + p);
}

Complex Transform::h(Complex z) const { return h_jet(z).value; }

Jet Transform::h_jet(Complex z) const {
  require_inside(z);
  const Jet phi = psi_over_z(z);
  const Complex denom = 1.0 + z * phi.value;
  return {phi.value / denom, (phi.derivative - phi.value * phi.value) / (denom * denom)};
}

Complex psi(const CircleMeasure& m, Complex z) { return Transform(m).psi(z); }
Complex eta(const CircleMeasure& m, Complex z) { return Transform(m).eta(z); }
Complex h(const CircleMeasure& m, Complex z) { return Transform(m).h(z); }

RadialSchedule RadialSchedule::geometric(int k_min, int k_max) {
  RadialSchedule s;
  for (int k = k_min; k <= k_max; ++k) s.radii.push_back(1.0 - std::ldexp(1.0, -k));
  s.check();
  return s;
}

void RadialSchedule::check() const {
  if (radii.size() < 3) throw PreconditionFailed("radial schedule needs at least three radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) throw PreconditionFailed("radii must lie in (0, 1)");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw PreconditionFailed("radii must increase strictly");
  }
}

RadialLimit extrapolate_limit(std::span<const double> radii, std::span<const double> samples,
                              double rel_tol, double floor) {
  const std::size_t n = std::min(radii.size(), samples.size());
  RadialLimit out;
  if (n == 0) return out;
  out.last_sample = samples[n - 1];
  out.value = out.last_sample;
  if (n < 3) return out;

  // Lagrange interpolation through (x_i, f_i), x = 1 − r, evaluated at x = 0.
  auto at_zero = [&](std::size_t i) {
    const double x0 = 1.0 - radii[i - 2], x1 = 1.0 - radii[i - 1], x2 = 1.0 - radii[i];
    const double w0 = x1 * x2 / ((x0 - x1) * (x0 - x2));
    const double w1 = x0 * x2 / ((x1 - x0) * (x1 - x2));
    const double w2 = x0 * x1 / ((x2 - x0) * (x2 - x1));
    return w0 * samples[i - 2] + w1 * samples[i - 1] + w2 * samples[i];
  };

  out.value = at_zero(n - 1);
  if (n < 4) return out;
  const double previous = at_zero(n - 2);
  out.change = std::abs(out.value - previous);
  if (out.change < rel_tol * std::max(std::abs(out.value), floor)) out.status = LimitStatus::Converged;
  return out;
}

RadialLimit density_from_samples(std::span<const double> radii, std::span<const Complex> psi_values) {
  std::vector<double> samples;
  samples.reserve(psi_values.size());
  for (const Complex& p : psi_values) samples.push_back((2.0 * p.real() + 1.0) / kTwoPi);

  RadialLimit out = extrapolate_limit(radii, samples, kLimitRelTol, 0.1);
  if (out.status == LimitStatus::Converged || samples.size() < 3) return out;

  const std::size_t n = samples.size();
  const bool growing = samples[n - 1] > samples[n - 2] && samples[n - 2] > samples[n - 3];
  if (growing && samples[n - 1] > kDivergenceThreshold) {
    out.status = LimitStatus::Divergent;
    out.value = samples[n - 1];
  }
  return out;
}

RadialLimit atom_mass_from_samples(std::span<const double> radii, std::span<const Complex> psi_values) {
  std::vector<double> samples;
  samples.reserve(psi_values.size());
  for (std::size_t i = 0; i < psi_values.size() && i < radii.size(); ++i)
    samples.push_back((1.0 - radii[i]) * psi_values[i].real());
  RadialLimit out = extrapolate_limit(radii, samples, kLimitRelTol, 0.1);
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

namespace {

std::vector<Complex> sample_ray(const PsiFunction& psi, UnitAngle direction, const RadialSchedule& schedule) {
  schedule.check();
  std::vector<Complex> values;
  values.reserve(schedule.radii.size());
  const Complex u = direction.point();
  for (double r : schedule.radii) values.push_back(psi(r * u));
  return values;
}

}  // namespace

double radial_atom_mass(const PsiFunction& psi, UnitAngle alpha, const RadialSchedule& schedule) {
  const auto values = sample_ray(psi, alpha.conjugate(), schedule);
  const RadialLimit lim = atom_mass_from_samples(schedule.radii, values);
  if (lim.status != LimitStatus::Converged) {
    std::ostringstream os;
    os << "radial atom mass did not settle at angle " << alpha.radians() << " (last change " << lim.change << ")";
    throw NonConvergent(os.str());
  }
  return lim.value;
}

RadialLimit poisson_density(const PsiFunction& psi, UnitAngle theta, const RadialSchedule& schedule) {
  const auto values = sample_ray(psi, theta.conjugate(), schedule);
  return density_from_samples(schedule.radii, values);
}

}  // namespace freeconv
