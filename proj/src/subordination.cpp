#include "freeconv/subordination.hpp"

#include <cmath>
#include <sstream>

namespace freeconv {

namespace {

constexpr std::size_t kTailLength = 10;
// Iterations without a new best residual before giving up. Near density
// jumps the map is evaluated to only ~1e-11, so the residual can cycle above
// tol forever.
constexpr long kStallWindow = 2000;

struct Evaluation {
  Complex w;
  Complex image;       // F(w)
  Complex derivative;  // F'(w)
  Complex h1;          // h₁(w)
  double residual;
};

Evaluation evaluate(const Transform& t1, const Transform& t2, Complex z, Complex w) {
  const Jet a = t1.h_jet(w);
  const Jet b = t2.h_jet(z * a.value);
  const Complex image = z * b.value;
  return {w, image, z * z * b.derivative * a.derivative, a.value, std::abs(w - image)};
}

}  // namespace

SubordinationResult iterate_fixed_point(const Transform& t1, const Transform& t2, Complex z, Complex start,
                                        const SolverOptions& options) {
  if (!(std::abs(z) < 1.0)) throw EvaluationOutsideDisk("subordination solved only inside the disk");
  const double radius = std::abs(z);
  if (!(std::abs(start) < 1.0)) start = 0.0;

  SubordinationResult out;
  out.z = z;
  Evaluation cur = evaluate(t1, t2, z, start);
  long it = 0;
  double best = cur.residual;
  long best_at = 0;
  for (;; ++it) {
    out.residual_tail.push_back(cur.residual);
    if (out.residual_tail.size() > kTailLength) out.residual_tail.erase(out.residual_tail.begin());
    if (cur.residual < options.tol) {
      out.converged = true;
      break;
    }
    if (it >= options.max_iterations) break;
    if (cur.residual < best) {
      best = cur.residual;
      best_at = it;
    } else if (it - best_at > kStallWindow) {
      out.stalled = true;
      break;
    }

    Evaluation next = evaluate(t1, t2, z, cur.image);
    const Complex slope = 1.0 - cur.derivative;
    if (next.residual >= options.tol && std::abs(slope) > 0.0) {
      const Complex newton = cur.w - (cur.w - cur.image) / slope;
      if (std::abs(newton) < radius) {
        Evaluation cand = evaluate(t1, t2, z, newton);
        if (cand.residual < next.residual) next = cand;
      }
    }
    cur = next;
  }

  out.iterations = it;
  out.residual = cur.residual;
  out.omega1 = cur.w;
  out.omega2 = z * cur.h1;
  out.eta = cur.w * cur.h1;
  return out;
}

SubordinationResult solve_at(const Transform& t1, const Transform& t2, Complex z, const SolverOptions& options) {
  SubordinationResult r = iterate_fixed_point(t1, t2, z, 0.0, options);
  if (!r.converged) {
    std::ostringstream os;
    os << "subordination did not converge at |z| = " << std::abs(z) << " within " << options.max_iterations
       << " iterations (" << (r.stalled ? "stalled, " : "") << "residual " << r.residual << ")";
    throw MaxIterationsError(os.str(), std::move(r));
  }
  return r;
}

std::vector<SubordinationResult> solve_ray(const Transform& t1, const Transform& t2, UnitAngle direction,
                                           const RadialSchedule& schedule, const SolverOptions& options) {
  schedule.check();
  std::vector<SubordinationResult> out;
  out.reserve(schedule.radii.size());
  const Complex u = direction.point();
  Complex warm = 0.0;
  for (double r : schedule.radii) {
    out.push_back(iterate_fixed_point(t1, t2, r * u, warm, options));
    warm = out.back().omega1;
  }
  return out;
}

}  // namespace freeconv
