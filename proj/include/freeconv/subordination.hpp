#pragma once

#include <vector>

#include "freeconv/error.hpp"
#include "freeconv/herglotz.hpp"

namespace freeconv {

struct SolverOptions {
  double tol = 1e-12;
  long max_iterations = 1'000'000;
};

/// Subordination data at one point z of the disk: ω₁, ω₂ with
/// ω₁ = z·h₂(ω₂), ω₂ = z·h₁(ω₁) and η_μ(z) = η_{μ₁}(ω₁) = ω₁ω₂/z.
struct SubordinationResult {
  Complex z;
  Complex omega1;
  Complex omega2;
  Complex eta;
  double residual = 0.0;  // |ω₁ − z·h₂(ω₂)|
  long iterations = 0;
  bool converged = false;
  bool stalled = false;  // stopped early: residual stopped improving
  std::vector<double> residual_tail;  // residuals of the last (up to 10) iterates
};

class MaxIterationsError : public Error {
 public:
  MaxIterationsError(const std::string& what, SubordinationResult best)
      : Error(what), best_(std::move(best)) {}
  const SubordinationResult& best() const noexcept { return best_; }

 private:
  SubordinationResult best_;
};

/// Finds the fixed point of w ↦ z·h₂(z·h₁(w)) starting from `start`.
///
/// Each step takes the plain image F(w) unless a Newton step on w − F(w)
/// stays inside the disk of radius |z| and lowers the residual. Gives up once
/// the residual has not improved for a while. Never throws on budget
/// exhaustion; check `converged`.
SubordinationResult iterate_fixed_point(const Transform& t1, const Transform& t2, Complex z, Complex start,
                                        const SolverOptions& options);

/// Cold start from ω₁ = 0. Throws MaxIterationsError, EvaluationOutsideDisk.
SubordinationResult solve_at(const Transform& t1, const Transform& t2, Complex z,
                             const SolverOptions& options = {});

/// Solves at z = r·e^{iθ} for each radius, warm-starting from the previous ω₁.
/// Points that exhaust the budget are returned with converged = false.
std::vector<SubordinationResult> solve_ray(const Transform& t1, const Transform& t2, UnitAngle direction,
                                           const RadialSchedule& schedule, const SolverOptions& options = {});

}  // namespace freeconv
