#pragma once

#include <vector>

#include "freeconv/herglotz.hpp"
#include "freeconv/subordination.hpp"

namespace freeconv {

enum class PointStatus { Finite, Divergent, Unconverged, SolverFailed };

const char* to_string(PointStatus s);

struct PointDiagnostics {
  double max_residual = 0.0;  // over the ray
  long max_iterations = 0;
  double eta_abs = 0.0;       // |η| at the largest radius
  double eta_gap = 0.0;       // |1 − η| at the largest radius
  double change = 0.0;        // last extrapolant change
};

struct DetectedAtom {
  Atom atom;                  // predicted location and mass
  double radial_mass = 0.0;   // lim (1 − r)ψ_μ toward the atom
  bool confirmed = false;
};

struct QuadratureNode {
  double angle = 0.0;
  double weight = 0.0;  // density times arc length
};

/// μ₁ ⊠ μ₂ sampled on the grid θ_k = 2πk/M.
struct ConvolutionResult {
  std::vector<double> angles;
  std::vector<double> density;  // NaN where status is Divergent or SolverFailed
  std::vector<PointStatus> status;
  std::vector<PointDiagnostics> diagnostics;
  std::vector<DetectedAtom> atoms;
  /// Quadrature of the absolutely continuous part: grid cells, except cells
  /// around (near-)critical pair products and cells where the grid is rough,
  /// which are replaced by adaptive Gauss nodes.
  std::vector<QuadratureNode> quadrature;
  std::size_t refined_cells = 0;
  std::size_t failed_nodes = 0;  // refinement nodes without a finite limit
  double ac_mass = 0.0;       // sum of quadrature weights
  double mass_defect = 0.0;   // 1 − ac_mass − Σ atom masses
  double min_raw_density = 0.0;
  bool rotation = false;      // a factor was a point mass

  double spacing() const { return kTwoPi / static_cast<double>(angles.size()); }
  std::size_t count(PointStatus s) const;
};

struct ConvolutionOptions {
  std::size_t grid_size = 1024;
  RadialSchedule schedule = RadialSchedule::standard();
  SolverOptions solver{};
  double max_failure_fraction = 0.01;
  /// Agreement needed between predicted and radial atom masses.
  double atom_confirm_tol = 1e-6;
  /// Point-mass factors are applied as rotations; off forces the solver path.
  bool rotation_shortcut = true;
  /// Cells within this many spacings of a pair product with mass sum at
  /// least 1 − near_critical_gap are integrated with graded nodes.
  std::size_t refine_halfwidth = 2;
  double near_critical_gap = 0.1;
  /// Cells whose second difference of density exceeds this are also
  /// integrated adaptively; 0 disables.
  double roughness = 1e-4;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Throws SolverFailure when more than max_failure_fraction of the grid fails.
ConvolutionResult convolve(const CircleMeasure& m1, const CircleMeasure& m2, const ConvolutionOptions& options = {});

/// Atoms of μ₁ ⊠ μ₂ predicted by the atom-pair rule (or the rotation rule for
/// a point-mass factor), each checked against its radial mass.
std::vector<DetectedAtom> detect_atoms(const CircleMeasure& m1, const CircleMeasure& m2,
                                       const RadialSchedule& schedule = RadialSchedule::standard(),
                                       const SolverOptions& solver = {}, double confirm_tol = 1e-6);

/// Density of μ₁ ⊠ μ₂ at e^{iθ} from a single radial solve.
RadialLimit density_at(const CircleMeasure& m1, const CircleMeasure& m2, UnitAngle theta,
                       const RadialSchedule& schedule = RadialSchedule::standard(),
                       const SolverOptions& solver = {});

/// ψ_μ along r·e^{−iθ} via subordination.
std::vector<Complex> boundary_psi(const Transform& t1, const Transform& t2, UnitAngle theta,
                                  const RadialSchedule& schedule, const SolverOptions& solver,
                                  std::vector<SubordinationResult>* solved = nullptr);

/// n-th moment of the computed measure: quadrature nodes plus atoms.
Complex result_moment(const ConvolutionResult& result, int n);

}  // namespace freeconv
