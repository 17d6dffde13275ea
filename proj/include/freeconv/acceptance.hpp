#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "freeconv/convolution.hpp"

namespace freeconv {

struct AcceptanceConfig {
  std::size_t grid_size = 1024;
  std::size_t oracle_grid_size = 2048;
  RadialSchedule schedule = RadialSchedule::standard();
  SolverOptions solver{};
  std::uint64_t seed = 7;
  unsigned threads = 0;
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Named pairs of atomic measures used by the singular-part and residual checks.
struct MeasurePair {
  std::string label;
  CircleMeasure m1;
  CircleMeasure m2;
};

std::vector<MeasurePair> atomic_suite();

/// Random atomic pairs with |m₁| ≥ 0.1 in each factor, reproducible from the seed.
std::vector<MeasurePair> random_atomic_pairs(std::size_t count, std::uint64_t seed);

CriterionResult check_haar_degeneration(const AcceptanceConfig& cfg);
CriterionResult check_atom_rule(const AcceptanceConfig& cfg);
CriterionResult check_bounded_density(const AcceptanceConfig& cfg);
CriterionResult check_atomic_singular_part(const AcceptanceConfig& cfg);
CriterionResult check_oracle_agreement(const AcceptanceConfig& cfg);
CriterionResult check_subordination_residuals(const AcceptanceConfig& cfg);
CriterionResult check_arc_positivity(const AcceptanceConfig& cfg);

/// Runs every criterion in order; `report` is called after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg,
                                            const std::function<void(const CriterionResult&)>& report = {});

}  // namespace freeconv
