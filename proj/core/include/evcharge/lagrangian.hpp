#pragma once

#include "evcharge/assignment.hpp"

namespace evcharge {

struct LagrangianOptions {
  int max_iterations = 6000;
  // Step-size multiplier is halved after this many iterations without a better bound.
  int halve_after = 150;
  double min_step_scale = 1e-4;
};

struct LagrangianResult {
  AssignmentSolution solution;
  double dual_bound = 0.0;     // lower bound on the optimal objective
  double reported_gap = 0.0;   // (objective - dual_bound) / objective, 0 when objective is 0
  int iterations = 0;
  bool used_fallback = false;  // true when subgradient search stalled and the exact solver ran
};

// Subgradient optimisation of the Lagrangian dual obtained by relaxing the one-charger-per-
// vehicle rows, with a greedy-plus-swap primal repair at every improved bound. The gap is
// certified against the best dual bound found. If the search stalls above `gap_target` the
// exact assignment is returned instead, certified by its own optimal dual.
LagrangianResult solve_lagrangian(const AssignmentInstance& instance, double gap_target,
                                  const LagrangianOptions& options = {});

}  // namespace evcharge
