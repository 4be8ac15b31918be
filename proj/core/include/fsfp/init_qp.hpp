#pragma once

#include <vector>

#include "fsfp/model.hpp"

namespace fsfp {

// Sparse symmetric positive-definite system of the quadratic wirelength
// model; one matrix for both axes (identical connectivity), separate
// right-hand sides. Unknowns are the movable modules followed by one
// auxiliary star center per large net.
struct QuadraticSystem {
  Index n_modules = 0;
  Index n_centers = 0;
  Index n() const { return n_modules + n_centers; }

  // CSR storage of the full symmetric matrix.
  std::vector<Index> row_ptr;
  std::vector<Index> col;
  std::vector<double> val;
  std::vector<double> diag;
  std::vector<double> rhs_x;
  std::vector<double> rhs_y;
};

// Hybrid net model: nets with <= 3 pins expand to cliques with edge weight
// 1/(p-1); larger nets to a star with an auxiliary center and spoke weight
// p/(p-1). Pin offsets and fixed I/O positions fold into the right-hand side.
// Throws when some connected component has no fixed anchor.
QuadraticSystem build_system(const Instance& inst);

struct PcgResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;  // final ||r|| / ||b||
};

// Jacobi-preconditioned conjugate gradients; stops at ||r|| <= tol * ||b||.
// Throws with a residual report on non-convergence.
PcgResult solve_pcg(const QuadraticSystem& sys, const std::vector<double>& rhs,
                    double tol = 1e-8, int max_iter = 0);

struct InitConfig {
  double pcg_tol = 1e-8;
  int pcg_max_iter = 0;        // 0: derived from the system size
  double shift_ratio = 0.1;    // dimension fraction below which a module shifts
  bool shift_enabled = true;
};

// Translate every module whose width or height is below shift_ratio of the
// respective maximum along the ray from the die center through its own center
// until its bounding box touches the nearest die edge. Modules never leave
// the die.
Placement shift_small_modules(const Instance& inst, const Placement& z,
                              double shift_ratio = 0.1);

// Full initialization: quadratic wirelength minimization with I/O pins fixed,
// star centers discarded afterwards, then the small-module shift.
Placement initialize_placement(const Instance& inst, const InitConfig& cfg = {});

}  // namespace fsfp
