#pragma once

#include <string>
#include <vector>

#include "fsfp/constraints.hpp"
#include "fsfp/model.hpp"

namespace fsfp {

// Subset ids of a pair constraint attaining the minimum distance from z.
struct ActiveIndexSet {
  Index pair_index = 0;
  std::vector<SubsetId> active;  // in L, R, B, A order

  bool contains(SubsetId k) const;
  bool subset_of(const ActiveIndexSet& other) const;
};

ActiveIndexSet active_indices(const Placement& z, const PairConstraint& pc,
                              Index pair_index, double tol = 1e-9);

// Distance from a fixed point to the nearest exit of its active subsets:
// min over active k of interior_depth. Throws when z is not a member of some
// active subset.
double escaping_distance(const Placement& z, const PairConstraint& pc,
                         double tol = 1e-9);

// Distance to the nearest non-active subset; +inf when every non-active
// subset is empty. Throws when all four indices are active.
double separating_distance(const Placement& z, const PairConstraint& pc,
                           double tol = 1e-9);

// min(d_sep, d_esc).
double radius_rough(const Placement& z, const PairConstraint& pc, double tol = 1e-9);

// Sharpened per-pair radius: with one active index, min(d_sep,
// (d_sep + d_esc)/2); with two, the distance to the nearer of the L/R and B/A
// dividing hyperplanes. Throws when more than two indices are active.
double radius_sharp(const Placement& z, const PairConstraint& pc, double tol = 1e-9);

struct PairRadiusReport {
  Index i = 0, j = 0;
  std::vector<SubsetId> active;
  double d_esc = 0.0;
  double d_sep = 0.0;
  double rough = 0.0;
  double sharp = 0.0;
  double used = 0.0;  // sharp, falling back to rough if sharp is unavailable
};

struct ConvergenceReport {
  std::vector<PairRadiusReport> pairs;
  double radius = 0.0;  // global r = min over pairs of the used radius
  bool two_active_bound_ok = true;  // |K_t(z*)| <= 2 held at every pair
};

// Per-pair radii and the attractor radius at a feasible placement. Throws on
// infeasible input, naming the worst overlapping pair.
ConvergenceReport attraction_radius(const Instance& inst, const ConstraintFamily& family,
                                    const Placement& z, double tol = 1e-9);

std::string report_to_text(const ConvergenceReport& report);
std::string report_to_csv(const ConvergenceReport& report);

}  // namespace fsfp
