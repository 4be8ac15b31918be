#pragma once

#include <array>
#include <vector>

#include "fsfp/constraints.hpp"
#include "fsfp/model.hpp"

namespace fsfp {

struct ProjectionResult {
  Placement placement;
  double distance = 0.0;
  // Flat indices whose value changed; at most the four coordinates of the
  // pair (or the two of an I/O pin).
  std::array<Index, 4> moved{};
  int moved_count = 0;
};

// Exact metric projection onto one convex subset. The 4-D polyhedron
// factorizes into a 2-D polygon on the ordering axis and two independent
// intervals on the other axis; the polygon projection enumerates all face and
// vertex candidates, so the result is exact. Throws for empty subsets.
ProjectionResult project_subset(const Placement& z, const ConvexSubset& c);

struct UnionProjection {
  SubsetId id = SubsetId::L;
  ProjectionResult result;
};

// All subset projections attaining the minimum distance over the union
// (ties within tie_tol reported, not broken). Throws when every subset of the
// pair is empty.
std::vector<UnionProjection> project_union_closest(const Placement& z,
                                                   const PairConstraint& pc,
                                                   double tie_tol = 1e-9);

// Relaxed projection step z + lambda (p - z); lambda in (0, 2].
Placement relaxed_step(const Placement& z, const Placement& target, double lambda);

// Projection onto the boundary segment D_p: the side coordinate is pinned
// exactly, the tangential coordinate clamped to the die edge.
ProjectionResult project_io(const Placement& z, const IoConstraint& c, const Instance& inst);

}  // namespace fsfp
