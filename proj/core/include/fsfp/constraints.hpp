#pragma once

#include <array>
#include <vector>

#include "fsfp/model.hpp"

namespace fsfp {

// Relative placement of module i against module j: Left, Right, Below, Above.
enum class SubsetId : int { L = 0, R = 1, B = 2, A = 3 };

inline constexpr std::array<SubsetId, 4> kSubsetIds = {SubsetId::L, SubsetId::R,
                                                       SubsetId::B, SubsetId::A};

const char* to_string(SubsetId k);

// One halfspace a.z <= b with a unit-norm normal over at most two coordinates,
// so violations and slacks are in length units.
struct Halfspace {
  int terms = 1;
  std::array<Index, 2> index{};
  std::array<double, 2> coef{};
  double bound = 0.0;

  // Signed distance to the boundary plane: positive outside the halfspace.
  double violation(const Placement& z) const {
    double v = coef[0] * z[index[0]];
    if (terms > 1) v += coef[1] * z[index[1]];
    return v - bound;
  }
  double slack(const Placement& z) const { return -violation(z); }
};

// Convex subset C_{i,j,k}: the box bounds keeping both modules inside the die
// plus the single ordering halfspace coord(lead) + gap <= coord(follow).
// Empty (infeasible) when the two modules cannot fit side by side along the
// ordering axis; such subsets are excluded from projection candidates.
struct ConvexSubset {
  Index i = 0, j = 0;
  SubsetId id = SubsetId::L;
  bool feasible = true;

  Axis order_axis = Axis::X;
  Index lead = 0, follow = 0;
  double gap = 0.0;
  double lead_lo = 0.0, lead_hi = 0.0;
  double follow_lo = 0.0, follow_hi = 0.0;
  // Box bounds on the other axis for modules i and j.
  double cross_i_lo = 0.0, cross_i_hi = 0.0;
  double cross_j_lo = 0.0, cross_j_hi = 0.0;

  // Explicit halfspace list (8 box rows + 1 ordering row, unit normals).
  std::vector<Halfspace> halfspaces;
};

struct PairConstraint {
  Index i = 0, j = 0;
  std::array<ConvexSubset, 4> subsets;

  const ConvexSubset& subset(SubsetId k) const { return subsets[static_cast<int>(k)]; }
  ConvexSubset& subset(SubsetId k) { return subsets[static_cast<int>(k)]; }
  bool any_feasible() const;
};

// Boundary segment D_p for an I/O pin: one coordinate pinned to the die edge,
// the other free within [0, span].
struct IoConstraint {
  Index io_index = 0;
  Side side = Side::Left;
};

class ConstraintFamily {
 public:
  ConstraintFamily() = default;
  // Builds all N_m(N_m-1)/2 pair constraints; with `with_io`, adds one
  // IoConstraint per movable I/O pin that has an assigned side.
  ConstraintFamily(const Instance& inst, bool with_io);

  const std::vector<PairConstraint>& pairs() const { return pairs_; }
  const std::vector<IoConstraint>& io() const { return io_; }
  Index pair_count() const { return pairs_.size(); }

  // Linear index of the unordered pair {i, j}; arguments in either order.
  Index pair_index(Index i, Index j) const;
  const PairConstraint& pair(Index i, Index j) const { return pairs_[pair_index(i, j)]; }

 private:
  Index n_modules_ = 0;
  std::vector<PairConstraint> pairs_;
  std::vector<IoConstraint> io_;
};

// True iff every halfspace of the subset holds within tol (length units).
bool member(const Placement& z, const ConvexSubset& c, double tol = 1e-9);

// Euclidean distance from z to the subset, via the exact metric projection.
// Throws std::invalid_argument for empty subsets.
double distance(const Placement& z, const ConvexSubset& c);

// Distance from a member point to the subset's complement: the minimum slack
// over the defining halfspaces. Throws std::invalid_argument for non-members.
double interior_depth(const Placement& z, const ConvexSubset& c, double tol = 1e-9);

}  // namespace fsfp
