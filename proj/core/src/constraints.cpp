#include "fsfp/constraints.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fsfp/projection.hpp"

namespace fsfp {

const char* to_string(SubsetId k) {
  switch (k) {
    case SubsetId::L: return "L";
    case SubsetId::R: return "R";
    case SubsetId::B: return "B";
    case SubsetId::A: return "A";
  }
  return "?";
}

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

Halfspace lower_bound_row(Index flat, double lo) {
  // coord >= lo  <=>  -coord <= -lo
  return Halfspace{1, {flat, 0}, {-1.0, 0.0}, -lo};
}

Halfspace upper_bound_row(Index flat, double hi) {
  return Halfspace{1, {flat, 0}, {1.0, 0.0}, hi};
}

ConvexSubset build_subset(const Instance& inst, const Placement& layout, Index i,
                          Index j, SubsetId id) {
  const Region& die = inst.die;
  const Module& mi = inst.modules[i];
  const Module& mj = inst.modules[j];

  ConvexSubset c;
  c.i = i;
  c.j = j;
  c.id = id;
  switch (id) {
    case SubsetId::L:
      c.order_axis = Axis::X;
      c.lead = i;
      c.follow = j;
      c.gap = mi.width;
      break;
    case SubsetId::R:
      c.order_axis = Axis::X;
      c.lead = j;
      c.follow = i;
      c.gap = mj.width;
      break;
    case SubsetId::B:
      c.order_axis = Axis::Y;
      c.lead = i;
      c.follow = j;
      c.gap = mi.height;
      break;
    case SubsetId::A:
      c.order_axis = Axis::Y;
      c.lead = j;
      c.follow = i;
      c.gap = mj.height;
      break;
  }

  auto upper = [&](Index m, Axis a) {
    const Module& mod = inst.modules[m];
    return a == Axis::X ? die.width - mod.width : die.height - mod.height;
  };

  c.lead_lo = 0.0;
  c.lead_hi = upper(c.lead, c.order_axis);
  c.follow_lo = 0.0;
  c.follow_hi = upper(c.follow, c.order_axis);

  Axis cross = c.order_axis == Axis::X ? Axis::Y : Axis::X;
  c.cross_i_lo = 0.0;
  c.cross_i_hi = upper(i, cross);
  c.cross_j_lo = 0.0;
  c.cross_j_hi = upper(j, cross);

  // The subset is nonempty iff the two modules fit stacked along the
  // ordering axis.
  double extent = c.order_axis == Axis::X ? die.width : die.height;
  double need = c.order_axis == Axis::X ? mi.width + mj.width : mi.height + mj.height;
  c.feasible = need <= extent;

  Index lead_flat = layout.coord_index(c.lead, c.order_axis);
  Index follow_flat = layout.coord_index(c.follow, c.order_axis);
  Index ix = layout.coord_index(i, cross);
  Index jx = layout.coord_index(j, cross);

  c.halfspaces.reserve(9);
  c.halfspaces.push_back(lower_bound_row(lead_flat, c.lead_lo));
  c.halfspaces.push_back(upper_bound_row(lead_flat, c.lead_hi));
  c.halfspaces.push_back(lower_bound_row(follow_flat, c.follow_lo));
  c.halfspaces.push_back(upper_bound_row(follow_flat, c.follow_hi));
  c.halfspaces.push_back(lower_bound_row(ix, c.cross_i_lo));
  c.halfspaces.push_back(upper_bound_row(ix, c.cross_i_hi));
  c.halfspaces.push_back(lower_bound_row(jx, c.cross_j_lo));
  c.halfspaces.push_back(upper_bound_row(jx, c.cross_j_hi));
  // Ordering row coord(lead) - coord(follow) <= -gap, normalized to unit norm.
  c.halfspaces.push_back(Halfspace{2,
                                   {lead_flat, follow_flat},
                                   {kInvSqrt2, -kInvSqrt2},
                                   -c.gap * kInvSqrt2});
  return c;
}

}  // namespace

bool PairConstraint::any_feasible() const {
  for (const ConvexSubset& c : subsets)
    if (c.feasible) return true;
  return false;
}

ConstraintFamily::ConstraintFamily(const Instance& inst, bool with_io) {
  n_modules_ = inst.module_count();
  Placement layout(inst.entity_count());
  pairs_.reserve(n_modules_ * (n_modules_ - 1) / 2);
  for (Index i = 0; i + 1 < n_modules_; ++i) {
    for (Index j = i + 1; j < n_modules_; ++j) {
      PairConstraint pc;
      pc.i = i;
      pc.j = j;
      for (SubsetId k : kSubsetIds) pc.subset(k) = build_subset(inst, layout, i, j, k);
      pairs_.push_back(std::move(pc));
    }
  }
  if (with_io) {
    for (Index p = 0; p < inst.io_count(); ++p) {
      const IoPin& pin = inst.io_pins[p];
      if (!pin.fixed && pin.side) io_.push_back(IoConstraint{p, *pin.side});
    }
  }
}

Index ConstraintFamily::pair_index(Index i, Index j) const {
  if (i > j) std::swap(i, j);
  if (i == j || j >= n_modules_)
    throw std::invalid_argument("pair_index: invalid module pair");
  // Row-major position of (i, j), i < j, in the strictly upper triangle.
  return i * n_modules_ - i * (i + 1) / 2 + (j - i - 1);
}

bool member(const Placement& z, const ConvexSubset& c, double tol) {
  if (!c.feasible) return false;
  for (const Halfspace& h : c.halfspaces)
    if (h.violation(z) > tol) return false;
  return true;
}

double distance(const Placement& z, const ConvexSubset& c) {
  return project_subset(z, c).distance;
}

double interior_depth(const Placement& z, const ConvexSubset& c, double tol) {
  if (!member(z, c, tol))
    throw std::invalid_argument("interior_depth: placement is not a member of the subset");
  double depth = std::numeric_limits<double>::infinity();
  for (const Halfspace& h : c.halfspaces) depth = std::min(depth, h.slack(z));
  return std::max(0.0, depth);
}

}  // namespace fsfp
