#include "fsfp/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fsfp {

namespace {

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

struct Candidate {
  double s, t;
};

// Exact projection of (s, t) onto {s in [slo, shi], t in [tlo, thi],
// s + gap <= t}. Enumerates the polygon's face and vertex candidates and
// keeps the closest feasible one; with at most five edges this is exact.
void project_ordered_box(double s, double t, double slo, double shi, double tlo,
                         double thi, double gap, double& ps, double& pt) {
  double scale = 1.0 + std::max({std::fabs(s), std::fabs(t), std::fabs(shi), std::fabs(thi), std::fabs(gap)});
  double eps = 1e-12 * scale;

  auto feasible = [&](double a, double b) {
    return a >= slo - eps && a <= shi + eps && b >= tlo - eps && b <= thi + eps &&
           a + gap <= b + eps;
  };

  if (feasible(s, t)) {
    ps = s;
    pt = t;
    return;
  }

  Candidate cands[11];
  int n = 0;
  // Box projection (covers all pure-box faces and their vertices).
  cands[n++] = {clamp(s, slo, shi), clamp(t, tlo, thi)};
  // Ordering line s - t = -gap, orthogonal projection.
  double v = (s - t + gap) * 0.5;
  cands[n++] = {s - v, t + v};
  // Vertices where the ordering line meets the box.
  cands[n++] = {slo, slo + gap};
  cands[n++] = {shi, shi + gap};
  cands[n++] = {tlo - gap, tlo};
  cands[n++] = {thi - gap, thi};

  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    double a = cands[k].s, b = cands[k].t;
    if (!feasible(a, b)) continue;
    double d = (a - s) * (a - s) + (b - t) * (b - t);
    if (d < best) {
      best = d;
      ps = a;
      pt = b;
    }
  }
  if (!std::isfinite(best))
    throw std::logic_error("project_ordered_box: no feasible candidate (empty polygon?)");
}

}  // namespace

ProjectionResult project_subset(const Placement& z, const ConvexSubset& c) {
  if (!c.feasible)
    throw std::invalid_argument("project_subset: subset C_{" + std::to_string(c.i) + "," +
                                std::to_string(c.j) + "," + to_string(c.id) + "} is empty");
  ProjectionResult out;
  out.placement = z;

  double s = z.coord(c.lead, c.order_axis);
  double t = z.coord(c.follow, c.order_axis);
  double ps = s, pt = t;
  project_ordered_box(s, t, c.lead_lo, c.lead_hi, c.follow_lo, c.follow_hi, c.gap, ps, pt);
  out.placement.coord(c.lead, c.order_axis) = ps;
  out.placement.coord(c.follow, c.order_axis) = pt;

  Axis cross = c.order_axis == Axis::X ? Axis::Y : Axis::X;
  double ci = clamp(z.coord(c.i, cross), c.cross_i_lo, c.cross_i_hi);
  double cj = clamp(z.coord(c.j, cross), c.cross_j_lo, c.cross_j_hi);
  out.placement.coord(c.i, cross) = ci;
  out.placement.coord(c.j, cross) = cj;

  double d2 = 0.0;
  auto track = [&](Index flat) {
    double delta = out.placement[flat] - z[flat];
    if (delta != 0.0) out.moved[out.moved_count++] = flat;
    d2 += delta * delta;
  };
  track(z.coord_index(c.lead, c.order_axis));
  track(z.coord_index(c.follow, c.order_axis));
  track(z.coord_index(c.i, cross));
  track(z.coord_index(c.j, cross));
  out.distance = std::sqrt(d2);
  return out;
}

std::vector<UnionProjection> project_union_closest(const Placement& z,
                                                   const PairConstraint& pc,
                                                   double tie_tol) {
  std::vector<UnionProjection> all;
  all.reserve(4);
  double best = std::numeric_limits<double>::infinity();
  for (SubsetId k : kSubsetIds) {
    const ConvexSubset& c = pc.subset(k);
    if (!c.feasible) continue;
    UnionProjection up{k, project_subset(z, c)};
    best = std::min(best, up.result.distance);
    all.push_back(std::move(up));
  }
  if (all.empty())
    throw std::invalid_argument("project_union_closest: all subsets of pair (" +
                                std::to_string(pc.i) + "," + std::to_string(pc.j) +
                                ") are empty");
  std::vector<UnionProjection> ties;
  for (UnionProjection& up : all)
    if (up.result.distance <= best + tie_tol) ties.push_back(std::move(up));
  return ties;
}

Placement relaxed_step(const Placement& z, const Placement& target, double lambda) {
  if (!(lambda > 0.0) || lambda > 2.0)
    throw std::invalid_argument("relaxed_step: lambda must be in (0, 2]");
  if (z.size() != target.size())
    throw std::invalid_argument("relaxed_step: dimension mismatch");
  if (lambda == 1.0) return target;  // exact, and keeps integer states exact
  Placement out = z;
  auto zo = out.raw();
  auto zt = target.raw();
  for (Index k = 0; k < zo.size(); ++k) zo[k] += lambda * (zt[k] - zo[k]);
  return out;
}

ProjectionResult project_io(const Placement& z, const IoConstraint& c, const Instance& inst) {
  if (c.io_index >= inst.io_count())
    throw std::invalid_argument("project_io: invalid pin");
  Index e = inst.io_entity(c.io_index);
  ProjectionResult out;
  out.placement = z;
  double px = z.x(e), py = z.y(e);
  switch (c.side) {
    case Side::Left:
      out.placement.x(e) = 0.0;
      out.placement.y(e) = clamp(py, 0.0, inst.die.height);
      break;
    case Side::Right:
      out.placement.x(e) = inst.die.width;
      out.placement.y(e) = clamp(py, 0.0, inst.die.height);
      break;
    case Side::Bottom:
      out.placement.y(e) = 0.0;
      out.placement.x(e) = clamp(px, 0.0, inst.die.width);
      break;
    case Side::Top:
      out.placement.y(e) = inst.die.height;
      out.placement.x(e) = clamp(px, 0.0, inst.die.width);
      break;
  }
  double dx = out.placement.x(e) - px;
  double dy = out.placement.y(e) - py;
  if (dx != 0.0) out.moved[out.moved_count++] = z.x_index(e);
  if (dy != 0.0) out.moved[out.moved_count++] = z.y_index(e);
  out.distance = std::sqrt(dx * dx + dy * dy);
  return out;
}

}  // namespace fsfp
