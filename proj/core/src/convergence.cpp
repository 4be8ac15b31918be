#include "fsfp/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fsfp/projection.hpp"

namespace fsfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.7071067811865475244;

std::array<double, 4> subset_distances(const Placement& z, const PairConstraint& pc) {
  std::array<double, 4> d{kInf, kInf, kInf, kInf};
  for (int k = 0; k < 4; ++k)
    if (pc.subsets[k].feasible) d[k] = distance(z, pc.subsets[k]);
  return d;
}

}  // namespace

bool ActiveIndexSet::contains(SubsetId k) const {
  return std::find(active.begin(), active.end(), k) != active.end();
}

bool ActiveIndexSet::subset_of(const ActiveIndexSet& other) const {
  for (SubsetId k : active)
    if (!other.contains(k)) return false;
  return true;
}

ActiveIndexSet active_indices(const Placement& z, const PairConstraint& pc,
                              Index pair_index, double tol) {
  ActiveIndexSet out;
  out.pair_index = pair_index;
  auto d = subset_distances(z, pc);
  double dmin = std::min({d[0], d[1], d[2], d[3]});
  for (int k = 0; k < 4; ++k)
    if (d[k] <= dmin + tol) out.active.push_back(static_cast<SubsetId>(k));
  return out;
}

double escaping_distance(const Placement& z, const PairConstraint& pc, double tol) {
  ActiveIndexSet K = active_indices(z, pc, 0, tol);
  double esc = kInf;
  for (SubsetId k : K.active) {
    const ConvexSubset& c = pc.subset(k);
    if (!member(z, c, tol))
      throw std::invalid_argument("escaping_distance: placement not a member of active subset " +
                                  std::string(to_string(k)));
    esc = std::min(esc, interior_depth(z, c, tol));
  }
  return esc;
}

double separating_distance(const Placement& z, const PairConstraint& pc, double tol) {
  ActiveIndexSet K = active_indices(z, pc, 0, tol);
  if (K.active.size() == 4)
    throw std::invalid_argument("separating_distance: all four indices active");
  double sep = kInf;
  for (int k = 0; k < 4; ++k) {
    auto id = static_cast<SubsetId>(k);
    if (K.contains(id) || !pc.subsets[k].feasible) continue;
    sep = std::min(sep, distance(z, pc.subsets[k]));
  }
  return sep;  // +inf when every non-active subset is empty
}

double radius_rough(const Placement& z, const PairConstraint& pc, double tol) {
  return std::min(separating_distance(z, pc, tol), escaping_distance(z, pc, tol));
}

double radius_sharp(const Placement& z, const PairConstraint& pc, double tol) {
  ActiveIndexSet K = active_indices(z, pc, 0, tol);
  if (K.active.size() > 2)
    throw std::invalid_argument("radius_sharp: more than two active indices");
  if (K.active.size() == 1) {
    double sep = separating_distance(z, pc, tol);
    double esc = escaping_distance(z, pc, tol);
    return std::min(sep, (sep + esc) / 2.0);
  }
  // Two active indices: distance to the nearer of the hyperplanes dividing
  // L from R and B from A.
  const ConvexSubset& L = pc.subset(SubsetId::L);
  const ConvexSubset& B = pc.subset(SubsetId::B);
  double wi = L.gap;                      // width of module i
  double wj = pc.subset(SubsetId::R).gap; // width of module j
  double hi = B.gap;
  double hj = pc.subset(SubsetId::A).gap;
  double gx = std::fabs((z.x(pc.i) - z.x(pc.j)) + (wi - wj) / 2.0) * kInvSqrt2;
  double gy = std::fabs((z.y(pc.i) - z.y(pc.j)) + (hi - hj) / 2.0) * kInvSqrt2;
  return std::min(gx, gy);
}

ConvergenceReport attraction_radius(const Instance& /*inst*/, const ConstraintFamily& family,
                                    const Placement& z, double tol) {
  // Feasibility gate; reports the worst pair on failure.
  double worst = 0.0;
  Index wi = 0, wj = 0;
  for (const PairConstraint& pc : family.pairs()) {
    auto d = subset_distances(z, pc);
    double dmin = std::min({d[0], d[1], d[2], d[3]});
    if (dmin > worst) {
      worst = dmin;
      wi = pc.i;
      wj = pc.j;
    }
  }
  if (worst > tol)
    throw std::invalid_argument("attraction_radius: placement infeasible, worst pair (" +
                                std::to_string(wi) + "," + std::to_string(wj) +
                                ") at distance " + std::to_string(worst));

  ConvergenceReport report;
  report.radius = kInf;
  for (const PairConstraint& pc : family.pairs()) {
    PairRadiusReport pr;
    pr.i = pc.i;
    pr.j = pc.j;
    ActiveIndexSet K = active_indices(z, pc, family.pair_index(pc.i, pc.j), tol);
    pr.active = K.active;
    if (K.active.size() > 2) report.two_active_bound_ok = false;
    pr.d_esc = escaping_distance(z, pc, tol);
    pr.d_sep = separating_distance(z, pc, tol);
    pr.rough = std::min(pr.d_sep, pr.d_esc);
    if (K.active.size() <= 2) {
      pr.sharp = radius_sharp(z, pc, tol);
      pr.used = pr.sharp;
    } else {
      pr.sharp = std::numeric_limits<double>::quiet_NaN();
      pr.used = pr.rough;
    }
    report.radius = std::min(report.radius, pr.used);
    report.pairs.push_back(std::move(pr));
  }
  if (report.pairs.empty()) report.radius = 0.0;
  return report;
}

namespace {

std::string active_string(const std::vector<SubsetId>& active) {
  std::string s;
  for (SubsetId k : active) s += to_string(k);
  return s.empty() ? "-" : s;
}

}  // namespace

std::string report_to_text(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "pair  K      d_esc        d_sep        r_rough      r_sharp      r_used\n";
  for (const PairRadiusReport& p : report.pairs) {
    os << "(" << p.i << "," << p.j << ")  " << active_string(p.active) << "  " << p.d_esc
       << "  " << p.d_sep << "  " << p.rough << "  " << p.sharp << "  " << p.used << "\n";
  }
  os << "attraction radius r = " << report.radius << "\n";
  os << "active-bound (|K|<=2): " << (report.two_active_bound_ok ? "ok" : "VIOLATED") << "\n";
  return os.str();
}

std::string report_to_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "i,j,K,d_esc,d_sep,r_rough,r_sharp,r_used\n";
  os.precision(17);
  for (const PairRadiusReport& p : report.pairs) {
    os << p.i << "," << p.j << "," << active_string(p.active) << "," << p.d_esc << ","
       << p.d_sep << "," << p.rough << "," << p.sharp << "," << p.used << "\n";
  }
  os << "r,,," << report.radius << ",,,,\n";
  return os.str();
}

}  // namespace fsfp
