#pragma once

// Test-only reference implementations, independent of the library's
// computation paths.

#include <vector>

#include "fsfp/constraints.hpp"
#include "fsfp/model.hpp"
#include "fsfp/rng.hpp"

namespace fsfp::testing {

// Dense symmetric solve by Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b);

// Nearest point of a convex subset by enumerating the equality-constrained
// least-squares solutions of every active set of its halfspaces (up to four
// rows in the 4-D coordinate space of the pair).
struct OracleProjection {
  Placement point;
  double distance = 0.0;
};
OracleProjection project_enumerate(const Placement& z, const ConvexSubset& c);

// Distance to the subset by zooming grid search over the ordering polygon
// plus independent interval scans on the cross axis.
double distance_grid(const Placement& z, const ConvexSubset& c);

// Distance by feasible sampling followed by local pattern search using only
// the membership predicate.
double distance_sampling(const Placement& z, const ConvexSubset& c, Rng& rng,
                         int samples = 20000);

// Interior depth upper bound: minimum exit distance over random directions,
// each found by bisection on the membership predicate.
double escape_depth_oracle(const Placement& z, const ConvexSubset& c, Rng& rng,
                           int directions = 20000);

double naive_hpwl(const Instance& inst, const Placement& z);

// Total doubly-covered area on a cells x cells rasterization of the die.
double overlap_rasterized(const Instance& inst, const Placement& z, int cells);

// Minimum-total-displacement order-preserving slot assignment, by exhaustive
// enumeration (small inputs only). Returns slot indices per pin.
std::vector<int> monotone_match_bruteforce(const std::vector<double>& coords,
                                           const std::vector<double>& slots);

}  // namespace fsfp::testing
