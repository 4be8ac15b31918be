#include "doctest.h"

#include <cmath>
#include <limits>

#include "fsfp/bench_io.hpp"
#include "fsfp/constraints.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace fsfp;
namespace ft = fsfp::testing;

namespace {

Instance two_modules(double w1, double h1, double w2, double h2, double W = 10,
                     double H = 10) {
  Instance inst;
  inst.die = {W, H};
  inst.modules = {{w1, h1, "a"}, {w2, h2, "b"}};
  return inst;
}

}  // namespace

TEST_CASE("membership in the left subset") {
  Instance inst = two_modules(1, 1, 1, 1);
  ConstraintFamily family(inst, false);
  const PairConstraint& pc = family.pair(0, 1);
  Placement z(2);
  z.x(0) = 0; z.y(0) = 0;
  z.x(1) = 5; z.y(1) = 0;

  CHECK(member(z, pc.subset(SubsetId::L)));
  CHECK_FALSE(member(z, pc.subset(SubsetId::R)));

  SUBCASE("boundary touching satisfies the closed inequality") {
    z.x(1) = 1.0;  // x_i + w_i == x_j
    CHECK(member(z, pc.subset(SubsetId::L)));
    CHECK(member(z, pc.subset(SubsetId::L), 0.0));
  }
}

TEST_CASE("L/R and B/A are mutually exclusive") {
  Rng rng(31);
  Instance inst = ft::random_instance(rng, 3);
  ConstraintFamily family(inst, false);
  for (int t = 0; t < 300; ++t) {
    Placement z = ft::random_placement(rng, inst, false);
    for (const PairConstraint& pc : family.pairs()) {
      CHECK_FALSE((member(z, pc.subset(SubsetId::L)) && member(z, pc.subset(SubsetId::R))));
      CHECK_FALSE((member(z, pc.subset(SubsetId::B)) && member(z, pc.subset(SubsetId::A))));
    }
  }
}

TEST_CASE("distance of a member point is zero") {
  Instance inst = two_modules(1, 1, 1, 1);
  ConstraintFamily family(inst, false);
  Placement z(2);
  z.x(0) = 0; z.x(1) = 5;
  CHECK(distance(z, family.pair(0, 1).subset(SubsetId::L)) == 0.0);
}

TEST_CASE("ordering-only violation with ample box slack") {
  // Only the ordering halfspace is violated by delta; the projection splits
  // it between the two coordinates, so d = delta / sqrt(2).
  Instance inst = two_modules(1, 1, 1, 1, 100, 100);
  ConstraintFamily family(inst, false);
  Placement z(2);
  z.x(0) = 10; z.y(0) = 50;
  z.x(1) = 10.5; z.y(1) = 50;
  double d = distance(z, family.pair(0, 1).subset(SubsetId::L));
  CHECK(d == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("distance zero iff member") {
  Rng rng(37);
  Instance inst = ft::random_instance(rng, 3);
  ConstraintFamily family(inst, false);
  for (int t = 0; t < 200; ++t) {
    Placement z = ft::random_placement(rng, inst);
    for (const PairConstraint& pc : family.pairs()) {
      for (SubsetId k : kSubsetIds) {
        const ConvexSubset& c = pc.subset(k);
        if (!c.feasible) continue;
        bool in = member(z, c, 1e-12);
        double d = distance(z, c);
        if (in) CHECK(d <= 1e-9);
        if (!in) CHECK(d > 0.0);
      }
    }
  }
}

TEST_CASE("distance agrees with the sampling + pattern-search oracle") {
  Rng rng(41);
  int checked = 0;
  while (checked < 100) {
    Instance inst = ft::random_instance(rng, 2, 8.0, 8.0, 1.0, 3.0);
    ConstraintFamily family(inst, false);
    Placement z = ft::random_placement(rng, inst, false);
    const ConvexSubset& c = family.pair(0, 1).subset(
        static_cast<SubsetId>(rng.uniform_int(0, 3)));
    if (!c.feasible) continue;
    Rng oracle_rng(1000 + checked);
    double ref = ft::distance_sampling(z, c, oracle_rng, 8000);
    if (!std::isfinite(ref)) continue;
    CHECK(distance(z, c) == doctest::Approx(ref).epsilon(1e-6));
    ++checked;
  }
}

TEST_CASE("interior depth") {
  Instance inst = two_modules(1, 1, 1, 1);
  ConstraintFamily family(inst, false);
  const ConvexSubset& L = family.pair(0, 1).subset(SubsetId::L);

  SUBCASE("point on a face has zero depth") {
    Placement z(2);
    z.x(0) = 0; z.y(0) = 0;   // sits on x_i >= 0 and y_i >= 0
    z.x(1) = 3; z.y(1) = 0;
    CHECK(interior_depth(z, L) == 0.0);
  }
  SUBCASE("hand-enumerated slacks") {
    Placement z(2);
    z.x(0) = 1; z.y(0) = 1;
    z.x(1) = 5; z.y(1) = 1;
    // Box slacks: 1 (x_i low), 8, 5, 4, 1, 8, 1, 8; ordering (5-2)/sqrt(2).
    CHECK(interior_depth(z, L) == doctest::Approx(1.0));
  }
  SUBCASE("matches the directional escape oracle") {
    Placement z(2);
    z.x(0) = 2; z.y(0) = 3;
    z.x(1) = 6.5; z.y(1) = 4;
    double depth = interior_depth(z, L);
    Rng rng(5);
    double oracle = ft::escape_depth_oracle(z, L, rng, 20000);
    CHECK(oracle >= depth - 1e-9);      // sampled exit distance cannot be smaller
    CHECK(oracle <= depth * 1.05);      // and should approach it from above
  }
  SUBCASE("non-member throws") {
    Placement z(2);
    z.x(0) = 5; z.x(1) = 0;
    CHECK_THROWS(interior_depth(z, L));
  }
}

TEST_CASE("infeasible subsets are flagged and excluded") {
  Instance inst = two_modules(6, 2, 6, 2);  // 6 + 6 > 10: cannot sit side by side
  ConstraintFamily family(inst, false);
  const PairConstraint& pc = family.pair(0, 1);
  CHECK_FALSE(pc.subset(SubsetId::L).feasible);
  CHECK_FALSE(pc.subset(SubsetId::R).feasible);
  CHECK(pc.subset(SubsetId::B).feasible);
  CHECK(pc.subset(SubsetId::A).feasible);
  Placement z(2);
  CHECK_THROWS(distance(z, pc.subset(SubsetId::L)));
}

TEST_CASE("family has one constraint per unordered pair") {
  Rng rng(3);
  Instance inst = ft::random_instance(rng, 7);
  ConstraintFamily family(inst, false);
  CHECK(family.pair_count() == 21);
  for (Index i = 0; i + 1 < 7; ++i)
    for (Index j = i + 1; j < 7; ++j) {
      const PairConstraint& pc = family.pair(i, j);
      CHECK(pc.i == i);
      CHECK(pc.j == j);
      CHECK(family.pair_index(j, i) == family.pair_index(i, j));
    }
}

TEST_CASE("pairwise feasibility, subset distances and roa agree") {
  Rng rng(47);
  Instance inst = ft::random_instance(rng, 4);
  ConstraintFamily family(inst, false);
  for (int t = 0; t < 150; ++t) {
    Placement z = ft::random_placement(rng, inst);  // inside the die
    bool all_pairs_ok = true;
    for (const PairConstraint& pc : family.pairs()) {
      double dmin = std::numeric_limits<double>::infinity();
      for (SubsetId k : kSubsetIds)
        if (pc.subset(k).feasible) dmin = std::min(dmin, distance(z, pc.subset(k)));
      if (dmin > 1e-9) all_pairs_ok = false;
    }
    CHECK(all_pairs_ok == (roa(inst, z) == 0.0));
  }
}
