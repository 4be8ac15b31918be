#pragma once

#include <utility>
#include <vector>

#include "fsfp/constraints.hpp"
#include "fsfp/engine.hpp"
#include "fsfp/model.hpp"
#include "fsfp/rng.hpp"

namespace fsfp {

// Half-perimeter wirelength: sum over nets of the x-span plus y-span of the
// net's pin positions. Throws on empty nets.
double hpwl(const Instance& inst, const Placement& z);

// Subgradient of HPWL in R^{2N}: per net, +1 on the owner coordinate of the
// extreme max pin and -1 on the min pin (lowest pin index on ties),
// accumulated through pin offsets; fixed I/O pins receive no contribution.
std::vector<double> hpwl_subgradient(const Instance& inst, const Placement& z);

struct PerturbConfig {
  int num = 1;               // perturbations per iteration
  double lambda_min = 0.1;
  double lambda_init = 1.0;
  double decay = 0.999;      // kernel, in (0, 1)
  int retry_cap = 10;
};

PerturbConfig default_perturb_config(const Region& die);

// One round of objective-reducing perturbations: steps along -grad HPWL with
// length max(lambda_min, lambda_init * decay^ell), accepted only on strict
// HPWL decrease, up to retry_cap shrinking retries per pass. Returns the new
// placement and decay index.
std::pair<Placement, long> perturb(const Instance& inst, const Placement& z, long k,
                                   long ell_prev, const PerturbConfig& cfg, Rng& rng);

struct DriverConfig {
  double gamma_init = 0.1;   // initial projection length, (0, 1)
  double gamma_growth = 1.1; // progress factor, > 1
  double theta = 0.5;        // post-processing fraction, (0, 1)
  int max_iterations = 10000;
  long initial_decay = 0;    // starting ell_{-1}
};

// Superiorized feasibility-seeking: perturb, regenerate the position order,
// then blend in one resetting sweep with projection length
// min(1, gamma_init * gamma_growth^k).
RunResult per_rmap(const Instance& inst, const ConstraintFamily& family,
                   const Placement& init, const EngineConfig& engine,
                   const PerturbConfig& pcfg, const DriverConfig& dcfg);

// Reruns the superiorized driver from a feasible placement with the decay
// index restarted at floor(k_total * theta); keeps whichever of the input and
// the rerun result is feasible with the lower HPWL.
RunResult post_process(const Instance& inst, const ConstraintFamily& family,
                       const Placement& feasible, int k_total,
                       const EngineConfig& engine, const PerturbConfig& pcfg,
                       const DriverConfig& dcfg);

// Assign every I/O pin to its nearest boundary side and mark it movable.
void assign_io_sides(Instance& inst);

// Snap side-assigned pins to multiple-of-pitch slots along their side,
// preserving the relative pin order, one pin per slot. pitch <= 0 selects the
// per-side default span / (pins + 1). Throws when a side has more pins than
// slots.
Placement legalize_io(const Instance& inst, const Placement& z,
                      const std::vector<IoConstraint>& io, double pitch = 0.0);

}  // namespace fsfp
