#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fsfp/constraints.hpp"
#include "fsfp/model.hpp"
#include "fsfp/projection.hpp"
#include "fsfp/rng.hpp"

namespace fsfp {

enum class OrderKind { Area, Position, Random };

const char* to_string(OrderKind k);

// The realized pair sequence for one sweep; every pair constraint appears
// exactly once.
struct ScanOrder {
  OrderKind kind = OrderKind::Position;
  std::vector<std::pair<Index, Index>> pairs;  // normalized i < j
};

// Area: nested pair loop over modules sorted by area non-ascending.
// Position: modules sorted by (x_i + y_i) non-descending.
// Random: seeded shuffle of all pairs (pass the run's rng).
ScanOrder make_order(const Instance& inst, const Placement& z, OrderKind kind,
                     Rng* rng = nullptr);

// Per-pair, per-subset selection counters for the resetting strategy.
struct ResetState {
  explicit ResetState(Index pair_count = 0) : counters(pair_count, {0, 0, 0, 0}) {}
  std::vector<std::array<int, 4>> counters;
};

// Closest-subset selection under exact distance ties: Rotate cycles through
// the tied subsets (deterministic counter over tie events), modeling the
// non-uniqueness of the union projection; Precedence always takes the first
// in L < R < B < A order.
enum class TieBreak { Rotate, Precedence };

struct SweepConfig {
  double lambda = 1.0;           // relaxation, (0, 2]
  double epsilon = 1e-2;         // softmax temperature, > 0
  int reset_threshold = 2;       // S
  bool simultaneous_reset = false;  // a trip clears all four counters of the pair
  TieBreak tie_break = TieBreak::Rotate;
  double tol = 1e-9;             // membership tolerance
  double tie_tol = 1e-12;        // distance window treated as an exact tie
};

// Deterministic tie bookkeeping for MAP sweeps: each pair counts its own tie
// events, and a tied visit takes the next candidate in cyclic L,R,B,A order.
struct TieState {
  explicit TieState(Index pair_count = 0) : per_pair(pair_count, 0) {}
  std::vector<long> per_pair;
};

// Default temperature scales with the mean minimum module dimension, the
// natural size of the overlap violations the preference ratios compare.
SweepConfig default_sweep_config(const Instance& inst);

// Preference ratios of Algorithm-style subset selection: eta_k = -d(z, C_k),
// with a counter-based reset to -inf once a subset has been chosen more than
// S times while the pair still overlapped. Mutates the counters.
std::array<double, 4> preference_ratio(const Placement& z, const PairConstraint& pc,
                                       ResetState& reset, const SweepConfig& cfg,
                                       const ConstraintFamily& family);

// One sweep of sequential relaxed projections onto the closest subset of each
// pair. I/O constraints, when present, are projected with lambda at the end
// of the sweep. `ties` carries the rotation counter between sweeps; pass
// nullptr for plain precedence tie-breaking.
Placement map_sweep(const Instance& inst, const ConstraintFamily& family,
                    const Placement& z, const ScanOrder& order, double lambda,
                    double tol = 1e-9, TieBreak tie_break = TieBreak::Precedence,
                    TieState* ties = nullptr, double tie_tol = 1e-12);

// One sweep of softmax-weighted projections with the resetting strategy.
Placement rmap_sweep(const Instance& inst, const ConstraintFamily& family,
                     const Placement& z, const ScanOrder& order,
                     const SweepConfig& cfg, ResetState& reset);

// MAP run that records the placement after every state-changing projection;
// the tail of the sequence exposes oscillation at projection granularity
// (the sweep-end trajectory of run_feasibility aggregates it away).
std::vector<Placement> map_move_trajectory(const Instance& inst,
                                           const ConstraintFamily& family,
                                           Placement z, OrderKind kind, double lambda,
                                           int sweeps, const SweepConfig& cfg,
                                           Rng* rng = nullptr, TieState* ties = nullptr);

struct CycleReport {
  bool detected = false;
  int period = 0;
  int first_index = 0;             // position of the first cycle state
  std::vector<Placement> states;   // the distinct states of the cycle
  std::vector<double> roas;        // ROA of each cycle state (when instance known)
  double mean_roa = 0.0;
};

// Detects exact state recurrence on coordinates quantized at state_tol and
// reports the minimal period. Reported cycle states are pairwise distinct.
CycleReport detect_cycle(std::span<const Placement> states, double state_tol);

// Confirmed-periodicity detector over quantized sweep-end states. A period p
// is reported only once `confirm_laps` further laps repeat it exactly, so the
// bounded hidden state of the sweeps (tie rotation, reset counters) cannot
// fake a cycle that a later counter trip would break.
class CycleDetector {
 public:
  CycleDetector(double state_tol, int max_period, int confirm_laps)
      : tol_(state_tol), max_period_(max_period), laps_(confirm_laps) {}

  // Feed the sweep-end state (the initial state first); returns the minimal
  // confirmed period, or 0.
  int push(const Placement& z);
  // Sweep index where the confirmed periodic tail begins.
  int first_index(int period) const;

 private:
  double tol_;
  int max_period_;
  int laps_;
  std::vector<std::uint64_t> keys_;
};

enum class Mode { Map, Rmap, PerRmap };
enum class Status { Feasible, Oscillating, MaxIter };

const char* to_string(Mode m);
const char* to_string(Status s);

struct TrajectoryPoint {
  int sweep = 0;
  double roa = 0.0;
  double hpwl = 0.0;
  std::uint64_t state_hash = 0;
  int cycle_flag = 0;
  // Filled by the superiorized driver only.
  double gamma_proj = 0.0;
  long decay_index = 0;
};

struct EngineConfig {
  Mode mode = Mode::Rmap;
  OrderKind order = OrderKind::Area;
  bool refresh_order = true;    // regenerate the order each sweep
  int max_sweeps = 1000;
  double roa_threshold = 1e-3;  // feasible when ROA < 0.1%
  double state_tol = 1e-6;
  int plateau_window = 20;      // constant-ROA sweeps counting as oscillation
  int max_cycle_period = 50;
  std::uint64_t seed = 1;
  SweepConfig sweep;
};

EngineConfig default_engine_config(const Instance& inst);

struct RunResult {
  Placement placement;
  Status status = Status::MaxIter;
  int sweeps = 0;
  std::vector<TrajectoryPoint> trajectory;
  CycleReport cycle;
};

// Iterates MAP or RMAP sweeps until the ROA threshold, an oscillation
// (cycle or ROA plateau), or the sweep cap.
RunResult run_feasibility(const Instance& inst, const ConstraintFamily& family,
                          const Placement& init, const EngineConfig& cfg);

}  // namespace fsfp
