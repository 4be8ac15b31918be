#include "fsfp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "fsfp/superiorize.hpp"

namespace fsfp {

const char* to_string(OrderKind k) {
  switch (k) {
    case OrderKind::Area: return "area";
    case OrderKind::Position: return "position";
    case OrderKind::Random: return "random";
  }
  return "?";
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Map: return "map";
    case Mode::Rmap: return "rmap";
    case Mode::PerRmap: return "per-rmap";
  }
  return "?";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "feasible";
    case Status::Oscillating: return "oscillating";
    case Status::MaxIter: return "max-iter";
  }
  return "?";
}

ScanOrder make_order(const Instance& inst, const Placement& z, OrderKind kind, Rng* rng) {
  Index n = inst.module_count();
  ScanOrder order;
  order.kind = kind;
  order.pairs.reserve(n * (n - 1) / 2);

  if (kind == OrderKind::Random) {
    if (rng == nullptr) throw std::invalid_argument("make_order: random order needs an rng");
    for (Index i = 0; i + 1 < n; ++i)
      for (Index j = i + 1; j < n; ++j) order.pairs.emplace_back(i, j);
    for (Index k = order.pairs.size(); k > 1; --k)
      std::swap(order.pairs[k - 1], order.pairs[rng->uniform_int(0, static_cast<long>(k) - 1)]);
    return order;
  }

  std::vector<Index> ms(n);
  std::iota(ms.begin(), ms.end(), Index{0});
  if (kind == OrderKind::Area) {
    std::stable_sort(ms.begin(), ms.end(), [&](Index a, Index b) {
      return inst.modules[a].area() > inst.modules[b].area();
    });
  } else {
    std::stable_sort(ms.begin(), ms.end(), [&](Index a, Index b) {
      return z.x(a) + z.y(a) < z.x(b) + z.y(b);
    });
  }
  for (Index a = 0; a + 1 < n; ++a)
    for (Index b = a + 1; b < n; ++b)
      order.pairs.emplace_back(std::min(ms[a], ms[b]), std::max(ms[a], ms[b]));
  return order;
}

SweepConfig default_sweep_config(const Instance& inst) {
  SweepConfig cfg;
  if (inst.module_count() > 0) {
    double mean_min = 0.0;
    for (const Module& m : inst.modules) mean_min += std::min(m.width, m.height);
    mean_min /= static_cast<double>(inst.module_count());
    cfg.epsilon = 0.10 * mean_min;
  } else {
    cfg.epsilon = 0.02 * (inst.die.width + inst.die.height);
  }
  return cfg;
}

EngineConfig default_engine_config(const Instance& inst) {
  EngineConfig cfg;
  cfg.sweep = default_sweep_config(inst);
  return cfg;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PairEvaluation {
  std::array<double, 4> eta;
  std::array<std::optional<ProjectionResult>, 4> projections;
  int preferred = -1;  // argmax of eta with L < R < B < A precedence
};

// Distances, preference ratios, and the counter bookkeeping for one visit of
// a pair. A subset whose counter exceeded S gets -inf this visit and its
// counter cleared; the preferred subset's counter advances only while the
// pair still overlaps (an unresolved visit).
PairEvaluation evaluate_pair(const Placement& z, const PairConstraint& pc,
                             ResetState& reset, const SweepConfig& cfg, Index t) {
  PairEvaluation ev;
  auto& counters = reset.counters[t];
  for (int k = 0; k < 4; ++k) {
    const ConvexSubset& c = pc.subsets[k];
    if (!c.feasible) {
      ev.eta[k] = -kInf;
      continue;
    }
    if (counters[k] > cfg.reset_threshold) {
      ev.eta[k] = -kInf;
      if (cfg.simultaneous_reset)
        counters = {0, 0, 0, 0};
      else
        counters[k] = 0;
      continue;
    }
    ev.projections[k] = project_subset(z, c);
    ev.eta[k] = -ev.projections[k]->distance;
  }
  double best = -kInf;
  for (int k = 0; k < 4; ++k) {
    if (ev.eta[k] > best + cfg.tol || (ev.preferred < 0 && ev.eta[k] > -kInf)) {
      best = ev.eta[k];
      ev.preferred = k;
    }
  }
  if (ev.preferred >= 0 && ev.eta[ev.preferred] < -cfg.tol)
    counters[ev.preferred] += 1;
  return ev;
}

}  // namespace

std::array<double, 4> preference_ratio(const Placement& z, const PairConstraint& pc,
                                       ResetState& reset, const SweepConfig& cfg,
                                       const ConstraintFamily& family) {
  Index t = family.pair_index(pc.i, pc.j);
  return evaluate_pair(z, pc, reset, cfg, t).eta;
}

Placement map_sweep(const Instance& inst, const ConstraintFamily& family,
                    const Placement& z, const ScanOrder& order, double lambda,
                    double tol, TieBreak tie_break, TieState* ties, double tie_tol) {
  if (!(lambda > 0.0) || lambda > 2.0)
    throw std::invalid_argument("map_sweep: lambda must be in (0, 2]");
  Placement cur = z;
  for (auto [i, j] : order.pairs) {
    const PairConstraint& pc = family.pair(i, j);
    double best_d = kInf;
    std::array<std::optional<ProjectionResult>, 4> proj;
    int tied[4];
    int n_tied = 0;
    for (int k = 0; k < 4; ++k) {
      const ConvexSubset& c = pc.subsets[k];
      if (!c.feasible) continue;
      proj[k] = project_subset(cur, c);
      if (proj[k]->distance < best_d - tie_tol) {
        best_d = proj[k]->distance;
        tied[0] = k;
        n_tied = 1;
      } else if (proj[k]->distance <= best_d + tie_tol) {
        tied[n_tied++] = k;
      }
    }
    if (n_tied == 0)
      throw std::invalid_argument("map_sweep: all subsets of pair (" + std::to_string(i) +
                                  "," + std::to_string(j) + ") are empty");
    if (best_d <= tol) continue;  // member: projection is the identity
    int pick = tied[0];
    if (ties != nullptr && tie_break == TieBreak::Rotate && n_tied > 1) {
      // The union projection is set-valued at ties; rotating through the
      // candidates per pair reproduces the position diversity that a
      // closest-point selection exhibits in practice.
      Index t = family.pair_index(i, j);
      pick = tied[ties->per_pair[t] % n_tied];
      ties->per_pair[t] += 1;
    }
    cur = relaxed_step(cur, proj[pick]->placement, lambda);
  }
  for (const IoConstraint& c : family.io())
    cur = relaxed_step(cur, project_io(cur, c, inst).placement, lambda);
  return cur;
}

Placement rmap_sweep(const Instance& inst, const ConstraintFamily& family,
                     const Placement& z, const ScanOrder& order,
                     const SweepConfig& cfg, ResetState& reset) {
  if (reset.counters.size() != family.pair_count())
    throw std::invalid_argument("rmap_sweep: reset state size mismatch");
  Placement cur = z;
  for (auto [i, j] : order.pairs) {
    Index t = family.pair_index(i, j);
    const PairConstraint& pc = family.pairs()[t];
    PairEvaluation ev = evaluate_pair(cur, pc, reset, cfg, t);

    double maxEta = -kInf;
    for (double e : ev.eta) maxEta = std::max(maxEta, e);
    if (maxEta == -kInf)
      throw std::runtime_error("rmap_sweep: every subset of pair (" + std::to_string(i) +
                               "," + std::to_string(j) + ") is reset or excluded");
    std::array<double, 4> w{};
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (ev.eta[k] == -kInf) continue;
      w[k] = std::exp((ev.eta[k] - maxEta) / cfg.epsilon);
      sum += w[k];
    }
    // Weighted average of the subset projections; only the pair's four
    // coordinates can differ from cur.
    Index coords[4] = {cur.x_index(i), cur.x_index(j), cur.y_index(i), cur.y_index(j)};
    double mixed[4] = {0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
      if (w[k] == 0.0) continue;
      double wk = w[k] / sum;
      for (int c = 0; c < 4; ++c) mixed[c] += wk * ev.projections[k]->placement[coords[c]];
    }
    for (int c = 0; c < 4; ++c) cur[coords[c]] = mixed[c];
  }
  for (const IoConstraint& c : family.io())
    cur = relaxed_step(cur, project_io(cur, c, inst).placement, cfg.lambda);
  return cur;
}

int CycleDetector::push(const Placement& z) {
  keys_.push_back(placement_hash(z, tol_));
  int n = static_cast<int>(keys_.size()) - 1;
  for (int p = 1; p <= max_period_; ++p) {
    if (n < (laps_ + 1) * p) break;
    bool ok = true;
    for (int k = 0; k < laps_ * p && ok; ++k)
      if (keys_[n - k] != keys_[n - k - p]) ok = false;
    if (ok) return p;
  }
  return 0;
}

int CycleDetector::first_index(int period) const {
  int n = static_cast<int>(keys_.size()) - 1;
  // Walk the periodicity back as far as it holds.
  int first = n - (laps_ + 1) * period + 1;
  while (first > 0 && keys_[first - 1] == keys_[first - 1 + period]) --first;
  return first;
}

std::vector<Placement> map_move_trajectory(const Instance& inst,
                                           const ConstraintFamily& family,
                                           Placement z, OrderKind kind, double lambda,
                                           int sweeps, const SweepConfig& cfg,
                                           Rng* rng, TieState* ties) {
  std::vector<Placement> moves{z};
  TieState local(family.pair_count());
  if (ties == nullptr) ties = &local;
  for (int s = 1; s <= sweeps; ++s) {
    ScanOrder order = make_order(inst, z, kind, rng);
    for (auto pr : order.pairs) {
      ScanOrder one;
      one.kind = kind;
      one.pairs = {pr};
      Placement next = map_sweep(inst, family, z, one, lambda, cfg.tol, cfg.tie_break,
                                 ties, cfg.tie_tol);
      if (!(next == z)) moves.push_back(next);
      z = std::move(next);
    }
  }
  return moves;
}

CycleReport detect_cycle(std::span<const Placement> states, double state_tol) {
  CycleReport report;
  if (states.size() < 2) return report;

  auto quantize = [&](const Placement& p) {
    std::vector<std::int64_t> q(p.size());
    for (Index k = 0; k < p.size(); ++k) q[k] = std::llround(p[k] / state_tol);
    return q;
  };

  struct VecHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
      std::size_t h = 1469598103934665603ull;
      for (std::int64_t x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      }
      return h;
    }
  };

  std::unordered_map<std::vector<std::int64_t>, int, VecHash> seen;
  for (int n = 0; n < static_cast<int>(states.size()); ++n) {
    auto key = quantize(states[n]);
    auto [it, inserted] = seen.try_emplace(std::move(key), n);
    if (!inserted) {
      report.detected = true;
      report.first_index = it->second;
      report.period = n - it->second;
      report.states.assign(states.begin() + it->second, states.begin() + n);
      return report;
    }
  }
  return report;
}

namespace {

int confirm_laps(const EngineConfig& cfg) {
  return std::max(8, cfg.sweep.reset_threshold + 2);
}

}  // namespace

RunResult run_feasibility(const Instance& inst, const ConstraintFamily& family,
                          const Placement& init, const EngineConfig& cfg) {
  if (cfg.mode == Mode::PerRmap)
    throw std::invalid_argument("run_feasibility: use per_rmap() for the superiorized mode");
  Rng rng(cfg.seed);
  ResetState reset(family.pair_count());
  TieState ties(family.pair_count());
  RunResult out;
  out.placement = init;

  bool has_nets = !inst.nets.empty();
  auto record = [&](int sweep) {
    TrajectoryPoint p;
    p.sweep = sweep;
    p.roa = roa(inst, out.placement);
    p.hpwl = has_nets ? hpwl(inst, out.placement) : 0.0;
    p.state_hash = placement_hash(out.placement, cfg.state_tol);
    out.trajectory.push_back(p);
    return p.roa;
  };

  CycleDetector detector(cfg.state_tol, cfg.max_cycle_period, confirm_laps(cfg));
  std::deque<Placement> recent;  // last few states, enough to report a cycle
  auto push_recent = [&](const Placement& p) {
    recent.push_back(p);
    while (static_cast<int>(recent.size()) > cfg.max_cycle_period + 1) recent.pop_front();
  };

  double r = record(0);
  if (r < cfg.roa_threshold) {
    out.status = Status::Feasible;
    return out;
  }
  detector.push(out.placement);
  push_recent(out.placement);

  ScanOrder order;
  bool have_order = false;
  for (int sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
    if (!have_order || cfg.refresh_order || cfg.order == OrderKind::Random) {
      order = make_order(inst, out.placement, cfg.order, &rng);
      have_order = true;
    }
    if (cfg.mode == Mode::Map) {
      out.placement = map_sweep(inst, family, out.placement, order, cfg.sweep.lambda,
                                cfg.sweep.tol, cfg.sweep.tie_break, &ties,
                                cfg.sweep.tie_tol);
    } else {
      out.placement = rmap_sweep(inst, family, out.placement, order, cfg.sweep, reset);
    }
    out.sweeps = sweep;
    r = record(sweep);
    if (r < cfg.roa_threshold) {
      out.status = Status::Feasible;
      return out;
    }
    push_recent(out.placement);

    if (int period = detector.push(out.placement); period > 0) {
      CycleReport cyc;
      cyc.detected = true;
      cyc.period = period;
      cyc.first_index = detector.first_index(period);
      cyc.states.assign(recent.end() - period, recent.end());
      for (const Placement& s : cyc.states) cyc.roas.push_back(roa(inst, s));
      cyc.mean_roa = std::accumulate(cyc.roas.begin(), cyc.roas.end(), 0.0) /
                     static_cast<double>(cyc.roas.size());
      for (TrajectoryPoint& p : out.trajectory)
        if (p.sweep >= cyc.first_index) p.cycle_flag = 1;
      out.cycle = std::move(cyc);
      out.status = Status::Oscillating;
      return out;
    }

    // In the resetting mode the plateau window must outlast the counter
    // horizon, or a pending reset could be mistaken for a stall.
    int window = cfg.plateau_window;
    if (cfg.mode == Mode::Rmap)
      window = std::max(window, 2 * (cfg.sweep.reset_threshold + 2));
    if (static_cast<int>(out.trajectory.size()) > window) {
      bool flat = true;
      double roa0 = out.trajectory[out.trajectory.size() - 1].roa;
      for (int b = 2; b <= window; ++b) {
        if (std::fabs(out.trajectory[out.trajectory.size() - b].roa - roa0) > 1e-9) {
          flat = false;
          break;
        }
      }
      if (flat) {
        out.status = Status::Oscillating;
        return out;
      }
    }
  }
  out.status = Status::MaxIter;
  return out;
}

}  // namespace fsfp
