#include "fsfp/superiorize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fsfp/projection.hpp"

namespace fsfp {

double hpwl(const Instance& inst, const Placement& z) {
  double total = 0.0;
  for (const Net& net : inst.nets) {
    if (net.pins.empty())
      throw std::invalid_argument("hpwl: net " + net.name + " has no pins");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const PinRef& pin : net.pins) {
      Point p = pin_position(inst, z, pin);
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    total += (xmax - xmin) + (ymax - ymin);
  }
  return total;
}

std::vector<double> hpwl_subgradient(const Instance& inst, const Placement& z) {
  std::vector<double> v(z.size(), 0.0);
  auto movable = [&](Index entity) {
    return !inst.is_io(entity) || !inst.io_pins[entity - inst.module_count()].fixed;
  };
  for (const Net& net : inst.nets) {
    if (net.pins.empty()) continue;
    // Lowest-indexed extreme pin carries the unit on ties.
    Index ix_min = 0, ix_max = 0, iy_min = 0, iy_max = 0;
    Point first = pin_position(inst, z, net.pins[0]);
    double xmin = first.x, xmax = first.x, ymin = first.y, ymax = first.y;
    for (Index k = 1; k < net.pins.size(); ++k) {
      Point p = pin_position(inst, z, net.pins[k]);
      if (p.x < xmin) { xmin = p.x; ix_min = k; }
      if (p.x > xmax) { xmax = p.x; ix_max = k; }
      if (p.y < ymin) { ymin = p.y; iy_min = k; }
      if (p.y > ymax) { ymax = p.y; iy_max = k; }
    }
    auto add = [&](Index pin_idx, Axis axis, double g) {
      Index e = net.pins[pin_idx].entity;
      if (!movable(e)) return;
      v[z.coord_index(e, axis)] += g;
    };
    add(ix_max, Axis::X, 1.0);
    add(ix_min, Axis::X, -1.0);
    add(iy_max, Axis::Y, 1.0);
    add(iy_min, Axis::Y, -1.0);
  }
  return v;
}

PerturbConfig default_perturb_config(const Region& die) {
  PerturbConfig cfg;
  cfg.lambda_init = 0.05 * (die.width + die.height);
  return cfg;
}

std::pair<Placement, long> perturb(const Instance& inst, const Placement& z, long k,
                                   long ell_prev, const PerturbConfig& cfg, Rng& rng) {
  if (!(cfg.lambda_min > 0.0) && cfg.lambda_min != 0.0)
    throw std::invalid_argument("perturb: lambda_min must be non-negative");
  if (!(cfg.decay > 0.0) || !(cfg.decay < 1.0))
    throw std::invalid_argument("perturb: decay kernel must be in (0, 1)");

  Placement cur = z;
  long ell = ell_prev;
  double f = hpwl(inst, cur);
  for (int n = 0; n < cfg.num; ++n) {
    ell = (k < ell_prev) ? rng.uniform_int(k, ell_prev) : k;
    std::vector<double> v = hpwl_subgradient(inst, cur);
    double nv = 0.0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    if (nv == 0.0) continue;  // flat objective: skip the pass
    for (int cnt = 0; cnt < cfg.retry_cap; ++cnt) {
      double lam = std::max(cfg.lambda_min, cfg.lambda_init * std::pow(cfg.decay, ell));
      Placement trial = cur;
      auto t = trial.raw();
      for (Index c = 0; c < t.size(); ++c) t[c] -= lam * v[c] / nv;
      double f2 = hpwl(inst, trial);
      if (f2 < f) {
        cur = std::move(trial);
        f = f2;
        break;
      }
      ell += 1;
    }
  }
  return {std::move(cur), ell};
}

RunResult per_rmap(const Instance& inst, const ConstraintFamily& family,
                   const Placement& init, const EngineConfig& engine,
                   const PerturbConfig& pcfg, const DriverConfig& dcfg) {
  Rng rng(engine.seed);
  ResetState reset(family.pair_count());
  RunResult out;
  out.placement = init;

  bool has_nets = !inst.nets.empty();
  long ell_prev = dcfg.initial_decay;
  auto record = [&](int iter, double gamma, long ell) {
    TrajectoryPoint p;
    p.sweep = iter;
    p.roa = roa(inst, out.placement);
    p.hpwl = has_nets ? hpwl(inst, out.placement) : 0.0;
    p.state_hash = placement_hash(out.placement, engine.state_tol);
    p.gamma_proj = gamma;
    p.decay_index = ell;
    out.trajectory.push_back(p);
    return p.roa;
  };

  CycleDetector detector(engine.state_tol, engine.max_cycle_period,
                         std::max(8, engine.sweep.reset_threshold + 2));
  std::deque<Placement> recent;
  auto push_recent = [&](const Placement& p) {
    recent.push_back(p);
    while (static_cast<int>(recent.size()) > engine.max_cycle_period + 1) recent.pop_front();
  };

  double r = record(0, 0.0, ell_prev);
  if (r < engine.roa_threshold) {
    out.status = Status::Feasible;
    return out;
  }
  detector.push(out.placement);
  push_recent(out.placement);

  for (int k = 0; k < dcfg.max_iterations; ++k) {
    long ell = ell_prev;
    if (pcfg.num > 0) {
      auto [zp, e] = perturb(inst, out.placement, k, ell_prev, pcfg, rng);
      out.placement = std::move(zp);
      ell = e;
    }
    ScanOrder order = make_order(inst, out.placement, OrderKind::Position, &rng);
    double gamma = std::min(1.0, dcfg.gamma_init * std::pow(dcfg.gamma_growth, k));
    Placement swept = rmap_sweep(inst, family, out.placement, order, engine.sweep, reset);
    auto zo = out.placement.raw();
    auto zs = swept.raw();
    for (Index c = 0; c < zo.size(); ++c) zo[c] += gamma * (zs[c] - zo[c]);

    out.sweeps = k + 1;
    r = record(k + 1, gamma, ell);
    ell_prev = ell;
    if (r < engine.roa_threshold) {
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
    int window = std::max(engine.plateau_window, 2 * (engine.sweep.reset_threshold + 2));
    if (static_cast<int>(out.trajectory.size()) > window) {
      bool flat = true;
      double roa0 = out.trajectory.back().roa;
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

RunResult post_process(const Instance& inst, const ConstraintFamily& family,
                       const Placement& feasible, int k_total,
                       const EngineConfig& engine, const PerturbConfig& pcfg,
                       const DriverConfig& dcfg) {
  DriverConfig rerun_cfg = dcfg;
  rerun_cfg.initial_decay = static_cast<long>(std::floor(k_total * dcfg.theta));
  RunResult rerun = per_rmap(inst, family, feasible, engine, pcfg, rerun_cfg);

  bool has_nets = !inst.nets.empty();
  double before = has_nets ? hpwl(inst, feasible) : 0.0;
  double after = has_nets ? hpwl(inst, rerun.placement) : 0.0;
  if (rerun.status == Status::Feasible && after <= before) return rerun;

  RunResult keep;
  keep.placement = feasible;
  keep.status = Status::Feasible;
  keep.sweeps = 0;
  return keep;
}

void assign_io_sides(Instance& inst) {
  for (IoPin& pin : inst.io_pins) {
    double dl = pin.x;
    double dr = inst.die.width - pin.x;
    double db = pin.y;
    double dt = inst.die.height - pin.y;
    double best = std::min({dl, dr, db, dt});
    if (best == dl)
      pin.side = Side::Left;
    else if (best == dr)
      pin.side = Side::Right;
    else if (best == db)
      pin.side = Side::Bottom;
    else
      pin.side = Side::Top;
    pin.fixed = false;
  }
}

namespace {

// Order-preserving assignment of sorted coordinates to sorted slots
// minimizing the total displacement (one slot per pin).
std::vector<int> monotone_assign(const std::vector<double>& coords,
                                 const std::vector<double>& slots) {
  std::size_t P = coords.size(), S = slots.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> cost(P + 1, std::vector<double>(S + 1, inf));
  std::vector<std::vector<int>> take(P + 1, std::vector<int>(S + 1, 0));
  for (std::size_t s = 0; s <= S; ++s) cost[0][s] = 0.0;
  for (std::size_t p = 1; p <= P; ++p) {
    for (std::size_t s = p; s <= S; ++s) {
      double skip = cost[p][s - 1];
      double use = cost[p - 1][s - 1] + std::fabs(coords[p - 1] - slots[s - 1]);
      if (use <= skip) {
        cost[p][s] = use;
        take[p][s] = 1;
      } else {
        cost[p][s] = skip;
      }
    }
  }
  std::vector<int> assign(P, -1);
  std::size_t p = P, s = S;
  while (p > 0) {
    if (take[p][s]) {
      assign[p - 1] = static_cast<int>(s - 1);
      --p;
    }
    --s;
  }
  return assign;
}

}  // namespace

Placement legalize_io(const Instance& inst, const Placement& z,
                      const std::vector<IoConstraint>& io, double pitch) {
  Placement out = z;
  for (Side side : {Side::Left, Side::Right, Side::Bottom, Side::Top}) {
    std::vector<Index> pins;
    for (const IoConstraint& c : io)
      if (c.side == side) pins.push_back(c.io_index);
    if (pins.empty()) continue;

    bool horizontal = side == Side::Bottom || side == Side::Top;
    double span = horizontal ? inst.die.width : inst.die.height;
    double step = pitch > 0.0 ? pitch : span / (static_cast<double>(pins.size()) + 1.0);
    std::vector<double> slots;
    for (int k = 0; k * step <= span + 1e-9; ++k) slots.push_back(std::min(k * step, span));
    if (pins.size() > slots.size())
      throw std::runtime_error("legalize_io: more pins on the " + std::string(to_string(side)) +
                               " side than slots");

    auto tangent = [&](Index io_index) {
      Index e = inst.io_entity(io_index);
      return horizontal ? out.x(e) : out.y(e);
    };
    std::stable_sort(pins.begin(), pins.end(),
                     [&](Index a, Index b) { return tangent(a) < tangent(b); });
    std::vector<double> coords;
    coords.reserve(pins.size());
    for (Index p : pins) coords.push_back(tangent(p));

    std::vector<int> assign = monotone_assign(coords, slots);
    for (std::size_t k = 0; k < pins.size(); ++k) {
      Index e = inst.io_entity(pins[k]);
      double slot = slots[static_cast<std::size_t>(assign[k])];
      switch (side) {
        case Side::Left: out.x(e) = 0.0; out.y(e) = slot; break;
        case Side::Right: out.x(e) = inst.die.width; out.y(e) = slot; break;
        case Side::Bottom: out.y(e) = 0.0; out.x(e) = slot; break;
        case Side::Top: out.y(e) = inst.die.height; out.x(e) = slot; break;
      }
    }
  }
  return out;
}

}  // namespace fsfp
