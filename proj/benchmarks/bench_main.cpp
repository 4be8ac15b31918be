#include "benchmark/benchmark.h"

#include "fsfp/bench_io.hpp"
#include "fsfp/constraints.hpp"
#include "fsfp/engine.hpp"
#include "fsfp/init_qp.hpp"
#include "fsfp/model.hpp"
#include "fsfp/rng.hpp"
#include "fsfp/superiorize.hpp"

using namespace fsfp;

namespace {

Instance random_instance(Rng& rng, Index n_modules, double die = 100.0) {
  Instance inst;
  inst.die = {die, die};
  for (Index m = 0; m < n_modules; ++m) {
    Module mod;
    mod.width = rng.uniform(2.0, 12.0);
    mod.height = rng.uniform(2.0, 12.0);
    mod.name = "m" + std::to_string(m);
    inst.modules.push_back(std::move(mod));
  }
  return inst;
}

Placement random_placement(Rng& rng, const Instance& inst) {
  Placement z(inst.entity_count());
  for (Index m = 0; m < inst.module_count(); ++m) {
    z.x(m) = rng.uniform(0.0, inst.die.width - inst.modules[m].width);
    z.y(m) = rng.uniform(0.0, inst.die.height - inst.modules[m].height);
  }
  return z;
}

void BM_ProjectSubset(benchmark::State& state) {
  Rng rng(1);
  Instance inst = random_instance(rng, 2);
  ConstraintFamily family(inst, false);
  Placement z = random_placement(rng, inst);
  const ConvexSubset& c = family.pair(0, 1).subset(SubsetId::L);
  for (auto _ : state) {
    ProjectionResult r = project_subset(z, c);
    benchmark::DoNotOptimize(r.distance);
  }
}
BENCHMARK(BM_ProjectSubset);

void BM_MapSweep(benchmark::State& state) {
  Rng rng(2);
  Instance inst = random_instance(rng, static_cast<Index>(state.range(0)));
  ConstraintFamily family(inst, false);
  Placement z = random_placement(rng, inst);
  ScanOrder order = make_order(inst, z, OrderKind::Area);
  TieState ties(family.pair_count());
  for (auto _ : state) {
    Placement out = map_sweep(inst, family, z, order, 1.0, 1e-9, TieBreak::Rotate, &ties);
    benchmark::DoNotOptimize(out.raw().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(order.pairs.size()));
}
BENCHMARK(BM_MapSweep)->Arg(10)->Arg(33)->Arg(49)->Arg(100);

void BM_RmapSweep(benchmark::State& state) {
  Rng rng(3);
  Instance inst = random_instance(rng, static_cast<Index>(state.range(0)));
  ConstraintFamily family(inst, false);
  Placement z = random_placement(rng, inst);
  ScanOrder order = make_order(inst, z, OrderKind::Area);
  SweepConfig cfg = default_sweep_config(inst);
  ResetState reset(family.pair_count());
  for (auto _ : state) {
    Placement out = rmap_sweep(inst, family, z, order, cfg, reset);
    benchmark::DoNotOptimize(out.raw().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(order.pairs.size()));
}
BENCHMARK(BM_RmapSweep)->Arg(10)->Arg(33)->Arg(49)->Arg(100);

void BM_RmapSolveSynthetic(benchmark::State& state) {
  SyntheticCase sc = synthetic("n4");
  ConstraintFamily family(sc.instance, false);
  EngineConfig cfg = default_engine_config(sc.instance);
  cfg.mode = Mode::Rmap;
  cfg.max_sweeps = 200;
  for (auto _ : state) {
    RunResult r = run_feasibility(sc.instance, family, sc.start("z0"), cfg);
    benchmark::DoNotOptimize(r.sweeps);
  }
}
BENCHMARK(BM_RmapSolveSynthetic);

void BM_Hpwl(benchmark::State& state) {
  Rng rng(4);
  Index n = static_cast<Index>(state.range(0));
  Instance inst = random_instance(rng, n);
  for (Index e = 0; e < 4 * n; ++e) {
    Net net;
    long degree = rng.uniform_int(2, 6);
    for (long k = 0; k < degree; ++k) {
      Index m = static_cast<Index>(rng.uniform_int(0, static_cast<long>(n) - 1));
      net.pins.push_back(PinRef{m, rng.uniform(0.0, inst.modules[m].width),
                                rng.uniform(0.0, inst.modules[m].height)});
    }
    inst.nets.push_back(std::move(net));
  }
  Placement z = random_placement(rng, inst);
  for (auto _ : state) {
    double v = hpwl(inst, z);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(inst.nets.size()));
}
BENCHMARK(BM_Hpwl)->Arg(49)->Arg(300);

void BM_Pcg(benchmark::State& state) {
  Rng rng(5);
  Index n = static_cast<Index>(state.range(0));
  Instance inst = random_instance(rng, n);
  for (Index p = 0; p < 8; ++p) {
    IoPin pin;
    pin.x = rng.uniform(0.0, inst.die.width);
    pin.y = 0.0;
    pin.name = "P" + std::to_string(p);
    inst.io_pins.push_back(std::move(pin));
  }
  for (Index e = 0; e < 3 * n; ++e) {
    Net net;
    net.pins.push_back(PinRef{e % n, 0, 0});
    net.pins.push_back(PinRef{(e + 1) % n, 0, 0});
    if (e % 3 == 0) net.pins.push_back(PinRef{inst.io_entity(e % 8), 0, 0});
    inst.nets.push_back(std::move(net));
  }
  QuadraticSystem sys = build_system(inst);
  for (auto _ : state) {
    PcgResult r = solve_pcg(sys, sys.rhs_x);
    benchmark::DoNotOptimize(r.residual);
  }
}
BENCHMARK(BM_Pcg)->Arg(50)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
