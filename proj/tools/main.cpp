// Command-line front end: solve / analyze / repro.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fsfp/bench_io.hpp"
#include "fsfp/constraints.hpp"
#include "fsfp/convergence.hpp"
#include "fsfp/engine.hpp"
#include "fsfp/init_qp.hpp"
#include "fsfp/model.hpp"
#include "fsfp/superiorize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fsfp;

namespace {

struct Options {
  // instance
  std::string synthetic_name;
  std::string start = "z0";
  std::string blocks, nets, pl;
  double die_w = 0, die_h = 0;
  double whitespace = 0.15;
  double aspect = 1.0;
  // run
  std::string mode = "per-rmap";
  std::string order = "area";
  std::string init = "auto";  // auto | qp | start
  double lambda = 1.0;
  double epsilon = 0.0;  // 0: scale-derived default
  int S = 2;
  bool simultaneous_reset = false;
  std::string tie_break = "rotate";
  double roa_threshold = 1e-3;
  int max_sweeps = 1000;
  std::uint64_t seed = 1;
  // superiorization
  int num = 1;
  double lambda_min = 0.1;
  double lambda_init = 0.0;  // 0: scale-derived default
  double decay = 0.999;
  double gamma_init = 0.1;
  double gamma_growth = 1.1;
  double theta = 0.5;
  int max_iterations = 10000;
  bool post = true;
  // io assignment
  bool io_assign = false;
  double pitch = 0.0;
  // output
  std::string out_dir;
};

OrderKind parse_order(const std::string& s) {
  if (s == "area") return OrderKind::Area;
  if (s == "position") return OrderKind::Position;
  if (s == "random") return OrderKind::Random;
  throw CLI::ValidationError("--order", "unknown order '" + s + "'");
}

Mode parse_mode(const std::string& s) {
  if (s == "map") return Mode::Map;
  if (s == "rmap") return Mode::Rmap;
  if (s == "per-rmap") return Mode::PerRmap;
  throw CLI::ValidationError("--mode", "unknown mode '" + s + "'");
}

fs::path resolve_out_dir(const Options& opt, const std::string& run_name) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (const char* env = std::getenv("FSFP_OUT_DIR")) return fs::path(env) / run_name;
  return fs::path("fsfp_out") / run_name;
}

json options_to_json(const Options& o) {
  return json{{"synthetic", o.synthetic_name},
              {"start", o.start},
              {"blocks", o.blocks},
              {"nets", o.nets},
              {"pl", o.pl},
              {"die_w", o.die_w},
              {"die_h", o.die_h},
              {"whitespace", o.whitespace},
              {"aspect", o.aspect},
              {"mode", o.mode},
              {"order", o.order},
              {"init", o.init},
              {"lambda", o.lambda},
              {"epsilon", o.epsilon},
              {"S", o.S},
              {"simultaneous_reset", o.simultaneous_reset},
              {"tie_break", o.tie_break},
              {"roa_threshold", o.roa_threshold},
              {"max_sweeps", o.max_sweeps},
              {"seed", o.seed},
              {"num", o.num},
              {"lambda_min", o.lambda_min},
              {"lambda_init", o.lambda_init},
              {"Lambda", o.decay},
              {"gamma_init", o.gamma_init},
              {"Gamma", o.gamma_growth},
              {"theta", o.theta},
              {"max_iterations", o.max_iterations},
              {"post", o.post},
              {"io_assign", o.io_assign},
              {"pitch", o.pitch}};
}

struct LoadedRun {
  Instance instance;
  Placement initial;
  std::string name;
};

LoadedRun load_run(const Options& opt) {
  LoadedRun run;
  if (!opt.synthetic_name.empty()) {
    SyntheticCase sc = synthetic(opt.synthetic_name);
    run.instance = std::move(sc.instance);
    run.initial = sc.start(opt.start);
    run.name = opt.synthetic_name;
    return run;
  }
  if (opt.blocks.empty() || opt.nets.empty() || opt.pl.empty())
    throw CLI::ValidationError("instance",
                               "pass --synthetic or all of --blocks/--nets/--pl");
  DieSpec die;
  if (opt.die_w > 0 && opt.die_h > 0) die.explicit_region = Region{opt.die_w, opt.die_h};
  die.whitespace = opt.whitespace;
  die.aspect = opt.aspect;
  LoadedInstance li = load_instance(opt.blocks, opt.nets, opt.pl, die);
  run.instance = std::move(li.instance);
  run.initial = std::move(li.initial);
  run.name = fs::path(opt.blocks).stem().string();
  return run;
}

EngineConfig engine_config(const Options& opt, const Instance& inst) {
  EngineConfig cfg = default_engine_config(inst);
  cfg.mode = parse_mode(opt.mode);
  cfg.order = parse_order(opt.order);
  cfg.max_sweeps = opt.max_sweeps;
  cfg.roa_threshold = opt.roa_threshold;
  cfg.seed = opt.seed;
  cfg.sweep.lambda = opt.lambda;
  if (opt.epsilon > 0) cfg.sweep.epsilon = opt.epsilon;
  cfg.sweep.reset_threshold = opt.S;
  cfg.sweep.simultaneous_reset = opt.simultaneous_reset;
  cfg.sweep.tie_break = opt.tie_break == "precedence" ? TieBreak::Precedence
                                                      : TieBreak::Rotate;
  return cfg;
}

int run_solve(const Options& opt) {
  auto t0 = std::chrono::steady_clock::now();
  LoadedRun run = load_run(opt);
  Instance& inst = run.instance;

  if (opt.io_assign) assign_io_sides(inst);
  ConstraintFamily family(inst, opt.io_assign);

  // Initialization: quadratic wirelength plus shifting when nets exist,
  // otherwise the documented start / pl positions.
  Placement init = run.initial;
  std::string init_used = "start";
  if (opt.init == "qp" || (opt.init == "auto" && !inst.nets.empty())) {
    init = initialize_placement(inst);
    init_used = "qp";
  }

  EngineConfig engine = engine_config(opt, inst);
  PerturbConfig pcfg = default_perturb_config(inst.die);
  pcfg.num = opt.num;
  pcfg.lambda_min = opt.lambda_min;
  if (opt.lambda_init > 0) pcfg.lambda_init = opt.lambda_init;
  pcfg.decay = opt.decay;
  DriverConfig dcfg;
  dcfg.gamma_init = opt.gamma_init;
  dcfg.gamma_growth = opt.gamma_growth;
  dcfg.theta = opt.theta;
  dcfg.max_iterations = opt.max_iterations;

  RunResult result;
  bool superiorized = engine.mode == Mode::PerRmap;
  if (superiorized) {
    result = per_rmap(inst, family, init, engine, pcfg, dcfg);
    if (result.status == Status::Feasible && opt.post) {
      RunResult post = post_process(inst, family, result.placement, result.sweeps,
                                    engine, pcfg, dcfg);
      result.placement = post.placement;
    }
  } else {
    result = run_feasibility(inst, family, init, engine);
  }
  int polish_sweeps = 0;
  if (result.status != Status::Oscillating) {
    // Closest-point finishing: the roa threshold leaves overlap slivers, and
    // near-threshold stalls at high fill usually legalize under a handful of
    // exact sweeps.
    TieState polish_ties(family.pair_count());
    for (; polish_sweeps < 60 && total_overlap_area(inst, result.placement) > 0.0;
         ++polish_sweeps) {
      ScanOrder order = make_order(inst, result.placement, OrderKind::Position);
      result.placement = map_sweep(inst, family, result.placement, order, 1.0,
                                   engine.sweep.tol, TieBreak::Rotate, &polish_ties);
    }
    if (roa(inst, result.placement) < engine.roa_threshold)
      result.status = Status::Feasible;
  }
  if (opt.io_assign && result.status == Status::Feasible)
    result.placement = legalize_io(inst, result.placement, family.io(), opt.pitch);

  auto t1 = std::chrono::steady_clock::now();
  double wall = std::chrono::duration<double>(t1 - t0).count();

  fs::path out = resolve_out_dir(opt, run.name);
  fs::create_directories(out);
  write_placement(inst, result.placement, out / "placement.pl");
  write_svg(inst, result.placement, out / "floorplan.svg");
  write_trajectory_csv(result.trajectory, out / "trajectory.csv", superiorized);
  {
    std::ofstream cfg_out(out / "config.json");
    cfg_out << options_to_json(opt).dump(2) << "\n";
  }

  double final_roa = roa(inst, result.placement);
  double final_hpwl = inst.nets.empty() ? 0.0 : hpwl(inst, result.placement);
  {
    std::ofstream kv(out / "summary.kv");
    kv << "instance=" << run.name << "\n";
    kv << "mode=" << opt.mode << "\n";
    kv << "status=" << to_string(result.status) << "\n";
    kv << "iterations=" << result.sweeps << "\n";
    kv << "roa=" << final_roa << "\n";
    kv << "hpwl=" << final_hpwl << "\n";
    kv << "init=" << init_used << "\n";
    kv << "seed=" << opt.seed << "\n";
    kv << "polish_sweeps=" << polish_sweeps << "\n";
    kv << "wall_seconds=" << wall << "\n";
    if (result.cycle.detected) {
      kv << "cycle_period=" << result.cycle.period << "\n";
      kv << "cycle_mean_roa=" << result.cycle.mean_roa << "\n";
    }
  }
  std::ofstream txt(out / "summary.txt");
  auto report = [&](std::ostream& os) {
    os << run.name << ": " << to_string(result.status) << " after " << result.sweeps
       << " iterations, roa " << final_roa * 100 << "%";
    if (!inst.nets.empty()) os << ", hpwl " << final_hpwl;
    if (result.cycle.detected)
      os << " (cycle period " << result.cycle.period << ", mean roa "
         << result.cycle.mean_roa * 100 << "%)";
    os << ", " << wall << " s\n";
  };
  report(txt);
  report(std::cout);

  switch (result.status) {
    case Status::Feasible: return 0;
    case Status::Oscillating: return 2;
    case Status::MaxIter: return 3;
  }
  return 3;
}

int run_analyze(const Options& opt, const std::string& placement_path, int verify) {
  LoadedRun run = load_run(opt);
  Placement z = placement_path.empty() ? run.initial
                                       : load_placement(run.instance, placement_path);
  ConstraintFamily family(run.instance, false);
  ConvergenceReport report = attraction_radius(run.instance, family, z);
  std::cout << report_to_text(report);

  if (!opt.out_dir.empty()) {
    fs::create_directories(opt.out_dir);
    std::ofstream csv(fs::path(opt.out_dir) / "convergence.csv");
    csv << report_to_csv(report);
  }

  if (verify > 0 && report.radius > 0) {
    Rng rng(opt.seed);
    int feasible = 0;
    for (int t = 0; t < verify; ++t) {
      Placement start = z;
      auto raw = start.raw();
      double norm = 0.0;
      std::vector<double> dir(raw.size());
      for (std::size_t k = 0; k < raw.size(); ++k) {
        dir[k] = rng.normal();
        norm += dir[k] * dir[k];
      }
      norm = std::sqrt(norm);
      double radius = 0.99 * report.radius *
                      std::pow(rng.uniform(), 1.0 / static_cast<double>(raw.size()));
      for (std::size_t k = 0; k < raw.size(); ++k) raw[k] += radius * dir[k] / norm;

      EngineConfig cfg = engine_config(opt, run.instance);
      cfg.mode = Mode::Map;
      cfg.seed = opt.seed + t;
      RunResult r = run_feasibility(run.instance, family, start, cfg);
      if (r.status == Status::Feasible) ++feasible;
    }
    std::cout << "in-ball verification: " << feasible << "/" << verify
              << " trajectories feasible\n";
    if (feasible != verify) return 1;
  }
  return 0;
}

int run_repro(const std::string& example, const std::string& variant) {
  auto fail = [&](const std::string& msg) {
    std::cout << "repro " << example << ": MISMATCH - " << msg << "\n";
    return 1;
  };
  SyntheticCase sc = synthetic(example);
  ConstraintFamily family(sc.instance, false);
  EngineConfig cfg = default_engine_config(sc.instance);
  cfg.mode = Mode::Map;
  cfg.max_sweeps = 400;

  if (example == "n4") {
    cfg.order = OrderKind::Position;
    RunResult r = run_feasibility(sc.instance, family, sc.start("z0"), cfg);
    if (r.status != Status::Oscillating || r.cycle.period != 2)
      return fail("expected a period-2 cycle");
    std::cout << "repro n4: period-2 oscillation between the two layouts, mean roa "
              << r.cycle.mean_roa * 100 << "%\n";
    return 0;
  }
  if (example == "n5") {
    cfg.order = OrderKind::Position;
    if (variant == "z0_alt") {
      RunResult r = run_feasibility(sc.instance, family, sc.start("z0_alt"), cfg);
      if (r.status != Status::Feasible || r.sweeps != 1)
        return fail("expected feasibility in a single sweep");
      std::cout << "repro n5 z0_alt: feasible in one sweep\n";
      return 0;
    }
    RunResult r = run_feasibility(sc.instance, family, sc.start("z0"), cfg);
    if (r.status != Status::Oscillating) return fail("expected oscillation");
    std::set<double> roas;
    for (double x : r.cycle.roas) roas.insert(std::round(x * 1e9) / 1e9);
    bool has19 = roas.count(std::round(1.0 / 9 * 1e9) / 1e9) > 0;
    bool has29 = roas.count(std::round(2.0 / 9 * 1e9) / 1e9) > 0;
    if (!has19 || !has29) return fail("expected roa values 1/9 and 2/9");
    auto moves = map_move_trajectory(sc.instance, family, sc.start("z0"),
                                     OrderKind::Position, 1.0, 80, cfg.sweep);
    std::set<std::uint64_t> distinct;
    for (std::size_t k = moves.size() - 60; k < moves.size(); ++k)
      distinct.insert(placement_hash(moves[k], 1e-6));
    if (distinct.size() != 12) return fail("expected twelve distinct positions");
    std::cout << "repro n5: oscillation over twelve positions, roa 11.1%/22.2%, "
              << "sweep period " << r.cycle.period << "\n";
    return 0;
  }
  if (example == "n3") {
    OrderKind kind = variant == "area" ? OrderKind::Area : OrderKind::Position;
    cfg.order = kind;
    RunResult r = run_feasibility(sc.instance, family, sc.start("z0"), cfg);
    if (r.status != Status::Oscillating || r.cycle.period != 1)
      return fail("expected a stuck state");
    if (kind == OrderKind::Position && r.cycle.first_index != 0)
      return fail("position order should hold the start state");
    if (kind == OrderKind::Area && r.cycle.first_index != 1)
      return fail("area order should move once and then hold");
    std::cout << "repro n3 (" << to_string(kind) << " order): stuck at roa "
              << r.cycle.mean_roa * 100 << "%\n";
    return 0;
  }
  if (example == "n3v") {
    cfg.order = OrderKind::Area;
    double lam = variant.empty() ? 1.8 : std::stod(variant);
    cfg.sweep.lambda = lam;
    RunResult r = run_feasibility(sc.instance, family, sc.start("z0"), cfg);
    if (r.status != Status::Oscillating) return fail("expected oscillation");
    bool stuck_range = lam <= 1.5;
    if (stuck_range && r.cycle.period != 1) return fail("expected a stuck state");
    if (!stuck_range && r.cycle.period != 4 && r.cycle.period != 2)
      return fail("expected a short cycle");
    std::cout << "repro n3v lambda=" << lam << ": "
              << (r.cycle.period == 1
                      ? std::string("stuck")
                      : "cycle period " + std::to_string(r.cycle.period))
              << "\n";
    return 0;
  }
  return fail("unknown example");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasibility-seeking fixed-outline floorplanner"};
  app.require_subcommand(1);
  Options opt;

  auto add_instance_flags = [&](CLI::App* cmd) {
    cmd->add_option("--synthetic", opt.synthetic_name,
                    "built-in instance: n3, n3v, n4, n5");
    cmd->add_option("--start", opt.start, "named start of the synthetic instance");
    cmd->add_option("--blocks", opt.blocks, "bookshelf blocks file");
    cmd->add_option("--nets", opt.nets, "bookshelf nets file");
    cmd->add_option("--pl", opt.pl, "bookshelf pl file");
    cmd->add_option("--die-width", opt.die_w, "die width (with --die-height)");
    cmd->add_option("--die-height", opt.die_h, "die height");
    cmd->add_option("--whitespace", opt.whitespace,
                    "whitespace fraction when the die is derived");
    cmd->add_option("--aspect", opt.aspect, "die aspect ratio W:H when derived");
    cmd->add_option("--out", opt.out_dir, "output directory (env FSFP_OUT_DIR)");
    cmd->add_option("--seed", opt.seed, "random seed");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the floorplanning pipeline");
  add_instance_flags(solve);
  solve->add_option("--mode", opt.mode, "map | rmap | per-rmap");
  solve->add_option("--order", opt.order, "area | position | random");
  solve->add_option("--init", opt.init, "auto | qp | start");
  solve->add_option("--lambda", opt.lambda, "relaxation parameter in (0, 2]");
  solve->add_option("--epsilon", opt.epsilon, "preference softmax temperature");
  solve->add_option("--S", opt.S, "reset threshold");
  solve->add_flag("--simultaneous-reset", opt.simultaneous_reset,
                  "a trip clears all four counters of the pair");
  solve->add_option("--tie-break", opt.tie_break, "rotate | precedence");
  solve->add_option("--roa-threshold", opt.roa_threshold, "feasibility threshold");
  solve->add_option("--max-sweeps", opt.max_sweeps, "sweep cap for map/rmap");
  solve->add_option("--num", opt.num, "perturbations per iteration");
  solve->add_option("--lambda-min", opt.lambda_min, "minimum perturbation length");
  solve->add_option("--lambda-init", opt.lambda_init, "initial perturbation length");
  solve->add_option("--Lambda", opt.decay, "perturbation decay kernel in (0, 1)");
  solve->add_option("--gamma-init", opt.gamma_init, "initial projection length");
  solve->add_option("--Gamma", opt.gamma_growth, "projection progress factor");
  solve->add_option("--theta", opt.theta, "post-processing decay fraction");
  solve->add_option("--max-iterations", opt.max_iterations, "per-rmap iteration cap");
  solve->add_flag("!--no-post", opt.post, "skip the post-processing rerun");
  solve->add_flag("--io-assign", opt.io_assign,
                  "treat I/O pins as movable on their boundary sides");
  solve->add_option("--pitch", opt.pitch, "I/O legalization pitch (0: derived)");

  CLI::App* analyze = app.add_subcommand("analyze", "attraction-radius report");
  add_instance_flags(analyze);
  std::string placement_path;
  int verify = 0;
  analyze->add_option("--placement", placement_path, "pl file with the placement");
  analyze->add_option("--verify", verify, "run N in-ball trajectories");

  CLI::App* repro = app.add_subcommand("repro", "reproduce a documented scenario");
  std::string example, variant;
  repro->add_option("example", example, "n3 | n3v | n4 | n5")->required();
  repro->add_option("--variant", variant, "scenario variant (order, start or lambda)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(opt);
    if (analyze->parsed()) return run_analyze(opt, placement_path, verify);
    if (repro->parsed()) return run_repro(example, variant);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
