#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsfp/engine.hpp"
#include "fsfp/model.hpp"

namespace fsfp {

// Die geometry, either explicit or derived from the total module area, a
// whitespace fraction, and an aspect ratio (W : H).
struct DieSpec {
  std::optional<Region> explicit_region;
  double whitespace = 0.15;
  double aspect = 1.0;

  Region resolve(double total_module_area) const;
};

struct LoadedInstance {
  Instance instance;
  Placement initial;  // module positions and terminal coordinates from the pl file
};

// Bookshelf-style blocks/nets/pl ingestion. Parse failures throw
// std::runtime_error with file name and line number.
LoadedInstance load_instance(const std::filesystem::path& blocks,
                             const std::filesystem::path& nets,
                             const std::filesystem::path& pl, const DieSpec& die);

// Positions from a pl file for an already-loaded instance.
Placement load_placement(const Instance& inst, const std::filesystem::path& pl);

struct SyntheticCase {
  Instance instance;
  // Named initial placements documented for the case.
  std::vector<std::pair<std::string, Placement>> starts;

  const Placement& start(const std::string& name) const;
};

// Built-in instances n3, n3v, n4, n5. Throws on unknown names.
SyntheticCase synthetic(const std::string& name);

// pl-format output with full double precision; fixed entities carry /FIXED.
void write_placement(const Instance& inst, const Placement& z,
                     const std::filesystem::path& path);

// Companion writers so an instance round-trips through the parser.
void write_blocks(const Instance& inst, const std::filesystem::path& path);
void write_nets(const Instance& inst, const std::filesystem::path& path);

// Deterministic SVG rendering: die outline, one labelled rectangle per
// module, I/O pins as ticks.
void write_svg(const Instance& inst, const Placement& z,
               const std::filesystem::path& path);

void write_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory,
                          const std::filesystem::path& path,
                          bool superiorized_columns = false);

}  // namespace fsfp
