#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fsfp {

using Index = std::size_t;

enum class Axis { X, Y };

enum class Side { Left, Right, Bottom, Top };

const char* to_string(Side s);

struct Region {
  double width = 0.0;
  double height = 0.0;
  double area() const { return width * height; }
};

struct Module {
  double width = 0.0;
  double height = 0.0;
  std::string name;
  double area() const { return width * height; }
};

// An I/O pin (net terminal). `x`/`y` is its home position from the pl file;
// when I/O assignment is active the pin becomes movable along its boundary side.
struct IoPin {
  double x = 0.0;
  double y = 0.0;
  bool fixed = true;
  std::optional<Side> side;
  std::string name;
};

// A net pin. `entity` indexes modules first, then I/O pins; the offset is
// measured from the owner module's bottom-left corner (zero for I/O pins).
struct PinRef {
  Index entity = 0;
  double dx = 0.0;
  double dy = 0.0;
};

struct Net {
  std::vector<PinRef> pins;
  std::string name;
};

struct Instance {
  Region die;
  std::vector<Module> modules;
  std::vector<IoPin> io_pins;
  std::vector<Net> nets;
  std::string name;

  Index module_count() const { return modules.size(); }
  Index io_count() const { return io_pins.size(); }
  Index entity_count() const { return modules.size() + io_pins.size(); }
  bool is_io(Index entity) const { return entity >= modules.size(); }
  Index io_entity(Index io_index) const { return modules.size() + io_index; }

  double total_module_area() const;

  // Throws std::invalid_argument on degenerate dimensions, modules larger
  // than the die, or dangling net references.
  void validate() const;
};

// The flat coordinate vector z of length 2N (x block then y block), where
// N counts modules plus I/O pins. (x_i, y_i) of a module is its bottom-left
// corner. The flat<->(entity, axis) index map is a bijection.
class Placement {
 public:
  Placement() = default;
  explicit Placement(Index entities, double value = 0.0)
      : n_(entities), z_(2 * entities, value) {}
  explicit Placement(std::vector<double> z);

  Index entities() const { return n_; }
  Index size() const { return z_.size(); }

  Index x_index(Index e) const { return e; }
  Index y_index(Index e) const { return n_ + e; }
  Index coord_index(Index e, Axis a) const { return a == Axis::X ? e : n_ + e; }
  Index entity_of(Index flat) const { return flat < n_ ? flat : flat - n_; }
  Axis axis_of(Index flat) const { return flat < n_ ? Axis::X : Axis::Y; }

  double x(Index e) const { return z_[e]; }
  double y(Index e) const { return z_[n_ + e]; }
  double& x(Index e) { return z_[e]; }
  double& y(Index e) { return z_[n_ + e]; }
  double coord(Index e, Axis a) const { return a == Axis::X ? x(e) : y(e); }
  double& coord(Index e, Axis a) { return a == Axis::X ? x(e) : y(e); }

  double operator[](Index flat) const { return z_[flat]; }
  double& operator[](Index flat) { return z_[flat]; }

  std::span<const double> raw() const { return z_; }
  std::span<double> raw() { return z_; }

  bool operator==(const Placement&) const = default;

 private:
  Index n_ = 0;
  std::vector<double> z_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Pairwise intersection area of two module rectangles. Throws on invalid ids.
double overlap_area(const Instance& inst, const Placement& z, Index i, Index j);

double total_overlap_area(const Instance& inst, const Placement& z);

// Relative overlapping area: total pairwise overlap divided by the die area.
double roa(const Instance& inst, const Placement& z);

// Absolute position of a pin: owner bottom-left plus offset for module pins,
// the coordinate stored in z for I/O pins.
Point pin_position(const Instance& inst, const Placement& z, const PinRef& pin);

double placement_distance(const Placement& a, const Placement& b);

// Quantized FNV-1a hash of the coordinates; equal within `tol` per coordinate
// implies (modulo bin edges) equal hashes. Used for trajectory logs.
std::uint64_t placement_hash(const Placement& z, double tol);

}  // namespace fsfp
