#include "fsfp/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace fsfp {

const char* to_string(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
  }
  return "?";
}

double Instance::total_module_area() const {
  double a = 0.0;
  for (const Module& m : modules) a += m.area();
  return a;
}

void Instance::validate() const {
  if (!(die.width > 0.0) || !(die.height > 0.0))
    throw std::invalid_argument("die region must have positive width and height");
  for (Index i = 0; i < modules.size(); ++i) {
    const Module& m = modules[i];
    if (!(m.width > 0.0) || !(m.height > 0.0))
      throw std::invalid_argument("module " + m.name + " has non-positive dimensions");
    if (m.width > die.width || m.height > die.height)
      throw std::invalid_argument("module " + m.name + " does not fit in the die");
  }
  for (const Net& net : nets) {
    for (const PinRef& p : net.pins) {
      if (p.entity >= entity_count())
        throw std::invalid_argument("net " + net.name + " references unknown entity");
      if (!is_io(p.entity)) {
        const Module& m = modules[p.entity];
        if (p.dx < -1e-9 || p.dx > m.width + 1e-9 || p.dy < -1e-9 || p.dy > m.height + 1e-9)
          throw std::invalid_argument("net " + net.name + " pin offset outside module " + m.name);
      }
    }
  }
}

Placement::Placement(std::vector<double> z) : z_(std::move(z)) {
  if (z_.size() % 2 != 0)
    throw std::invalid_argument("flat coordinate vector must have even length");
  n_ = z_.size() / 2;
}

double overlap_area(const Instance& inst, const Placement& z, Index i, Index j) {
  if (i == j || i >= inst.module_count() || j >= inst.module_count())
    throw std::invalid_argument("overlap_area: invalid module ids");
  const Module& mi = inst.modules[i];
  const Module& mj = inst.modules[j];
  double w = std::min(z.x(i) + mi.width, z.x(j) + mj.width) - std::max(z.x(i), z.x(j));
  double h = std::min(z.y(i) + mi.height, z.y(j) + mj.height) - std::max(z.y(i), z.y(j));
  return std::max(0.0, w) * std::max(0.0, h);
}

double total_overlap_area(const Instance& inst, const Placement& z) {
  double total = 0.0;
  for (Index i = 0; i + 1 < inst.module_count(); ++i)
    for (Index j = i + 1; j < inst.module_count(); ++j)
      total += overlap_area(inst, z, i, j);
  return total;
}

double roa(const Instance& inst, const Placement& z) {
  return total_overlap_area(inst, z) / inst.die.area();
}

Point pin_position(const Instance& inst, const Placement& z, const PinRef& pin) {
  if (pin.entity >= inst.entity_count())
    throw std::invalid_argument("pin_position: dangling owner");
  return {z.x(pin.entity) + pin.dx, z.y(pin.entity) + pin.dy};
}

double placement_distance(const Placement& a, const Placement& b) {
  double s = 0.0;
  auto za = a.raw();
  auto zb = b.raw();
  for (Index k = 0; k < za.size(); ++k) {
    double d = za[k] - zb[k];
    s += d * d;
  }
  return std::sqrt(s);
}

std::uint64_t placement_hash(const Placement& z, double tol) {
  std::uint64_t h = 1469598103934665603ull;  // FNV offset basis
  for (double v : z.raw()) {
    auto q = static_cast<std::int64_t>(std::llround(v / tol));
    auto u = static_cast<std::uint64_t>(q);
    for (int b = 0; b < 8; ++b) {
      h ^= (u >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

}  // namespace fsfp
