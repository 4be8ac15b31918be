#include "fsfp/init_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fsfp {

namespace {

struct Endpoint {
  bool movable = false;
  Index var = 0;      // unknown slot when movable
  double cx = 0.0;    // absolute position when fixed
  double cy = 0.0;
  double ox = 0.0;    // offset folded into the spring length
  double oy = 0.0;
};

struct Builder {
  Index n = 0;
  std::vector<std::map<Index, double>> rows;
  std::vector<double> rhs_x, rhs_y;
  std::vector<std::vector<Index>> adjacency;
  std::vector<bool> anchored;

  explicit Builder(Index unknowns)
      : n(unknowns), rows(unknowns), rhs_x(unknowns, 0.0), rhs_y(unknowns, 0.0),
        adjacency(unknowns), anchored(unknowns, false) {}

  void spring(const Endpoint& a, const Endpoint& b, double w) {
    if (a.movable && b.movable) {
      rows[a.var][a.var] += w;
      rows[b.var][b.var] += w;
      rows[a.var][b.var] -= w;
      rows[b.var][a.var] -= w;
      rhs_x[a.var] += w * (b.ox - a.ox);
      rhs_x[b.var] += w * (a.ox - b.ox);
      rhs_y[a.var] += w * (b.oy - a.oy);
      rhs_y[b.var] += w * (a.oy - b.oy);
      adjacency[a.var].push_back(b.var);
      adjacency[b.var].push_back(a.var);
    } else if (a.movable || b.movable) {
      const Endpoint& v = a.movable ? a : b;
      const Endpoint& f = a.movable ? b : a;
      rows[v.var][v.var] += w;
      rhs_x[v.var] += w * (f.cx + f.ox - v.ox);
      rhs_y[v.var] += w * (f.cy + f.oy - v.oy);
      anchored[v.var] = true;
    }
  }
};

}  // namespace

QuadraticSystem build_system(const Instance& inst) {
  Index n_modules = inst.module_count();
  Index n_centers = 0;
  for (const Net& net : inst.nets)
    if (net.pins.size() > 3) ++n_centers;

  Builder b(n_modules + n_centers);

  auto endpoint = [&](const PinRef& pin) {
    Endpoint e;
    if (inst.is_io(pin.entity)) {
      const IoPin& io = inst.io_pins[pin.entity - n_modules];
      e.movable = false;
      e.cx = io.x;
      e.cy = io.y;
    } else {
      e.movable = true;
      e.var = pin.entity;
      e.ox = pin.dx;
      e.oy = pin.dy;
    }
    return e;
  };

  Index center = n_modules;
  for (const Net& net : inst.nets) {
    std::size_t p = net.pins.size();
    if (p < 2) continue;
    if (p <= 3) {
      double w = 1.0 / static_cast<double>(p - 1);
      for (std::size_t u = 0; u + 1 < p; ++u)
        for (std::size_t v = u + 1; v < p; ++v)
          b.spring(endpoint(net.pins[u]), endpoint(net.pins[v]), w);
    } else {
      double w = static_cast<double>(p) / static_cast<double>(p - 1);
      Endpoint c;
      c.movable = true;
      c.var = center++;
      for (const PinRef& pin : net.pins) b.spring(endpoint(pin), c, w);
    }
  }

  // Every connected component of unknowns must reach a fixed anchor,
  // otherwise the system is singular.
  {
    std::vector<int> comp(b.n, -1);
    int n_comp = 0;
    for (Index s = 0; s < b.n; ++s) {
      if (comp[s] >= 0) continue;
      std::vector<Index> stack{s};
      comp[s] = n_comp;
      bool has_anchor = false;
      while (!stack.empty()) {
        Index u = stack.back();
        stack.pop_back();
        if (b.anchored[u]) has_anchor = true;
        for (Index v : b.adjacency[u]) {
          if (comp[v] < 0) {
            comp[v] = n_comp;
            stack.push_back(v);
          }
        }
      }
      if (!has_anchor) {
        throw std::invalid_argument("build_system: floating component without a fixed anchor (unknown " +
                                    std::to_string(s) + ")");
      }
      ++n_comp;
    }
  }

  QuadraticSystem sys;
  sys.n_modules = n_modules;
  sys.n_centers = n_centers;
  sys.row_ptr.reserve(b.n + 1);
  sys.row_ptr.push_back(0);
  for (Index r = 0; r < b.n; ++r) {
    for (auto [c, v] : b.rows[r]) {
      sys.col.push_back(c);
      sys.val.push_back(v);
    }
    sys.row_ptr.push_back(sys.col.size());
  }
  sys.diag.resize(b.n, 0.0);
  for (Index r = 0; r < b.n; ++r)
    for (Index k = sys.row_ptr[r]; k < sys.row_ptr[r + 1]; ++k)
      if (sys.col[k] == r) sys.diag[r] = sys.val[k];
  sys.rhs_x = std::move(b.rhs_x);
  sys.rhs_y = std::move(b.rhs_y);
  return sys;
}

PcgResult solve_pcg(const QuadraticSystem& sys, const std::vector<double>& rhs,
                    double tol, int max_iter) {
  Index n = sys.n();
  if (rhs.size() != n) throw std::invalid_argument("solve_pcg: rhs size mismatch");
  if (max_iter <= 0) max_iter = static_cast<int>(10 * n) + 100;

  auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (Index r = 0; r < n; ++r) {
      double s = 0.0;
      for (Index k = sys.row_ptr[r]; k < sys.row_ptr[r + 1]; ++k)
        s += sys.val[k] * v[sys.col[k]];
      out[r] = s;
    }
  };
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (Index k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
  };

  PcgResult res;
  res.x.assign(n, 0.0);
  double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.0) return res;

  std::vector<double> r = rhs;          // r = b - A x0, x0 = 0
  std::vector<double> zvec(n), p(n), q(n);
  for (Index k = 0; k < n; ++k) zvec[k] = r[k] / sys.diag[k];
  p = zvec;
  double rz = dot(r, zvec);

  for (int it = 1; it <= max_iter; ++it) {
    apply(p, q);
    double alpha = rz / dot(p, q);
    for (Index k = 0; k < n; ++k) {
      res.x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    double rnorm = std::sqrt(dot(r, r));
    res.iterations = it;
    res.residual = rnorm / bnorm;
    if (rnorm <= tol * bnorm) return res;
    for (Index k = 0; k < n; ++k) zvec[k] = r[k] / sys.diag[k];
    double rz_new = dot(r, zvec);
    double beta = rz_new / rz;
    rz = rz_new;
    for (Index k = 0; k < n; ++k) p[k] = zvec[k] + beta * p[k];
  }
  throw std::runtime_error("solve_pcg: no convergence in " + std::to_string(max_iter) +
                           " iterations, relative residual " + std::to_string(res.residual));
}

Placement shift_small_modules(const Instance& inst, const Placement& z, double shift_ratio) {
  Placement out = z;
  if (inst.module_count() == 0) return out;
  double wmax = 0.0, hmax = 0.0;
  for (const Module& m : inst.modules) {
    wmax = std::max(wmax, m.width);
    hmax = std::max(hmax, m.height);
  }
  double W = inst.die.width, H = inst.die.height;
  for (Index m = 0; m < inst.module_count(); ++m) {
    const Module& mod = inst.modules[m];
    if (!(mod.width < shift_ratio * wmax || mod.height < shift_ratio * hmax)) continue;

    double cx = out.x(m) + mod.width / 2.0;
    double cy = out.y(m) + mod.height / 2.0;
    double ux = cx - W / 2.0;
    double uy = cy - H / 2.0;
    if (ux == 0.0 && uy == 0.0) ux = 1.0;  // dead center: default to the right edge

    // Smallest forward step along the ray at which the bounding box touches
    // a die edge.
    double s = std::numeric_limits<double>::infinity();
    if (ux > 0.0) s = std::min(s, (W - mod.width / 2.0 - cx) / ux);
    if (ux < 0.0) s = std::min(s, (mod.width / 2.0 - cx) / ux);
    if (uy > 0.0) s = std::min(s, (H - mod.height / 2.0 - cy) / uy);
    if (uy < 0.0) s = std::min(s, (mod.height / 2.0 - cy) / uy);
    if (!std::isfinite(s)) continue;
    s = std::max(0.0, s);

    double nx = cx + s * ux - mod.width / 2.0;
    double ny = cy + s * uy - mod.height / 2.0;
    out.x(m) = std::clamp(nx, 0.0, W - mod.width);
    out.y(m) = std::clamp(ny, 0.0, H - mod.height);
  }
  return out;
}

Placement initialize_placement(const Instance& inst, const InitConfig& cfg) {
  QuadraticSystem sys = build_system(inst);
  PcgResult px = solve_pcg(sys, sys.rhs_x, cfg.pcg_tol, cfg.pcg_max_iter);
  PcgResult py = solve_pcg(sys, sys.rhs_y, cfg.pcg_tol, cfg.pcg_max_iter);

  Placement z(inst.entity_count());
  for (Index m = 0; m < inst.module_count(); ++m) {
    z.x(m) = px.x[m];
    z.y(m) = py.x[m];
  }
  // Star centers are auxiliary: dropped here.
  for (Index p = 0; p < inst.io_count(); ++p) {
    z.x(inst.io_entity(p)) = inst.io_pins[p].x;
    z.y(inst.io_entity(p)) = inst.io_pins[p].y;
  }
  if (cfg.shift_enabled) z = shift_small_modules(inst, z, cfg.shift_ratio);
  return z;
}

}  // namespace fsfp
