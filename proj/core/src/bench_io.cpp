#include "fsfp/bench_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fsfp {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& file, int line,
                             const std::string& msg) {
  throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + msg);
}

struct LineReader {
  std::ifstream in;
  std::filesystem::path path;
  int line_no = 0;

  explicit LineReader(const std::filesystem::path& p) : in(p), path(p) {
    if (!in) throw std::runtime_error("cannot open " + p.string());
  }

  // Next non-blank, non-comment line; leading/trailing whitespace stripped.
  bool next(std::string& out) {
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      auto b = raw.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) continue;
      auto e = raw.find_last_not_of(" \t\r\n");
      out = raw.substr(b, e - b + 1);
      if (out.rfind("UCSC", 0) == 0 || out.rfind("UCLA", 0) == 0) continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) { parse_fail(path, line_no, msg); }
};

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

bool header_value(const std::string& line, const std::string& key, long& value) {
  if (line.rfind(key, 0) != 0) return false;
  auto colon = line.find(':');
  if (colon == std::string::npos) return false;
  value = std::strtol(line.c_str() + colon + 1, nullptr, 10);
  return true;
}

double parse_double(LineReader& r, const std::string& tok) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str()) r.fail("expected a number, got '" + tok + "'");
  return v;
}

struct BlocksData {
  std::vector<Module> modules;
  std::vector<std::string> terminal_names;
};

BlocksData parse_blocks(const std::filesystem::path& path) {
  LineReader r(path);
  BlocksData out;
  long n_soft = 0, n_hard = -1, n_term = -1;
  std::string line;
  std::unordered_map<std::string, int> seen;
  while (r.next(line)) {
    if (header_value(line, "NumSoftRectangularBlocks", n_soft)) {
      if (n_soft > 0) r.fail("soft modules are not supported");
      continue;
    }
    if (header_value(line, "NumHardRectilinearBlocks", n_hard)) continue;
    if (header_value(line, "NumTerminals", n_term)) continue;

    auto tk = tokens(line);
    if (tk.size() >= 2 && tk[1] == "terminal") {
      if (!seen.emplace(tk[0], 1).second) r.fail("duplicate name '" + tk[0] + "'");
      out.terminal_names.push_back(tk[0]);
      continue;
    }
    if (tk.size() >= 3 && tk[1] == "hardrectilinear") {
      if (!seen.emplace(tk[0], 1).second) r.fail("duplicate name '" + tk[0] + "'");
      long nv = std::strtol(tk[2].c_str(), nullptr, 10);
      if (nv != 4) r.fail("module '" + tk[0] + "': only rectangles (4 vertices) are supported");
      // Vertices like (x, y), possibly split across tokens; collect numbers.
      std::string rest;
      for (std::size_t k = 3; k < tk.size(); ++k) rest += tk[k] + " ";
      for (char& c : rest)
        if (c == '(' || c == ')' || c == ',') c = ' ';
      auto nums = tokens(rest);
      if (nums.size() != 8) r.fail("module '" + tk[0] + "': expected 4 vertices");
      double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
      for (std::size_t v = 0; v < 4; ++v) {
        double x = parse_double(r, nums[2 * v]);
        double y = parse_double(r, nums[2 * v + 1]);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
      Module m;
      m.name = tk[0];
      m.width = xmax - xmin;
      m.height = ymax - ymin;
      out.modules.push_back(std::move(m));
      continue;
    }
    r.fail("unrecognized blocks line: '" + line + "'");
  }
  if (n_hard >= 0 && n_hard != static_cast<long>(out.modules.size()))
    parse_fail(path, r.line_no,
               "NumHardRectilinearBlocks=" + std::to_string(n_hard) + " but " +
                   std::to_string(out.modules.size()) + " blocks parsed");
  if (n_term >= 0 && n_term != static_cast<long>(out.terminal_names.size()))
    parse_fail(path, r.line_no,
               "NumTerminals=" + std::to_string(n_term) + " but " +
                   std::to_string(out.terminal_names.size()) + " terminals parsed");
  return out;
}

void parse_nets(const std::filesystem::path& path, Instance& inst,
                const std::unordered_map<std::string, Index>& by_name) {
  LineReader r(path);
  long n_nets = -1, n_pins = -1;
  std::string line;
  long degree_left = 0;
  long pins_parsed = 0;
  while (r.next(line)) {
    long v = 0;
    if (header_value(line, "NumNets", n_nets)) continue;
    if (header_value(line, "NumPins", n_pins)) continue;
    if (header_value(line, "NetDegree", v)) {
      if (degree_left > 0) r.fail("previous net is short of pins");
      Net net;
      auto tk = tokens(line);
      net.name = tk.size() >= 4 ? tk[3] : "net" + std::to_string(inst.nets.size());
      inst.nets.push_back(std::move(net));
      degree_left = v;
      continue;
    }
    if (degree_left <= 0) r.fail("pin line outside a net: '" + line + "'");
    auto tk = tokens(line);
    auto it = by_name.find(tk[0]);
    if (it == by_name.end()) r.fail("unknown entity '" + tk[0] + "' in net");
    PinRef pin;
    pin.entity = it->second;
    if (!inst.is_io(pin.entity)) {
      const Module& m = inst.modules[pin.entity];
      // Default pin location is the module center; explicit offsets are
      // center-relative (bookshelf convention), absolute units or %dimension.
      double offx = 0.0, offy = 0.0;
      auto colon = std::find(tk.begin(), tk.end(), ":");
      if (colon != tk.end()) {
        if (std::distance(colon, tk.end()) < 3) r.fail("expected two offsets after ':'");
        auto off = [&](const std::string& t, double dim) {
          if (!t.empty() && t[0] == '%') return parse_double(r, t.substr(1)) / 100.0 * dim;
          return parse_double(r, t);
        };
        offx = off(*(colon + 1), m.width);
        offy = off(*(colon + 2), m.height);
      }
      pin.dx = m.width / 2.0 + offx;
      pin.dy = m.height / 2.0 + offy;
    }
    inst.nets.back().pins.push_back(pin);
    --degree_left;
    ++pins_parsed;
  }
  if (degree_left > 0) parse_fail(path, r.line_no, "last net is short of pins");
  if (n_nets >= 0 && n_nets != static_cast<long>(inst.nets.size()))
    parse_fail(path, r.line_no, "NumNets mismatch: header " + std::to_string(n_nets) +
                                    ", parsed " + std::to_string(inst.nets.size()));
  if (n_pins >= 0 && n_pins != pins_parsed)
    parse_fail(path, r.line_no, "NumPins mismatch: header " + std::to_string(n_pins) +
                                    ", parsed " + std::to_string(pins_parsed));
}

void parse_pl(const std::filesystem::path& path, const Instance& inst,
              const std::unordered_map<std::string, Index>& by_name, Placement& z,
              std::vector<bool>* seen_out = nullptr) {
  LineReader r(path);
  std::string line;
  std::vector<bool> seen(inst.entity_count(), false);
  while (r.next(line)) {
    auto tk = tokens(line);
    if (tk.size() < 3) r.fail("expected 'name x y': '" + line + "'");
    auto it = by_name.find(tk[0]);
    if (it == by_name.end()) r.fail("unknown entity '" + tk[0] + "' in pl file");
    Index e = it->second;
    z.x(e) = parse_double(r, tk[1]);
    z.y(e) = parse_double(r, tk[2]);
    seen[e] = true;
  }
  if (seen_out) *seen_out = std::move(seen);
}

std::unordered_map<std::string, Index> name_map(const Instance& inst) {
  std::unordered_map<std::string, Index> by_name;
  for (Index m = 0; m < inst.module_count(); ++m) by_name[inst.modules[m].name] = m;
  for (Index p = 0; p < inst.io_count(); ++p)
    by_name[inst.io_pins[p].name] = inst.io_entity(p);
  return by_name;
}

}  // namespace

Region DieSpec::resolve(double total_module_area) const {
  if (explicit_region) return *explicit_region;
  if (!(whitespace >= 0.0) || whitespace >= 1.0)
    throw std::invalid_argument("die spec: whitespace fraction must be in [0, 1)");
  double area = total_module_area / (1.0 - whitespace);
  Region r;
  r.width = std::sqrt(area * aspect);
  r.height = area / r.width;
  return r;
}

LoadedInstance load_instance(const std::filesystem::path& blocks,
                             const std::filesystem::path& nets,
                             const std::filesystem::path& pl, const DieSpec& die) {
  LoadedInstance out;
  Instance& inst = out.instance;
  inst.name = blocks.stem().string();

  BlocksData bd = parse_blocks(blocks);
  inst.modules = std::move(bd.modules);
  for (const std::string& t : bd.terminal_names) {
    IoPin pin;
    pin.name = t;
    pin.fixed = true;
    inst.io_pins.push_back(std::move(pin));
  }
  inst.die = die.resolve(inst.total_module_area());

  auto by_name = name_map(inst);
  parse_nets(nets, inst, by_name);

  out.initial = Placement(inst.entity_count());
  parse_pl(pl, inst, by_name, out.initial);
  for (Index p = 0; p < inst.io_count(); ++p) {
    inst.io_pins[p].x = out.initial.x(inst.io_entity(p));
    inst.io_pins[p].y = out.initial.y(inst.io_entity(p));
  }
  inst.validate();
  return out;
}

Placement load_placement(const Instance& inst, const std::filesystem::path& pl) {
  Placement z(inst.entity_count());
  auto by_name = name_map(inst);
  parse_pl(pl, inst, by_name, z);
  return z;
}

const Placement& SyntheticCase::start(const std::string& name) const {
  for (const auto& [n, p] : starts)
    if (n == name) return p;
  throw std::invalid_argument("synthetic case has no start named '" + name + "'");
}

namespace {

Instance make_instance(const std::string& name, double W, double H,
                       const std::vector<double>& w, const std::vector<double>& h) {
  Instance inst;
  inst.name = name;
  inst.die = {W, H};
  for (std::size_t k = 0; k < w.size(); ++k) {
    Module m;
    m.width = w[k];
    m.height = h[k];
    m.name = "m" + std::to_string(k + 1);
    inst.modules.push_back(std::move(m));
  }
  return inst;
}

Placement flat(std::vector<double> z) { return Placement(std::move(z)); }

}  // namespace

SyntheticCase synthetic(const std::string& name) {
  SyntheticCase out;
  if (name == "n3") {
    out.instance = make_instance(name, 11, 11, {3, 4, 5}, {3, 4, 5});
    out.starts.emplace_back("z0", flat({0, 2, 6, 4, 2, 0}));
  } else if (name == "n3v") {
    out.instance = make_instance(name, 5, 11, {2, 2, 2}, {3, 4, 5});
    out.starts.emplace_back("z0", flat({0, 1, 3, 2, 1, 0}));
  } else if (name == "n4") {
    out.instance = make_instance(name, 8, 12, {4, 8, 6, 4}, {4, 4, 4, 4});
    // The two states of the sweep-to-sweep oscillation: module 1 at the
    // bottom, module 4 on top, modules 2 and 3 wedged in between with the
    // lower one alternating. The vertical chains 1-2-4 and 1-3-4 keep
    // modules 1 and 4 apart, so no feasible point is reachable.
    out.starts.emplace_back("z0", flat({0, 0, 0, 0, 0, 2, 4, 8}));
    out.starts.emplace_back("alt", flat({0, 0, 0, 0, 0, 4, 2, 8}));
  } else if (name == "n5") {
    out.instance = make_instance(name, 3, 3, {1, 2, 1, 2, 1}, {1, 1, 2, 1, 2});
    out.starts.emplace_back("z0", flat({2, 1, 1, 1, 0, 1, 2, 0, 0, 1}));
    out.starts.emplace_back("z0_alt", flat({1, 1, 1.5, 0.5, 0, 1, 2, 0, 0, 1}));
  } else {
    throw std::invalid_argument("unknown synthetic instance '" + name + "'");
  }
  out.instance.validate();
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_placement(const Instance& inst, const Placement& z,
                     const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "UCLA pl 1.0\n";
  for (Index m = 0; m < inst.module_count(); ++m)
    out << inst.modules[m].name << " " << fmt(z.x(m)) << " " << fmt(z.y(m)) << "\n";
  for (Index p = 0; p < inst.io_count(); ++p) {
    Index e = inst.io_entity(p);
    out << inst.io_pins[p].name << " " << fmt(z.x(e)) << " " << fmt(z.y(e));
    if (inst.io_pins[p].fixed) out << " /FIXED";
    out << "\n";
  }
}

void write_blocks(const Instance& inst, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "UCSC blocks 1.0\n\n";
  out << "NumSoftRectangularBlocks : 0\n";
  out << "NumHardRectilinearBlocks : " << inst.module_count() << "\n";
  out << "NumTerminals : " << inst.io_count() << "\n\n";
  for (const Module& m : inst.modules) {
    out << m.name << " hardrectilinear 4 (0, 0) (0, " << fmt(m.height) << ") ("
        << fmt(m.width) << ", " << fmt(m.height) << ") (" << fmt(m.width) << ", 0)\n";
  }
  for (const IoPin& p : inst.io_pins) out << p.name << " terminal\n";
}

void write_nets(const Instance& inst, const std::filesystem::path& path) {
  auto out = open_out(path);
  std::size_t pins = 0;
  for (const Net& n : inst.nets) pins += n.pins.size();
  out << "UCLA nets 1.0\n\n";
  out << "NumNets : " << inst.nets.size() << "\n";
  out << "NumPins : " << pins << "\n\n";
  for (const Net& n : inst.nets) {
    out << "NetDegree : " << n.pins.size() << " " << n.name << "\n";
    for (const PinRef& p : n.pins) {
      if (inst.is_io(p.entity)) {
        out << inst.io_pins[p.entity - inst.module_count()].name << " B\n";
      } else {
        const Module& m = inst.modules[p.entity];
        out << m.name << " B : " << fmt(p.dx - m.width / 2.0) << " "
            << fmt(p.dy - m.height / 2.0) << "\n";
      }
    }
  }
}

void write_svg(const Instance& inst, const Placement& z,
               const std::filesystem::path& path) {
  auto out = open_out(path);
  double W = inst.die.width, H = inst.die.height;
  double scale = 720.0 / std::max(W, H);
  double margin = 24.0;
  auto X = [&](double x) { return margin + x * scale; };
  auto Y = [&](double y) { return margin + (H - y) * scale; };  // flip to screen coords

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(2 * margin + W * scale)
      << "\" height=\"" << fmt6(2 * margin + H * scale) << "\">\n";
  out << "<rect x=\"" << fmt6(X(0)) << "\" y=\"" << fmt6(Y(H)) << "\" width=\""
      << fmt6(W * scale) << "\" height=\"" << fmt6(H * scale)
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";
  for (Index m = 0; m < inst.module_count(); ++m) {
    const Module& mod = inst.modules[m];
    int hue = static_cast<int>((m * 47) % 360);
    out << "<rect x=\"" << fmt6(X(z.x(m))) << "\" y=\"" << fmt6(Y(z.y(m) + mod.height))
        << "\" width=\"" << fmt6(mod.width * scale) << "\" height=\""
        << fmt6(mod.height * scale) << "\" fill=\"hsl(" << hue
        << ",60%,75%)\" fill-opacity=\"0.8\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt6(X(z.x(m) + mod.width / 2.0)) << "\" y=\""
        << fmt6(Y(z.y(m) + mod.height / 2.0))
        << "\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"middle\">"
        << mod.name << "</text>\n";
  }
  for (Index p = 0; p < inst.io_count(); ++p) {
    Index e = inst.io_entity(p);
    out << "<rect x=\"" << fmt6(X(z.x(e)) - 3) << "\" y=\"" << fmt6(Y(z.y(e)) - 3)
        << "\" width=\"6\" height=\"6\" fill=\"black\"/>\n";
  }
  out << "</svg>\n";
}

void write_trajectory_csv(const std::vector<TrajectoryPoint>& trajectory,
                          const std::filesystem::path& path, bool superiorized_columns) {
  auto out = open_out(path);
  out << "sweep,roa,hpwl,cycle_flag";
  if (superiorized_columns) out << ",gamma_proj,ell";
  out << "\n";
  for (const TrajectoryPoint& p : trajectory) {
    out << p.sweep << "," << fmt(p.roa) << "," << fmt(p.hpwl) << "," << p.cycle_flag;
    if (superiorized_columns) out << "," << fmt(p.gamma_proj) << "," << p.decay_index;
    out << "\n";
  }
}

}  // namespace fsfp
