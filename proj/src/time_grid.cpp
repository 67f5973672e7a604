#include "mrfsi/time_grid.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace mrfsi {

namespace {

std::vector<Patch> tile_patches(const std::vector<Tick>& nodes) {
  std::vector<Patch> patches;
  const int count = static_cast<int>(nodes.size()) - 1;
  int i = 0;
  for (; i + 1 < count; i += 2) patches.push_back({nodes[i], nodes[i + 2], 2});
  if (i < count) patches.push_back({nodes[i], nodes[i + 1], 1});
  return patches;
}

std::string where(Subdomain s, int index) {
  std::ostringstream os;
  os << to_string(s) << " #" << index;
  return os.str();
}

}  // namespace

TimePartition::TimePartition(double horizon, Tick horizon_ticks, std::vector<MacroInterval> macros,
                             std::vector<Patch> fluid_patches, std::vector<Patch> solid_patches)
    : horizon_(horizon),
      horizon_ticks_(horizon_ticks),
      macros_(std::move(macros)),
      fluid_patches_(std::move(fluid_patches)),
      solid_patches_(std::move(solid_patches)) {
  index();
}

void TimePartition::index() {
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    auto& nodes = s == Subdomain::fluid ? fluid_nodes_ : solid_nodes_;
    auto& offset = s == Subdomain::fluid ? fluid_offset_ : solid_offset_;
    auto& macro_of = s == Subdomain::fluid ? fluid_macro_of_ : solid_macro_of_;
    nodes.clear();
    offset.clear();
    macro_of.clear();
    for (int n = 0; n < macro_count(); ++n) {
      const auto& local = macros_[n].nodes(s);
      if (local.empty()) continue;
      offset.push_back(nodes.empty() ? 0 : static_cast<int>(nodes.size()) - 1);
      auto first = local.begin();
      if (!nodes.empty() && nodes.back() == local.front()) ++first;
      nodes.insert(nodes.end(), first, local.end());
      for (std::size_t m = 1; m < local.size(); ++m) macro_of.push_back(n);
    }
  }
}

int TimePartition::patch_of_interval(Subdomain s, int interval) const {
  const auto& ps = patches(s);
  const Tick t = nodes(s)[interval];
  auto it = std::upper_bound(ps.begin(), ps.end(), t, [](Tick v, const Patch& p) { return v < p.begin; });
  if (it == ps.begin()) throw std::out_of_range("interval not covered by any patch");
  return static_cast<int>(std::distance(ps.begin(), it)) - 1;
}

TimePartition uniform_partition(double T, int N, int M, int L) {
  if (!(T > 0.0)) throw std::invalid_argument("horizon T must be > 0");
  if (N < 1 || M < 1 || L < 1) throw std::invalid_argument("macro and micro counts N, M, L must be >= 1");
  const Tick lcm = std::lcm(static_cast<Tick>(M), static_cast<Tick>(L));
  if (static_cast<double>(N) * static_cast<double>(lcm) >= static_cast<double>(Tick{1} << 22))
    throw std::invalid_argument("N * lcm(M, L) too large for the dyadic tick lattice");
  const Tick per_macro = lcm << kDyadicLevels;
  std::vector<MacroInterval> macros(N);
  for (int n = 0; n < N; ++n) {
    const Tick a = n * per_macro;
    for (int m = 0; m <= M; ++m) macros[n].fluid.push_back(a + m * (per_macro / M));
    for (int l = 0; l <= L; ++l) macros[n].solid.push_back(a + l * (per_macro / L));
  }
  TimePartition tmp(T, N * per_macro, macros, {}, {});
  return TimePartition(T, N * per_macro, std::move(macros), tile_patches(tmp.nodes(Subdomain::fluid)),
                       tile_patches(tmp.nodes(Subdomain::solid)));
}

std::vector<std::string> validate(const TimePartition& p) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& what) { errors.push_back(what); };

  if (p.macro_count() == 0) {
    fail("no macro intervals");
    return errors;
  }
  for (int n = 0; n < p.macro_count(); ++n) {
    const MacroInterval& I = p.macro(n);
    const std::string at = "macro " + std::to_string(n);
    if (I.fluid.size() < 2 || I.solid.size() < 2) {
      fail("empty micro mesh in " + at);
      continue;
    }
    for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
      const auto& v = I.nodes(s);
      for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] <= v[i - 1]) fail(std::string("non-increasing ") + to_string(s) + " nodes in " + at);
    }
    if (I.fluid.front() != I.solid.front() || I.fluid.back() != I.solid.back())
      fail("micro endpoints differ from macro endpoints in " + at);
    if (n == 0 && I.begin() != 0) fail("first macro interval does not start at 0");
    if (n > 0 && p.macro(n - 1).end() != I.begin()) fail("gap between macro intervals at " + at);
    if (n + 1 == p.macro_count() && I.end() != p.horizon_ticks()) fail("last macro interval does not end at T");

    std::vector<Tick> shared;
    std::set_intersection(I.fluid.begin() + 1, I.fluid.end() - 1, I.solid.begin() + 1, I.solid.end() - 1,
                          std::back_inserter(shared));
    for (Tick t : shared) {
      std::ostringstream os;
      os << "shared interior node t=" << p.time(t) << " in " << at;
      fail(os.str());
    }
  }
  if (!errors.empty()) return errors;

  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const auto& nodes = p.nodes(s);
    const auto& ps = p.patches(s);
    Tick expected_begin = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const Patch& pa = ps[k];
      const std::string at = "patch " + where(s, static_cast<int>(k));
      if (pa.begin != expected_begin) {
        fail("patches do not tile the micro mesh at " + at);
        break;
      }
      auto lo = std::lower_bound(nodes.begin(), nodes.end(), pa.begin);
      auto hi = std::lower_bound(nodes.begin(), nodes.end(), pa.end);
      if (lo == nodes.end() || *lo != pa.begin || hi == nodes.end() || *hi != pa.end) {
        fail("patch endpoints are not micro nodes at " + at);
        break;
      }
      const auto inside = std::distance(lo, hi);
      if (inside != pa.count || (pa.count != 1 && pa.count != 2)) {
        fail("patch does not hold exactly its intervals at " + at);
      } else if (pa.count == 2 && (*(lo + 1) - *lo) != (*hi - *(lo + 1))) {
        fail("unequal patch lengths at " + at);
      } else if (pa.count == 1 && k + 1 != ps.size()) {
        fail("single-interval patch before the end of the horizon at " + at);
      }
      expected_begin = pa.end;
    }
    if (expected_begin != nodes.back()) fail(std::string("patches do not cover the ") + to_string(s) + " mesh");
  }
  return errors;
}

TimePartition refine(const TimePartition& p, const MarkSet& marks) {
  if (marks.empty()) return p;

  std::vector<Tick> new_nodes[2];
  std::vector<Patch> new_patches[2];
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const int k = static_cast<int>(s);
    const auto& nodes = p.nodes(s);
    const int count = p.micro_count(s);
    std::vector<char> marked(count, 0);
    for (int i : marks.of(s)) {
      if (i < 0 || i >= count)
        throw std::invalid_argument("mark references a nonexistent " + std::string(to_string(s)) + " interval " +
                                    std::to_string(i));
      marked[i] = 1;
    }
    // patch closure
    std::vector<char> patch_marked(p.patches(s).size(), 0);
    for (int i = 0; i < count; ++i)
      if (marked[i]) patch_marked[p.patch_of_interval(s, i)] = 1;
    for (int i = 0; i < count; ++i)
      if (patch_marked[p.patch_of_interval(s, i)]) marked[i] = 1;

    for (int i = 0; i < count; ++i) {
      new_nodes[k].push_back(nodes[i]);
      if (marked[i]) {
        const Tick len = nodes[i + 1] - nodes[i];
        if (len % 2 != 0) throw std::runtime_error("dyadic refinement depth exhausted");
        new_nodes[k].push_back(nodes[i] + len / 2);
      }
    }
    new_nodes[k].push_back(nodes.back());

    for (std::size_t q = 0; q < p.patches(s).size(); ++q) {
      const Patch& pa = p.patches(s)[q];
      if (!patch_marked[q]) {
        new_patches[k].push_back(pa);
        continue;
      }
      auto lo = std::lower_bound(nodes.begin(), nodes.end(), pa.begin);
      for (int c = 0; c < pa.count; ++c) new_patches[k].push_back({*(lo + c), *(lo + c + 1), 2});
    }
  }

  auto slice = [](const std::vector<Tick>& v, Tick a, Tick b) {
    auto lo = std::lower_bound(v.begin(), v.end(), a);
    auto hi = std::upper_bound(v.begin(), v.end(), b);
    return std::vector<Tick>(lo, hi);
  };

  std::vector<MacroInterval> macros;
  for (const MacroInterval& old : p.macros()) {
    const std::vector<Tick> fluid = slice(new_nodes[0], old.begin(), old.end());
    const std::vector<Tick> solid = slice(new_nodes[1], old.begin(), old.end());
    std::vector<Tick> cuts;
    std::set_intersection(fluid.begin() + 1, fluid.end() - 1, solid.begin() + 1, solid.end() - 1,
                          std::back_inserter(cuts));
    Tick a = old.begin();
    cuts.push_back(old.end());
    for (Tick b : cuts) {
      macros.push_back({slice(fluid, a, b), slice(solid, a, b)});
      a = b;
    }
  }

  TimePartition out(p.horizon(), p.horizon_ticks(), std::move(macros), std::move(new_patches[0]),
                    std::move(new_patches[1]));
  const auto errors = validate(out);
  if (!errors.empty()) throw std::logic_error("refine produced an invalid partition: " + errors.front());
  return out;
}

void write_partition_text(std::ostream& out, const TimePartition& p) {
  const auto old_precision = out.precision(17);
  for (const MacroInterval& I : p.macros()) {
    out << p.time(I.begin()) << ' ' << p.time(I.end()) << " |";
    for (Tick t : I.fluid) out << ' ' << p.time(t);
    out << " |";
    for (Tick t : I.solid) out << ' ' << p.time(t);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace mrfsi
