#pragma once

#include "mrfsi/types.hpp"

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace mrfsi {

/// Time nodes are exact integers on a fine dyadic lattice: t = T * tick / horizon_ticks.
using Tick = std::int64_t;

/// One macro interval with its two micro meshes. Both node lists include the
/// macro endpoints.
struct MacroInterval {
  std::vector<Tick> fluid;
  std::vector<Tick> solid;

  Tick begin() const { return fluid.front(); }
  Tick end() const { return fluid.back(); }
  const std::vector<Tick>& nodes(Subdomain s) const { return s == Subdomain::fluid ? fluid : solid; }
  int micro_count(Subdomain s) const { return static_cast<int>(nodes(s).size()) - 1; }
};

/// A reconstruction patch: `count` (1 or 2) consecutive micro intervals
/// spanning [begin, end]. A single-interval patch only appears at the end of
/// the horizon when the micro count is odd.
struct Patch {
  Tick begin = 0;
  Tick end = 0;
  int count = 2;

  friend bool operator==(const Patch&, const Patch&) = default;
};

/// Micro intervals flagged for refinement, by global index per subdomain.
struct MarkSet {
  std::set<int> fluid;
  std::set<int> solid;

  std::set<int>& of(Subdomain s) { return s == Subdomain::fluid ? fluid : solid; }
  const std::set<int>& of(Subdomain s) const { return s == Subdomain::fluid ? fluid : solid; }
  bool empty() const { return fluid.empty() && solid.empty(); }
};

/// Two-level multirate time partition: macro mesh shared by both
/// subproblems, independent fluid and solid micro meshes per macro interval,
/// and the patch pairing used by the quadratic reconstruction.
///
/// Construction does not check invariants; call validate().
class TimePartition {
 public:
  TimePartition() = default;
  TimePartition(double horizon, Tick horizon_ticks, std::vector<MacroInterval> macros, std::vector<Patch> fluid_patches,
                std::vector<Patch> solid_patches);

  double horizon() const { return horizon_; }
  Tick horizon_ticks() const { return horizon_ticks_; }
  double time(Tick t) const { return horizon_ * static_cast<double>(t) / static_cast<double>(horizon_ticks_); }
  /// Length of [a, b]; depends only on b - a, so equal tick lengths give bit-equal steps.
  double duration(Tick a, Tick b) const { return time(b - a); }

  int macro_count() const { return static_cast<int>(macros_.size()); }
  const MacroInterval& macro(int n) const { return macros_[n]; }
  const std::vector<MacroInterval>& macros() const { return macros_; }

  const std::vector<Patch>& patches(Subdomain s) const { return s == Subdomain::fluid ? fluid_patches_ : solid_patches_; }

  /// Global node list of one subdomain (t_0 first, macro endpoints once).
  const std::vector<Tick>& nodes(Subdomain s) const { return s == Subdomain::fluid ? fluid_nodes_ : solid_nodes_; }
  int micro_count(Subdomain s) const { return static_cast<int>(nodes(s).size()) - 1; }
  /// Global index of the first micro interval of macro n; the macro start
  /// node has the same global node index.
  int first_interval(Subdomain s, int n) const { return (s == Subdomain::fluid ? fluid_offset_ : solid_offset_)[n]; }
  int macro_of_interval(Subdomain s, int interval) const {
    return (s == Subdomain::fluid ? fluid_macro_of_ : solid_macro_of_)[interval];
  }
  double interval_begin(Subdomain s, int i) const { return time(nodes(s)[i]); }
  double interval_end(Subdomain s, int i) const { return time(nodes(s)[i + 1]); }
  double interval_length(Subdomain s, int i) const { return duration(nodes(s)[i], nodes(s)[i + 1]); }
  Tick interval_ticks(Subdomain s, int i) const { return nodes(s)[i + 1] - nodes(s)[i]; }

  /// Index of the patch holding a micro interval.
  int patch_of_interval(Subdomain s, int interval) const;

  friend bool operator==(const TimePartition& a, const TimePartition& b) {
    return a.horizon_ == b.horizon_ && a.horizon_ticks_ == b.horizon_ticks_ && a.fluid_nodes_ == b.fluid_nodes_ &&
           a.solid_nodes_ == b.solid_nodes_ && a.fluid_offset_ == b.fluid_offset_ &&
           a.solid_offset_ == b.solid_offset_ && a.fluid_patches_ == b.fluid_patches_ &&
           a.solid_patches_ == b.solid_patches_;
  }

 private:
  void index();

  double horizon_ = 0.0;
  Tick horizon_ticks_ = 0;
  std::vector<MacroInterval> macros_;
  std::vector<Patch> fluid_patches_;
  std::vector<Patch> solid_patches_;
  std::vector<Tick> fluid_nodes_;
  std::vector<Tick> solid_nodes_;
  std::vector<int> fluid_offset_;
  std::vector<int> solid_offset_;
  std::vector<int> fluid_macro_of_;
  std::vector<int> solid_macro_of_;
};

/// Number of bisection levels available below the initial micro nodes.
inline constexpr int kDyadicLevels = 40;

/// Equidistant partition: N macro intervals, M fluid and L solid micro
/// intervals in each. Patches tile each subdomain left to right across macro
/// boundaries; an odd total leaves a trailing single-interval patch.
TimePartition uniform_partition(double T, int N, int M, int L);

/// Every violated invariant, each with its location; empty means valid.
std::vector<std::string> validate(const TimePartition& p);

/// Patch-closed bisection of marked intervals followed by macro splitting at
/// coincident interior fluid/solid nodes. Nested: every old node persists.
TimePartition refine(const TimePartition& p, const MarkSet& marks);

/// Line-oriented text form: one line per macro interval,
/// "<t_begin> <t_end> | <fluid nodes> | <solid nodes>".
void write_partition_text(std::ostream& out, const TimePartition& p);

}  // namespace mrfsi
