#pragma once

#include "mrfsi/coupled_forms.hpp"

#include <map>
#include <memory>
#include <utility>
#include <vector>

namespace mrfsi {

/// Unknown and equation layout of the all-at-once system of one macro
/// interval: fluid nodes m = 1..M, each [u_f; v_f], then solid nodes
/// l = 1..L, each [u_s; v_s]. Equation rows use the same layout, with the
/// psi-test rows aligned to u and the phi-test rows aligned to v.
struct MacroLayout {
  int nf = 0;
  int ns = 0;
  int M = 0;
  int L = 0;

  int fluid_offset(int m) const { return (m - 1) * 2 * nf; }
  int solid_offset(int l) const { return M * 2 * nf + (l - 1) * 2 * ns; }
  int size() const { return M * 2 * nf + L * 2 * ns; }
  /// Length of a macro node state [u_f; v_f; u_s; v_s].
  int state_size() const { return 2 * nf + 2 * ns; }
};

/// Block form of the macro step: current * X_n + previous * x_{n-1} = source.
/// `previous` acts on the packed node state at t_{n-1}.
struct MacroMatrices {
  MacroLayout layout;
  SparseMatrix current;
  SparseMatrix previous;
};

MacroLayout macro_layout(const TimePartition& p, int n, const OperatorSet& ops);
MacroMatrices assemble_macro_matrices(const TimePartition& p, int n, const OperatorSet& ops);
Vector macro_source(const TimePartition& p, int n, const OperatorSet& ops);

/// Initial-value rows at t_0 over the packed node state: mass matrices on
/// u_f, v_f, u_s, v_s.
SparseMatrix initial_matrix(const OperatorSet& ops);

Vector pack_state(const FieldState& fluid, const FieldState& solid);
std::pair<FieldState, FieldState> unpack_state(const Vector& x, int nf, int ns);
Vector pack_macro(const MacroLayout& lay, const std::vector<FieldState>& fluid, const std::vector<FieldState>& solid);
void unpack_macro(const MacroLayout& lay, const Vector& x, std::vector<FieldState>& fluid,
                  std::vector<FieldState>& solid);
/// Packed state at t_n extracted from a macro unknown vector.
Vector macro_end_state(const MacroLayout& lay, const Vector& x);

/// Cached LU factorizations of macro matrices keyed by the micro step
/// pattern (fluid and solid tick lengths), which fully determines them.
class MacroFactorCache {
 public:
  explicit MacroFactorCache(const OperatorSet& ops) : ops_(&ops) {}

  struct Entry {
    MacroMatrices matrices;
    Eigen::SparseLU<SparseMatrix> lu;
  };
  Entry& get(const TimePartition& p, int n);

 private:
  using Key = std::pair<std::vector<Tick>, std::vector<Tick>>;
  const OperatorSet* ops_;
  std::map<Key, std::unique_ptr<Entry>> entries_;
};

}  // namespace mrfsi
