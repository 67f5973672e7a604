#pragma once

#include "mrfsi/space_disc.hpp"
#include "mrfsi/time_grid.hpp"

#include <map>
#include <memory>
#include <vector>

namespace mrfsi {

/// Nodal displacement/velocity coefficients of one subdomain at one time.
struct FieldState {
  Vector u;
  Vector v;

  static FieldState zero(int n) { return {Vector::Zero(n), Vector::Zero(n)}; }
};

/// Interface data one subproblem hands to the other.
///
/// Solid traces carry (u_s, v_s) at the interface positions. Fluid traces
/// additionally carry `flux`, the interface load <nu d_{n_f} v_f, phi_s>,
/// which is what the solid equation actually consumes.
struct InterfaceTrace {
  Subdomain owner = Subdomain::solid;
  Vector u;
  Vector v;
  Vector flux;
};

/// Primal solution: one state per micro node of each subdomain, global node
/// order (index 0 is t_0). Piecewise linear in time between nodes.
struct PrimalTrajectory {
  std::vector<FieldState> fluid;
  std::vector<FieldState> solid;

  const std::vector<FieldState>& of(Subdomain s) const { return s == Subdomain::fluid ? fluid : solid; }
  std::vector<FieldState>& of(Subdomain s) { return s == Subdomain::fluid ? fluid : solid; }
};

/// Weights (w_begin, w_end) of the linear-in-time nodal interpolation over
/// macro interval n evaluated at tick t. Throws if t lies outside I_n.
std::pair<double, double> macro_weights(const TimePartition& p, int n, Tick t);

/// Solid state seen by the fluid problem at time t in I_n: linear
/// interpolation of the solid macro endpoint states.
FieldState interp_fluid(const TimePartition& p, int n, const FieldState& solid_begin, const FieldState& solid_end,
                        Tick t);
/// Fluid state seen by the solid problem at time t in I_n.
FieldState interp_solid(const TimePartition& p, int n, const FieldState& fluid_begin, const FieldState& fluid_end,
                        Tick t);

InterfaceTrace blend(const InterfaceTrace& a, const InterfaceTrace& b, double wa, double wb);

/// Exact integral of g^2(t) = 1_[floor t, floor t + 1/10)(t) over [a, b].
double source_time_integral(double a, double b);
/// Exact integral of g^2(t) (t - a) / (b - a) over [a, b].
double source_time_moment(double a, double b);

InterfaceTrace solid_trace(const OperatorSet& ops, const FieldState& solid);
InterfaceTrace fluid_trace(const OperatorSet& ops, const FieldState& fluid);

/// Sparse LU factorizations of the micro-step systems, one per distinct
/// step length. Not thread-safe: each solver owns its cache.
class MicroSolverCache {
 public:
  explicit MicroSolverCache(const OperatorSet& ops);

  const OperatorSet& ops() const { return *ops_; }
  /// (K - N + P) on the fluid displacement.
  const Eigen::SparseLU<SparseMatrix>& extension();
  /// M_f + k/2 (nu K + C - nu N + P).
  const Eigen::SparseLU<SparseMatrix>& fluid_step(Tick length, double k);
  /// Coupled (u_s, v_s) Crank-Nicolson block for step k.
  const Eigen::SparseLU<SparseMatrix>& solid_step(Tick length, double k);

 private:
  const OperatorSet* ops_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> extension_;
  std::map<Tick, std::unique_ptr<Eigen::SparseLU<SparseMatrix>>> fluid_;
  std::map<Tick, std::unique_ptr<Eigen::SparseLU<SparseMatrix>>> solid_;
};

/// Left-hand side of the solid micro step, rows (psi, phi) over unknowns (u, v).
SparseMatrix solid_step_matrix(const OperatorSet& ops, double k);

/// Fluid micro steps on I_n with the solid interface data interpolated
/// between the two given traces. Returns the states at t_{f,n}^1..t_{f,n}^{M_n}.
std::vector<FieldState> fluid_macro_sweep(const TimePartition& p, int n, MicroSolverCache& cache,
                                          const FieldState& fluid_begin, const InterfaceTrace& solid_begin,
                                          const InterfaceTrace& solid_end);

/// Solid micro steps on I_n driven by the interpolated fluid flux. Returns
/// the states at t_{s,n}^1..t_{s,n}^{L_n}.
std::vector<FieldState> solid_macro_sweep(const TimePartition& p, int n, MicroSolverCache& cache,
                                          const FieldState& solid_begin, const InterfaceTrace& fluid_begin,
                                          const InterfaceTrace& fluid_end);

}  // namespace mrfsi
