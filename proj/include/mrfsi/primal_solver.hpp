#pragma once

#include "mrfsi/coupled_forms.hpp"
#include "mrfsi/macro_system.hpp"

#include <string>
#include <vector>

namespace mrfsi {

enum class DecouplingMethod { relaxation, shooting, monolithic };

const char* to_string(DecouplingMethod m);
DecouplingMethod parse_method(const std::string& name);

struct DecouplerConfig {
  DecouplingMethod method = DecouplingMethod::shooting;
  double tau = 0.7;
  /// Finite-difference scale factor; the probe step is
  /// fd_scale * (1 + |x|_2) / |d|_2. Zero selects sqrt(machine epsilon).
  double fd_scale = 0.0;
  double gmres_tol = 1e-3;
  /// Zero means the interface unknown count.
  int gmres_max_iter = 0;
  /// Interface l-infinity stopping tolerance.
  double tol = 1e-12;
  int max_iter = 200;

  void check() const;
};

struct IterationStats {
  int macro_index = 0;
  int iterations = 0;
  int evaluations = 0;
  double final_residual = 0.0;
  int newton_iterations = 0;
  std::vector<int> gmres_iterations;
  std::vector<double> residual_history;
};

/// Thrown when an iteration exceeds its budget; carries the residual history.
class DivergenceError : public SolverError {
 public:
  DivergenceError(const std::string& what, std::vector<double> history)
      : SolverError(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

/// States of one macro interval: fluid at t_{f,n}^1..M, solid at t_{s,n}^1..L.
struct MacroStates {
  std::vector<FieldState> fluid;
  std::vector<FieldState> solid;
};

struct MacroStepResult {
  MacroStates states;
  IterationStats stats;
};

/// Per-run solver: owns the micro and macro factorization caches.
class MacroStepper {
 public:
  MacroStepper(const TimePartition& p, const OperatorSet& ops, DecouplerConfig cfg = {});

  const TimePartition& partition() const { return *p_; }
  const OperatorSet& ops() const { return *ops_; }
  const DecouplerConfig& config() const { return cfg_; }

  /// One decoupling-function evaluation: fluid sweep driven by the guessed
  /// solid trace at t_n, then solid sweep driven by the resulting fluid flux.
  MacroStates decouple_step_function(int n, const InterfaceTrace& guess, const FieldState& fluid_begin,
                                     const FieldState& solid_begin);

  MacroStates monolithic_macro_solve(int n, const FieldState& fluid_begin, const FieldState& solid_begin);
  MacroStepResult relax_macro_step(int n, const FieldState& fluid_begin, const FieldState& solid_begin);
  MacroStepResult shoot_macro_step(int n, const FieldState& fluid_begin, const FieldState& solid_begin);
  /// Dispatches on the configured method.
  MacroStepResult step(int n, const FieldState& fluid_begin, const FieldState& solid_begin);

  MacroFactorCache& macro_cache() { return macro_cache_; }

 private:
  const TimePartition* p_;
  const OperatorSet* ops_;
  DecouplerConfig cfg_;
  MicroSolverCache micro_;
  MacroFactorCache macro_cache_;
};

struct PrimalSolution {
  PrimalTrajectory trajectory;
  std::vector<IterationStats> stats;
};

/// Zero initial state, sequential macro loop.
PrimalSolution solve_primal(const TimePartition& p, const OperatorSet& ops, const DecouplerConfig& cfg);

/// Interface trace vector [u; v] of a solid trace and its inverse.
Vector trace_vector(const InterfaceTrace& t);
InterfaceTrace trace_from_vector(const Vector& x);

}  // namespace mrfsi
