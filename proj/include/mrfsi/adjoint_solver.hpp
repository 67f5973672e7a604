#pragma once

#include "mrfsi/goal.hpp"
#include "mrfsi/macro_system.hpp"

#include <vector>

namespace mrfsi {

/// Piecewise-constant adjoint. Each FieldState pairs with the test rows of
/// one micro interval: `u` holds the multiplier of the psi-rows (y), `v` that
/// of the phi-rows (z). `*_initial` is the extra value at t_0.
struct AdjointTrajectory {
  std::vector<FieldState> fluid;
  std::vector<FieldState> solid;
  FieldState fluid_initial;
  FieldState solid_initial;

  const std::vector<FieldState>& of(Subdomain s) const { return s == Subdomain::fluid ? fluid : solid; }
  std::vector<FieldState>& of(Subdomain s) { return s == Subdomain::fluid ? fluid : solid; }
  const FieldState& initial(Subdomain s) const { return s == Subdomain::fluid ? fluid_initial : solid_initial; }
};

enum class AdjointMethod { monolithic, relaxation };

const char* to_string(AdjointMethod m);
AdjointMethod parse_adjoint_method(const std::string& name);

struct AdjointConfig {
  AdjointMethod method = AdjointMethod::monolithic;
  double tau = 0.7;
  /// Relative l-infinity change of the solid block between sweeps.
  double tol = 1e-13;
  int max_iter = 500;
};

/// Backward macro loop on the transposed block system. The goal load is
/// given per global micro node of each subdomain (empty vector: zero load).
AdjointTrajectory solve_adjoint(const TimePartition& p, const OperatorSet& ops, const std::vector<FieldState>& fluid_load,
                                const std::vector<FieldState>& solid_load, const AdjointConfig& cfg = {});

/// Convenience overload: load from goal_derivative_load(J, U).
AdjointTrajectory solve_adjoint(const TimePartition& p, const OperatorSet& ops, const GoalFunctional& J,
                                const PrimalTrajectory& U, const AdjointConfig& cfg = {});

}  // namespace mrfsi
