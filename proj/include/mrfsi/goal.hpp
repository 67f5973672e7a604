#pragma once

#include "mrfsi/coupled_forms.hpp"

#include <string>
#include <vector>

namespace mrfsi {

enum class GoalKind { fluid, solid };

const char* to_string(GoalKind k);
GoalKind parse_goal(const std::string& name);

/// Gradient energy on the right half of one subdomain:
/// fluid: int nu |grad v_f|^2, solid: int lambda |grad u_s|^2.
struct GoalFunctional {
  GoalKind kind = GoalKind::fluid;

  Subdomain owner() const { return kind == GoalKind::fluid ? Subdomain::fluid : Subdomain::solid; }
  double coefficient(const PhysicalParams& p) const { return kind == GoalKind::fluid ? p.nu : p.lambda; }
  const SparseMatrix& stiffness(const OperatorSet& ops) const {
    return kind == GoalKind::fluid ? ops.goal_stiffness_f : ops.goal_stiffness_s;
  }
  /// The state component the integrand depends on.
  const Vector& field(const FieldState& s) const { return kind == GoalKind::fluid ? s.v : s.u; }
  Vector& field(FieldState& s) const { return kind == GoalKind::fluid ? s.v : s.u; }
};

/// Two-point Gauss in time on every micro interval of the owning subdomain.
double goal_value(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U);

/// Nodal representation of J'(U): for every global micro node of the owning
/// subdomain, the full FieldState-shaped load (zero in the unused component),
/// so that J'(U)(Xi) = sum_nodes load . Xi(node) for piecewise-linear Xi.
std::vector<FieldState> goal_derivative_load(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops,
                                             const PrimalTrajectory& U);

/// Contribution of micro interval i of the owning subdomain to J'(U)(Xi),
/// with Xi given at the two Gauss points of that interval.
double goal_derivative_interval(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops,
                                const PrimalTrajectory& U, int interval, const FieldState& xi_g1,
                                const FieldState& xi_g2);

}  // namespace mrfsi
