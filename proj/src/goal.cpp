#include "mrfsi/goal.hpp"

#include "mrfsi/quadrature.hpp"

#include <stdexcept>

namespace mrfsi {

const char* to_string(GoalKind k) { return k == GoalKind::fluid ? "fluid" : "solid"; }

GoalKind parse_goal(const std::string& name) {
  if (name == "fluid") return GoalKind::fluid;
  if (name == "solid") return GoalKind::solid;
  throw std::invalid_argument("unknown functional '" + name + "' (expected fluid or solid)");
}

double goal_value(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U) {
  const Subdomain s = J.owner();
  const auto& states = U.of(s);
  const SparseMatrix& K = J.stiffness(ops);
  const double c = J.coefficient(ops.params);
  const auto q = gauss2_unit_points();
  double total = 0.0;
  for (int i = 0; i < p.micro_count(s); ++i) {
    const double k = p.interval_length(s, i);
    const Vector& w0 = J.field(states[i]);
    const Vector& w1 = J.field(states[i + 1]);
    double local = 0.0;
    for (double sq : q) {
      const Vector w = (1.0 - sq) * w0 + sq * w1;
      local += w.dot(K * w);
    }
    total += c * k / 2.0 * local;
  }
  return total;
}

std::vector<FieldState> goal_derivative_load(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops,
                                             const PrimalTrajectory& U) {
  const Subdomain s = J.owner();
  const int n = ops.size(s);
  const auto& states = U.of(s);
  const SparseMatrix& K = J.stiffness(ops);
  const double c = J.coefficient(ops.params);
  const auto q = gauss2_unit_points();
  std::vector<FieldState> load(states.size(), FieldState::zero(n));
  for (int i = 0; i < p.micro_count(s); ++i) {
    const double k = p.interval_length(s, i);
    const Vector& w0 = J.field(states[i]);
    const Vector& w1 = J.field(states[i + 1]);
    for (double sq : q) {
      const Vector g = (k * c) * (K * ((1.0 - sq) * w0 + sq * w1));
      J.field(load[i]) += (1.0 - sq) * g;
      J.field(load[i + 1]) += sq * g;
    }
  }
  return load;
}

double goal_derivative_interval(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops,
                                const PrimalTrajectory& U, int interval, const FieldState& xi_g1,
                                const FieldState& xi_g2) {
  const Subdomain s = J.owner();
  const auto& states = U.of(s);
  const SparseMatrix& K = J.stiffness(ops);
  const double c = J.coefficient(ops.params);
  const auto q = gauss2_unit_points();
  const double k = p.interval_length(s, interval);
  const Vector& w0 = J.field(states[interval]);
  const Vector& w1 = J.field(states[interval + 1]);
  const FieldState* xi[2] = {&xi_g1, &xi_g2};
  double total = 0.0;
  for (int g = 0; g < 2; ++g) {
    const Vector w = (1.0 - q[g]) * w0 + q[g] * w1;
    total += w.dot(K * J.field(*xi[g]));
  }
  return k * c * total;
}

}  // namespace mrfsi
