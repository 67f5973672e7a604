#pragma once

#include "mrfsi/adjoint_solver.hpp"

#include <vector>

namespace mrfsi {

/// Polynomial in the local time s in [0, 1] of one micro interval:
/// c0 + c1 s + c2 s^2.
struct TimePoly {
  FieldState c0;
  FieldState c1;
  FieldState c2;

  FieldState at(double s) const;
  /// Time derivative at s for an interval of length k.
  FieldState rate(double s, double k) const;

  static TimePoly constant(const FieldState& a);
  static TimePoly linear(const FieldState& a, const FieldState& b);
  /// Quadratic through values at s = 0, 1/2, 1.
  static TimePoly quadratic(const FieldState& a, const FieldState& mid, const FieldState& b);
};

/// A space-time function on the multirate partition: one polynomial per
/// micro interval of each subdomain, plus the value paired by the initial
/// rows at t_0 (meaningful for test functions).
struct SpaceTimeFunction {
  std::vector<TimePoly> fluid;
  std::vector<TimePoly> solid;
  FieldState fluid_initial;
  FieldState solid_initial;

  const std::vector<TimePoly>& of(Subdomain s) const { return s == Subdomain::fluid ? fluid : solid; }
  std::vector<TimePoly>& of(Subdomain s) { return s == Subdomain::fluid ? fluid : solid; }
};

SpaceTimeFunction from_trajectory(const PrimalTrajectory& U);
SpaceTimeFunction from_adjoint(const AdjointTrajectory& Z);
SpaceTimeFunction difference(const SpaceTimeFunction& a, const SpaceTimeFunction& b);

/// B(trial)(test) evaluated term by term with two-point Gauss in time per
/// micro interval, localized twice: by the micro interval of the test
/// function and by the micro interval of the trial function. Terms coupling
/// a trial function of the other subdomain through the macro interpolation
/// are attributed to the last micro interval of that subdomain in the
/// macro interval.
struct FormLocalization {
  std::vector<double> test_fluid;
  std::vector<double> test_solid;
  std::vector<double> trial_fluid;
  std::vector<double> trial_solid;
  double total = 0.0;

  const std::vector<double>& by_test(Subdomain s) const { return s == Subdomain::fluid ? test_fluid : test_solid; }
  const std::vector<double>& by_trial(Subdomain s) const { return s == Subdomain::fluid ? trial_fluid : trial_solid; }
};

FormLocalization evaluate_form(const TimePartition& p, const OperatorSet& ops, const SpaceTimeFunction& trial,
                               const SpaceTimeFunction& test);

/// F(test) per micro interval of one subdomain, integrated exactly in time.
std::vector<double> source_pairing(const TimePartition& p, const OperatorSet& ops, const SpaceTimeFunction& test,
                                   Subdomain s);

/// J'(U)(Xi) per micro interval of the goal's owning subdomain, Xi taken at
/// the Gauss points.
std::vector<double> goal_derivative_pairing(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops,
                                            const PrimalTrajectory& U, const SpaceTimeFunction& xi);

}  // namespace mrfsi
