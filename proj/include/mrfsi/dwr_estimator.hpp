#pragma once

#include "mrfsi/spacetime_form.hpp"

#include <optional>
#include <vector>

namespace mrfsi {

/// Localized DWR indicators, signed, one per micro interval.
struct ErrorBreakdown {
  std::vector<double> theta_f;
  std::vector<double> theta_s;
  std::vector<double> vartheta_f;
  std::vector<double> vartheta_s;

  double theta_f_total = 0.0;
  double theta_s_total = 0.0;
  double vartheta_f_total = 0.0;
  double vartheta_s_total = 0.0;
  double sigma = 0.0;
  double sigma_bar = 0.0;

  const std::vector<double>& theta(Subdomain s) const { return s == Subdomain::fluid ? theta_f : theta_s; }
  const std::vector<double>& vartheta(Subdomain s) const { return s == Subdomain::fluid ? vartheta_f : vartheta_s; }
};

/// Piecewise-linear adjoint through neighboring interval midpoints. The
/// first and last intervals extrapolate from their own midpoint and their
/// single neighbor; a lone interval stays constant.
SpaceTimeFunction reconstruct_adjoint(const AdjointTrajectory& Z, const TimePartition& p);

/// Patchwise quadratic Lagrange interpolant of the nodal primal states. A
/// single-interval patch borrows the node left of it.
SpaceTimeFunction reconstruct_primal(const PrimalTrajectory& U, const TimePartition& p);

struct IndicatorSet {
  std::vector<double> fluid;
  std::vector<double> solid;
};

/// theta: 1/2 (F - B(U_k))(Z^(1) - Z_k), sorted by test subdomain interval.
IndicatorSet primal_indicators(const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U,
                               const AdjointTrajectory& Z);

/// vartheta: 1/2 (J' - B(.)(Z_k))(U^(2) - U_k), sorted by trial subdomain interval.
IndicatorSet adjoint_indicators(const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U,
                                const AdjointTrajectory& Z, const GoalFunctional& J);

/// Signed sum of the four totals.
double total_estimate(const ErrorBreakdown& e);
/// Absolute-value average with the 1/(2M) and 1/(2L) weights, M and L the
/// total fluid and solid micro interval counts.
double indicator_average(const ErrorBreakdown& e);

/// Indicators, totals, sigma and sigma_bar in one pass.
ErrorBreakdown estimate_error(const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U,
                              const AdjointTrajectory& Z, const GoalFunctional& J);

struct Extrapolation {
  double value = 0.0;
  double rate = 0.0;
  /// True when the differences were not monotone and p = 2 was assumed.
  bool fallback = false;
};

/// Fits J_k = J + C k^p through three values on meshes with step ratio 2,
/// ordered coarse to fine.
Extrapolation extrapolate_reference(double j_coarse, double j_mid, double j_fine);

/// sigma / (J_ref - J_k); empty when the denominator vanishes.
std::optional<double> effectivity(double sigma, double j_ref, double j_k);

}  // namespace mrfsi
