#include "mrfsi/dwr_estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mrfsi {

namespace {

FieldState affine(const FieldState& a, double wa, const FieldState& b, double wb) {
  return {wa * a.u + wb * b.u, wa * a.v + wb * b.v};
}

// Linear function through (ta, za) and (tb, zb) evaluated at t.
FieldState line(double ta, const FieldState& za, double tb, const FieldState& zb, double t) {
  const double w = (t - ta) / (tb - ta);
  return affine(za, 1.0 - w, zb, w);
}

FieldState lagrange3(const std::array<double, 3>& tn, const std::array<const FieldState*, 3>& f, double t) {
  FieldState out = FieldState::zero(static_cast<int>(f[0]->u.size()));
  for (int j = 0; j < 3; ++j) {
    double w = 1.0;
    for (int k = 0; k < 3; ++k)
      if (k != j) w *= (t - tn[k]) / (tn[j] - tn[k]);
    out.u += w * f[j]->u;
    out.v += w * f[j]->v;
  }
  return out;
}

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

SpaceTimeFunction reconstruct_adjoint(const AdjointTrajectory& Z, const TimePartition& p) {
  SpaceTimeFunction out;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const auto& z = Z.of(s);
    const auto& nodes = p.nodes(s);
    const int count = static_cast<int>(z.size());
    auto mid = [&](int i) { return 0.5 * (static_cast<double>(nodes[i]) + static_cast<double>(nodes[i + 1])); };
    for (int i = 0; i < count; ++i) {
      if (count == 1) {
        out.of(s).push_back(TimePoly::constant(z[i]));
        continue;
      }
      int lo = i - 1, hi = i + 1;
      if (i == 0) lo = 0, hi = 1;
      if (i == count - 1) lo = count - 2, hi = count - 1;
      const double a = static_cast<double>(nodes[i]);
      const double b = static_cast<double>(nodes[i + 1]);
      out.of(s).push_back(
          TimePoly::linear(line(mid(lo), z[lo], mid(hi), z[hi], a), line(mid(lo), z[lo], mid(hi), z[hi], b)));
    }
  }
  out.fluid_initial = Z.fluid_initial;
  out.solid_initial = Z.solid_initial;
  return out;
}

SpaceTimeFunction reconstruct_primal(const PrimalTrajectory& U, const TimePartition& p) {
  SpaceTimeFunction out;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const auto& u = U.of(s);
    const auto& nodes = p.nodes(s);
    const int count = p.micro_count(s);
    for (int i = 0; i < count; ++i) {
      if (count == 1) {
        out.of(s).push_back(TimePoly::linear(u[0], u[1]));
        continue;
      }
      const Patch& pa = p.patches(s)[p.patch_of_interval(s, i)];
      int j0 = static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), pa.begin) - nodes.begin());
      if (pa.count == 1) j0 -= 1;
      const std::array<double, 3> tn{static_cast<double>(nodes[j0]), static_cast<double>(nodes[j0 + 1]),
                                     static_cast<double>(nodes[j0 + 2])};
      const std::array<const FieldState*, 3> f{&u[j0], &u[j0 + 1], &u[j0 + 2]};
      const double a = static_cast<double>(nodes[i]);
      const double b = static_cast<double>(nodes[i + 1]);
      out.of(s).push_back(TimePoly::quadratic(u[i], lagrange3(tn, f, 0.5 * (a + b)), u[i + 1]));
    }
  }
  out.fluid_initial = U.fluid.front();
  out.solid_initial = U.solid.front();
  return out;
}

IndicatorSet primal_indicators(const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U,
                               const AdjointTrajectory& Z) {
  const SpaceTimeFunction weight = difference(reconstruct_adjoint(Z, p), from_adjoint(Z));
  const FormLocalization B = evaluate_form(p, ops, from_trajectory(U), weight);
  IndicatorSet out;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const auto F = source_pairing(p, ops, weight, s);
    auto& dst = s == Subdomain::fluid ? out.fluid : out.solid;
    dst.resize(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) dst[i] = 0.5 * (F[i] - B.by_test(s)[i]);
  }
  return out;
}

IndicatorSet adjoint_indicators(const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U,
                                const AdjointTrajectory& Z, const GoalFunctional& J) {
  const SpaceTimeFunction weight = difference(reconstruct_primal(U, p), from_trajectory(U));
  const FormLocalization B = evaluate_form(p, ops, weight, from_adjoint(Z));
  const auto Jp = goal_derivative_pairing(J, p, ops, U, weight);
  IndicatorSet out;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const auto& b = B.by_trial(s);
    auto& dst = s == Subdomain::fluid ? out.fluid : out.solid;
    dst.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) dst[i] = 0.5 * ((s == J.owner() ? Jp[i] : 0.0) - b[i]);
  }
  return out;
}

double total_estimate(const ErrorBreakdown& e) {
  return e.theta_f_total + e.theta_s_total + e.vartheta_f_total + e.vartheta_s_total;
}

double indicator_average(const ErrorBreakdown& e) {
  double f = 0.0, s = 0.0;
  for (std::size_t i = 0; i < e.theta_f.size(); ++i) f += std::abs(e.theta_f[i]) + std::abs(e.vartheta_f[i]);
  for (std::size_t i = 0; i < e.theta_s.size(); ++i) s += std::abs(e.theta_s[i]) + std::abs(e.vartheta_s[i]);
  double out = 0.0;
  if (!e.theta_f.empty()) out += f / (2.0 * static_cast<double>(e.theta_f.size()));
  if (!e.theta_s.empty()) out += s / (2.0 * static_cast<double>(e.theta_s.size()));
  return out;
}

ErrorBreakdown estimate_error(const TimePartition& p, const OperatorSet& ops, const PrimalTrajectory& U,
                              const AdjointTrajectory& Z, const GoalFunctional& J) {
  ErrorBreakdown e;
  IndicatorSet th = primal_indicators(p, ops, U, Z);
  IndicatorSet vt = adjoint_indicators(p, ops, U, Z, J);
  e.theta_f = std::move(th.fluid);
  e.theta_s = std::move(th.solid);
  e.vartheta_f = std::move(vt.fluid);
  e.vartheta_s = std::move(vt.solid);
  e.theta_f_total = sum(e.theta_f);
  e.theta_s_total = sum(e.theta_s);
  e.vartheta_f_total = sum(e.vartheta_f);
  e.vartheta_s_total = sum(e.vartheta_s);
  e.sigma = total_estimate(e);
  e.sigma_bar = indicator_average(e);
  return e;
}

Extrapolation extrapolate_reference(double j_coarse, double j_mid, double j_fine) {
  const double d1 = j_coarse - j_mid;
  const double d2 = j_mid - j_fine;
  Extrapolation out;
  const double ratio = d2 != 0.0 ? d1 / d2 : 0.0;
  if (d2 != 0.0 && ratio > 1.0 && std::isfinite(ratio)) {
    out.rate = std::log2(ratio);
    out.value = j_fine - d2 / (ratio - 1.0);
    return out;
  }
  out.fallback = true;
  out.rate = 2.0;
  out.value = j_fine - d2 / 3.0;
  return out;
}

std::optional<double> effectivity(double sigma, double j_ref, double j_k) {
  const double err = j_ref - j_k;
  if (err == 0.0 || !std::isfinite(err)) return std::nullopt;
  return sigma / err;
}

}  // namespace mrfsi
