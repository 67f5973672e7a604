#include "mrfsi/spacetime_form.hpp"

#include "mrfsi/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace mrfsi {

namespace {

FieldState lincomb(double a, const FieldState& x, double b, const FieldState& y) {
  return {a * x.u + b * y.u, a * x.v + b * y.v};
}

FieldState lincomb(double a, const FieldState& x, double b, const FieldState& y, double c, const FieldState& z) {
  return {a * x.u + b * y.u + c * z.u, a * x.v + b * y.v + c * z.v};
}

Vector restrict_to(const Vector& x, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
  return out;
}

double dot_on(const Vector& iface, const Vector& x, const std::vector<int>& idx) {
  double s = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) s += iface[static_cast<Eigen::Index>(i)] * x[idx[i]];
  return s;
}

// Exact integrals of g^2(t) s^j over [a, b], s = (t - a) / (b - a), j = 0, 1, 2.
std::array<double, 3> source_moments(double a, double b) {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  if (b <= a) return m;
  const double k = b - a;
  for (double j = std::floor(a); j <= b; j += 1.0) {
    const double lo = std::max(a, j);
    const double hi = std::min(b, j + 0.1);
    if (hi <= lo) continue;
    const double x0 = (lo - a) / k, x1 = (hi - a) / k;
    m[0] += hi - lo;
    m[1] += k * (x1 * x1 - x0 * x0) / 2.0;
    m[2] += k * (x1 * x1 * x1 - x0 * x0 * x0) / 3.0;
  }
  return m;
}

// Nodal value of a trial function at the start / end of macro interval n.
FieldState macro_node_value(const TimePartition& p, const SpaceTimeFunction& f, Subdomain s, int n, bool at_end) {
  const int first = p.first_interval(s, n);
  if (!at_end) return f.of(s)[first].at(0.0);
  return f.of(s)[first + p.macro(n).micro_count(s) - 1].at(1.0);
}

}  // namespace

FieldState TimePoly::at(double s) const { return lincomb(1.0, c0, s, c1, s * s, c2); }

FieldState TimePoly::rate(double s, double k) const { return lincomb(1.0 / k, c1, 2.0 * s / k, c2); }

TimePoly TimePoly::constant(const FieldState& a) {
  const FieldState z = FieldState::zero(static_cast<int>(a.u.size()));
  return {a, z, z};
}

TimePoly TimePoly::linear(const FieldState& a, const FieldState& b) {
  return {a, lincomb(1.0, b, -1.0, a), FieldState::zero(static_cast<int>(a.u.size()))};
}

TimePoly TimePoly::quadratic(const FieldState& a, const FieldState& mid, const FieldState& b) {
  return {a, lincomb(-3.0, a, 4.0, mid, -1.0, b), lincomb(2.0, a, -4.0, mid, 2.0, b)};
}

SpaceTimeFunction from_trajectory(const PrimalTrajectory& U) {
  SpaceTimeFunction f;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const auto& st = U.of(s);
    for (std::size_t i = 0; i + 1 < st.size(); ++i) f.of(s).push_back(TimePoly::linear(st[i], st[i + 1]));
  }
  f.fluid_initial = U.fluid.front();
  f.solid_initial = U.solid.front();
  return f;
}

SpaceTimeFunction from_adjoint(const AdjointTrajectory& Z) {
  SpaceTimeFunction f;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid})
    for (const auto& z : Z.of(s)) f.of(s).push_back(TimePoly::constant(z));
  f.fluid_initial = Z.fluid_initial;
  f.solid_initial = Z.solid_initial;
  return f;
}

SpaceTimeFunction difference(const SpaceTimeFunction& a, const SpaceTimeFunction& b) {
  SpaceTimeFunction d;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    if (a.of(s).size() != b.of(s).size()) throw std::invalid_argument("space-time functions on different meshes");
    for (std::size_t i = 0; i < a.of(s).size(); ++i) {
      const TimePoly& x = a.of(s)[i];
      const TimePoly& y = b.of(s)[i];
      d.of(s).push_back({lincomb(1.0, x.c0, -1.0, y.c0), lincomb(1.0, x.c1, -1.0, y.c1), lincomb(1.0, x.c2, -1.0, y.c2)});
    }
  }
  d.fluid_initial = lincomb(1.0, a.fluid_initial, -1.0, b.fluid_initial);
  d.solid_initial = lincomb(1.0, a.solid_initial, -1.0, b.solid_initial);
  return d;
}

FormLocalization evaluate_form(const TimePartition& p, const OperatorSet& ops, const SpaceTimeFunction& trial,
                               const SpaceTimeFunction& test) {
  const int MF = p.micro_count(Subdomain::fluid);
  const int MS = p.micro_count(Subdomain::solid);
  if (static_cast<int>(trial.fluid.size()) != MF || static_cast<int>(trial.solid.size()) != MS ||
      static_cast<int>(test.fluid.size()) != MF || static_cast<int>(test.solid.size()) != MS)
    throw std::invalid_argument("space-time function does not match the partition");

  FormLocalization out;
  out.test_fluid.assign(MF, 0.0);
  out.trial_fluid.assign(MF, 0.0);
  out.test_solid.assign(MS, 0.0);
  out.trial_solid.assign(MS, 0.0);
  const double lam = ops.params.lambda;
  const double del = ops.params.delta;
  const double nu = ops.params.nu;
  const auto q = gauss2_unit_points();

  for (int n = 0; n < p.macro_count(); ++n) {
    const MacroInterval& I = p.macro(n);
    const double macro_len = static_cast<double>(I.end() - I.begin());
    const int last_f = p.first_interval(Subdomain::fluid, n) + I.micro_count(Subdomain::fluid) - 1;
    const int last_s = p.first_interval(Subdomain::solid, n) + I.micro_count(Subdomain::solid) - 1;

    // interface data of the other field at the macro endpoints
    const FieldState s_begin = macro_node_value(p, trial, Subdomain::solid, n, false);
    const FieldState s_end = macro_node_value(p, trial, Subdomain::solid, n, true);
    const Vector su0 = restrict_to(s_begin.u, ops.interface_s), su1 = restrict_to(s_end.u, ops.interface_s);
    const Vector sv0 = restrict_to(s_begin.v, ops.interface_s), sv1 = restrict_to(s_end.v, ops.interface_s);
    const Vector fq0 = nu * (ops.flux * macro_node_value(p, trial, Subdomain::fluid, n, false).v);
    const Vector fq1 = nu * (ops.flux * macro_node_value(p, trial, Subdomain::fluid, n, true).v);

    for (int m = 0; m < I.micro_count(Subdomain::fluid); ++m) {
      const int i = p.first_interval(Subdomain::fluid, n) + m;
      const double k = p.interval_length(Subdomain::fluid, i);
      const double off = static_cast<double>(I.fluid[m] - I.begin());
      const double len = static_cast<double>(I.fluid[m + 1] - I.fluid[m]);
      double own = 0.0, cross = 0.0;
      for (double s : q) {
        const double w1 = (off + s * len) / macro_len, w0 = 1.0 - w1;
        const FieldState w = trial.fluid[i].at(s);
        const FieldState dw = trial.fluid[i].rate(s, k);
        const FieldState phi = test.fluid[i].at(s);
        own += (ops.extension_f * w.u).dot(phi.u) + (ops.transport_f * w.v).dot(phi.v) + (ops.mass_f * dw.v).dot(phi.v);
        cross -= (ops.penalty_cross * (w0 * su0 + w1 * su1)).dot(phi.u) +
                 (ops.penalty_cross * (w0 * sv0 + w1 * sv1)).dot(phi.v);
      }
      own *= k / 2.0;
      cross *= k / 2.0;
      out.test_fluid[i] += own + cross;
      out.trial_fluid[i] += own;
      out.trial_solid[last_s] += cross;
    }

    for (int l = 0; l < I.micro_count(Subdomain::solid); ++l) {
      const int i = p.first_interval(Subdomain::solid, n) + l;
      const double k = p.interval_length(Subdomain::solid, i);
      const double off = static_cast<double>(I.solid[l] - I.begin());
      const double len = static_cast<double>(I.solid[l + 1] - I.solid[l]);
      double own = 0.0, cross = 0.0;
      for (double s : q) {
        const double w1 = (off + s * len) / macro_len, w0 = 1.0 - w1;
        const FieldState w = trial.solid[i].at(s);
        const FieldState dw = trial.solid[i].rate(s, k);
        const FieldState phi = test.solid[i].at(s);
        own += (ops.mass_s * dw.v).dot(phi.v) + (ops.mass_s * dw.u).dot(phi.u) +
               (lam * (ops.stiffness_s * w.u) + del * (ops.stiffness_s * w.v - ops.normal_trace_s * w.v)).dot(phi.v) -
               (ops.mass_s * w.v).dot(phi.u);
        cross += dot_on(w0 * fq0 + w1 * fq1, phi.v, ops.interface_s);
      }
      own *= k / 2.0;
      cross *= k / 2.0;
      out.test_solid[i] += own + cross;
      out.trial_solid[i] += own;
      out.trial_fluid[last_f] += cross;
    }
  }

  // initial rows
  const FieldState f0 = trial.fluid.front().at(0.0);
  const FieldState s0 = trial.solid.front().at(0.0);
  const double init_f =
      (ops.mass_f * f0.u).dot(test.fluid_initial.u) + (ops.mass_f * f0.v).dot(test.fluid_initial.v);
  const double init_s =
      (ops.mass_s * s0.u).dot(test.solid_initial.u) + (ops.mass_s * s0.v).dot(test.solid_initial.v);
  out.test_fluid[0] += init_f;
  out.trial_fluid[0] += init_f;
  out.test_solid[0] += init_s;
  out.trial_solid[0] += init_s;

  for (double v : out.test_fluid) out.total += v;
  for (double v : out.test_solid) out.total += v;
  return out;
}

std::vector<double> source_pairing(const TimePartition& p, const OperatorSet& ops, const SpaceTimeFunction& test,
                                   Subdomain s) {
  const Vector& load = s == Subdomain::fluid ? ops.load_f : ops.load_s;
  std::vector<double> out(p.micro_count(s), 0.0);
  for (int i = 0; i < p.micro_count(s); ++i) {
    const auto mom = source_moments(p.interval_begin(s, i), p.interval_end(s, i));
    if (mom[0] == 0.0) continue;
    const TimePoly& phi = test.of(s)[i];
    out[i] = mom[0] * load.dot(phi.c0.v) + mom[1] * load.dot(phi.c1.v) + mom[2] * load.dot(phi.c2.v);
  }
  return out;
}

std::vector<double> goal_derivative_pairing(const GoalFunctional& J, const TimePartition& p, const OperatorSet& ops,
                                            const PrimalTrajectory& U, const SpaceTimeFunction& xi) {
  const Subdomain s = J.owner();
  const auto q = gauss2_unit_points();
  std::vector<double> out(p.micro_count(s), 0.0);
  for (int i = 0; i < p.micro_count(s); ++i)
    out[i] = goal_derivative_interval(J, p, ops, U, i, xi.of(s)[i].at(q[0]), xi.of(s)[i].at(q[1]));
  return out;
}

}  // namespace mrfsi
