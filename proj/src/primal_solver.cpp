#include "mrfsi/primal_solver.hpp"

#include "mrfsi/gmres.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mrfsi {

const char* to_string(DecouplingMethod m) {
  switch (m) {
    case DecouplingMethod::relaxation: return "relaxation";
    case DecouplingMethod::shooting: return "shooting";
    case DecouplingMethod::monolithic: return "monolithic";
  }
  return "?";
}

DecouplingMethod parse_method(const std::string& name) {
  if (name == "relaxation") return DecouplingMethod::relaxation;
  if (name == "shooting") return DecouplingMethod::shooting;
  if (name == "monolithic") return DecouplingMethod::monolithic;
  throw std::invalid_argument("unknown decoupling method '" + name + "'");
}

void DecouplerConfig::check() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (!(gmres_tol > 0.0)) throw std::invalid_argument("gmres_tol must be > 0");
  if (fd_scale < 0.0) throw std::invalid_argument("fd_scale must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (gmres_max_iter < 0) throw std::invalid_argument("gmres_max_iter must be >= 0");
}

Vector trace_vector(const InterfaceTrace& t) {
  Vector x(t.u.size() + t.v.size());
  x << t.u, t.v;
  return x;
}

InterfaceTrace trace_from_vector(const Vector& x) {
  const Eigen::Index n = x.size() / 2;
  return {Subdomain::solid, x.head(n), x.tail(n), {}};
}

MacroStepper::MacroStepper(const TimePartition& p, const OperatorSet& ops, DecouplerConfig cfg)
    : p_(&p), ops_(&ops), cfg_(cfg), micro_(ops), macro_cache_(ops) {
  cfg_.check();
}

MacroStates MacroStepper::decouple_step_function(int n, const InterfaceTrace& guess, const FieldState& fluid_begin,
                                                 const FieldState& solid_begin) {
  MacroStates out;
  out.fluid = fluid_macro_sweep(*p_, n, micro_, fluid_begin, solid_trace(*ops_, solid_begin), guess);
  out.solid = solid_macro_sweep(*p_, n, micro_, solid_begin, fluid_trace(*ops_, fluid_begin),
                                fluid_trace(*ops_, out.fluid.back()));
  return out;
}

MacroStates MacroStepper::monolithic_macro_solve(int n, const FieldState& fluid_begin, const FieldState& solid_begin) {
  const auto& entry = macro_cache_.get(*p_, n);
  const Vector rhs = macro_source(*p_, n, *ops_) - entry.matrices.previous * pack_state(fluid_begin, solid_begin);
  const Vector x = entry.lu.solve(rhs);
  MacroStates out;
  unpack_macro(entry.matrices.layout, x, out.fluid, out.solid);
  return out;
}

MacroStepResult MacroStepper::relax_macro_step(int n, const FieldState& fluid_begin, const FieldState& solid_begin) {
  MacroStepResult res;
  res.stats.macro_index = n;
  Vector x = trace_vector(solid_trace(*ops_, solid_begin));
  for (int i = 1; i <= cfg_.max_iter; ++i) {
    res.states = decouple_step_function(n, trace_from_vector(x), fluid_begin, solid_begin);
    ++res.stats.evaluations;
    const Vector g = trace_vector(solid_trace(*ops_, res.states.solid.back()));
    const double r = (g - x).lpNorm<Eigen::Infinity>();
    res.stats.residual_history.push_back(r);
    res.stats.iterations = i;
    res.stats.final_residual = r;
    if (r <= cfg_.tol) return res;
    x = cfg_.tau * g + (1.0 - cfg_.tau) * x;
  }
  throw DivergenceError("relaxation did not converge on macro interval " + std::to_string(n) + " within " +
                            std::to_string(cfg_.max_iter) + " iterations",
                        res.stats.residual_history);
}

MacroStepResult MacroStepper::shoot_macro_step(int n, const FieldState& fluid_begin, const FieldState& solid_begin) {
  MacroStepResult res;
  res.stats.macro_index = n;
  auto defect = [&](const Vector& x, MacroStates* keep) {
    MacroStates st = decouple_step_function(n, trace_from_vector(x), fluid_begin, solid_begin);
    ++res.stats.evaluations;
    Vector s = x - trace_vector(solid_trace(*ops_, st.solid.back()));
    if (keep) *keep = std::move(st);
    return s;
  };

  Vector x = trace_vector(solid_trace(*ops_, solid_begin));
  Vector s = defect(x, &res.states);
  double r = s.lpNorm<Eigen::Infinity>();
  res.stats.residual_history.push_back(r);
  res.stats.newton_iterations = 1;
  const double root_eps = cfg_.fd_scale > 0.0 ? cfg_.fd_scale : std::sqrt(std::numeric_limits<double>::epsilon());
  const int krylov_max = cfg_.gmres_max_iter > 0 ? cfg_.gmres_max_iter : static_cast<int>(x.size());

  while (r > cfg_.tol) {
    if (res.stats.newton_iterations >= cfg_.max_iter)
      throw DivergenceError("Newton iteration did not converge on macro interval " + std::to_string(n),
                            res.stats.residual_history);
    const Vector s0 = s;
    const double xnorm = x.norm();
    auto jac = [&](const Vector& d) -> Vector {
      const double dn = d.norm();
      if (dn == 0.0) return Vector::Zero(d.size());
      const double eps = root_eps * (1.0 + xnorm) / dn;
      return (defect(x + eps * d, nullptr) - s0) / eps;
    };
    const GmresResult g = gmres(jac, -s0, cfg_.gmres_tol, krylov_max);
    res.stats.gmres_iterations.push_back(g.iterations);
    if (!g.converged && !(g.relative_residual < 1.0))
      throw DivergenceError("GMRES stagnated on macro interval " + std::to_string(n), res.stats.residual_history);
    x += g.x;
    s = defect(x, &res.states);
    r = s.lpNorm<Eigen::Infinity>();
    res.stats.residual_history.push_back(r);
    ++res.stats.newton_iterations;
  }
  res.stats.iterations = res.stats.newton_iterations;
  res.stats.final_residual = r;
  return res;
}

MacroStepResult MacroStepper::step(int n, const FieldState& fluid_begin, const FieldState& solid_begin) {
  switch (cfg_.method) {
    case DecouplingMethod::relaxation: return relax_macro_step(n, fluid_begin, solid_begin);
    case DecouplingMethod::shooting: return shoot_macro_step(n, fluid_begin, solid_begin);
    case DecouplingMethod::monolithic: break;
  }
  MacroStepResult res;
  res.states = monolithic_macro_solve(n, fluid_begin, solid_begin);
  res.stats.macro_index = n;
  res.stats.iterations = 1;
  return res;
}

PrimalSolution solve_primal(const TimePartition& p, const OperatorSet& ops, const DecouplerConfig& cfg) {
  MacroStepper stepper(p, ops, cfg);
  PrimalSolution sol;
  auto& traj = sol.trajectory;
  traj.fluid.reserve(p.nodes(Subdomain::fluid).size());
  traj.solid.reserve(p.nodes(Subdomain::solid).size());
  traj.fluid.push_back(FieldState::zero(ops.size(Subdomain::fluid)));
  traj.solid.push_back(FieldState::zero(ops.size(Subdomain::solid)));
  for (int n = 0; n < p.macro_count(); ++n) {
    MacroStepResult r;
    try {
      r = stepper.step(n, traj.fluid.back(), traj.solid.back());
    } catch (const DivergenceError&) {
      throw;
    } catch (const std::exception& e) {
      throw SolverError("macro interval " + std::to_string(n) + ": " + e.what());
    }
    for (auto& s : r.states.fluid) traj.fluid.push_back(std::move(s));
    for (auto& s : r.states.solid) traj.solid.push_back(std::move(s));
    spdlog::debug("macro {}: {} evaluations, residual {:.3e}", n, r.stats.evaluations, r.stats.final_residual);
    sol.stats.push_back(std::move(r.stats));
  }
  return sol;
}

}  // namespace mrfsi
