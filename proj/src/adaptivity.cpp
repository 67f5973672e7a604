#include "mrfsi/adaptivity.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>

namespace mrfsi {

MarkSet mark(const ErrorBreakdown& e) {
  MarkSet marks;
  // a vanishing average means there is no error to chase
  if (e.sigma_bar == 0.0) return marks;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    const auto& th = e.theta(s);
    const auto& vt = e.vartheta(s);
    for (std::size_t i = 0; i < th.size(); ++i)
      if (std::abs(th[i]) >= e.sigma_bar || std::abs(vt[i]) >= e.sigma_bar) marks.of(s).insert(static_cast<int>(i));
  }
  return marks;
}

AdaptiveRecord evaluate_partition(const TimePartition& p, const AdaptiveProblem& problem) {
  const auto start = std::chrono::steady_clock::now();
  const OperatorSet& ops = *problem.ops;
  AdaptiveRecord r;
  r.macro_count = p.macro_count();
  r.fluid_count = p.micro_count(Subdomain::fluid);
  r.solid_count = p.micro_count(Subdomain::solid);
  const PrimalSolution U = solve_primal(p, ops, problem.primal);
  const AdjointTrajectory Z = solve_adjoint(p, ops, problem.goal, U.trajectory, problem.adjoint);
  r.goal = goal_value(problem.goal, p, ops, U.trajectory);
  r.breakdown = estimate_error(p, ops, U.trajectory, Z, problem.goal);
  if (problem.reference) {
    r.error = *problem.reference - r.goal;
    r.eff = effectivity(r.breakdown.sigma, *problem.reference, r.goal);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

AdaptiveResult adaptive_loop(const TimePartition& initial, int steps, const AdaptiveProblem& problem) {
  if (steps < 0) throw std::invalid_argument("adaptive step count must be >= 0");
  AdaptiveResult out;
  TimePartition p = initial;
  for (int step = 0; step <= steps; ++step) {
    try {
      AdaptiveRecord r = evaluate_partition(p, problem);
      r.step = step;
      out.partitions.push_back(p);
      if (step < steps) {
        const MarkSet marks = mark(r.breakdown);
        r.marked_fluid = static_cast<int>(marks.fluid.size());
        r.marked_solid = static_cast<int>(marks.solid.size());
        p = refine(p, marks);
      }
      spdlog::info("adaptive step {}: N={} M={} L={} J={:.9e} sigma={:.3e} marked {}/{}", step, r.macro_count,
                   r.fluid_count, r.solid_count, r.goal, r.breakdown.sigma, r.marked_fluid, r.marked_solid);
      out.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw AdaptiveError("adaptive step " + std::to_string(step) + " failed: " + e.what(), step, out);
    }
  }
  return out;
}

}  // namespace mrfsi
