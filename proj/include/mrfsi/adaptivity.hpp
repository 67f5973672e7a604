#pragma once

#include "mrfsi/dwr_estimator.hpp"
#include "mrfsi/primal_solver.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace mrfsi {

/// Marks every micro interval with |theta| >= sigma_bar or |vartheta| >= sigma_bar.
/// Nothing is marked when sigma_bar is zero.
MarkSet mark(const ErrorBreakdown& e);

struct AdaptiveRecord {
  int step = 0;
  int macro_count = 0;
  int fluid_count = 0;
  int solid_count = 0;
  double goal = 0.0;
  ErrorBreakdown breakdown;
  std::optional<double> error;  // J_ref - J(U_k) when a reference is known
  std::optional<double> eff;
  int marked_fluid = 0;
  int marked_solid = 0;
  double wall_seconds = 0.0;
};

struct AdaptiveProblem {
  const OperatorSet* ops = nullptr;
  GoalFunctional goal;
  DecouplerConfig primal;
  AdjointConfig adjoint;
  std::optional<double> reference;
};

struct AdaptiveResult {
  std::vector<AdaptiveRecord> records;
  /// Partition used at each recorded step; the last one is the final mesh.
  std::vector<TimePartition> partitions;
};

class AdaptiveError : public std::runtime_error {
 public:
  AdaptiveError(const std::string& what, int step, AdaptiveResult partial)
      : std::runtime_error(what), step_(step), partial_(std::move(partial)) {}
  int step() const { return step_; }
  const AdaptiveResult& partial() const { return partial_; }

 private:
  int step_;
  AdaptiveResult partial_;
};

/// Solve, estimate, mark, refine; `steps` refinements, so steps + 1 records
/// (the last partition is solved and estimated but not refined).
AdaptiveResult adaptive_loop(const TimePartition& initial, int steps, const AdaptiveProblem& problem);

/// One solve-and-estimate pass on a fixed partition.
AdaptiveRecord evaluate_partition(const TimePartition& p, const AdaptiveProblem& problem);

}  // namespace mrfsi
