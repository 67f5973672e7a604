#include "mrfsi/adjoint_solver.hpp"

#include <map>
#include <stdexcept>

namespace mrfsi {

const char* to_string(AdjointMethod m) { return m == AdjointMethod::monolithic ? "monolithic" : "relaxation"; }

AdjointMethod parse_adjoint_method(const std::string& name) {
  if (name == "monolithic") return AdjointMethod::monolithic;
  if (name == "relaxation") return AdjointMethod::relaxation;
  throw std::invalid_argument("unknown adjoint method '" + name + "'");
}

namespace {

struct SplitBlocks {
  int nfluid = 0;
  SparseMatrix fs_t;  // (fluid rows x solid cols)^T
  SparseMatrix sf_t;  // (solid rows x fluid cols)^T
  Eigen::SparseLU<SparseMatrix> ff;
  Eigen::SparseLU<SparseMatrix> ss;
};

void factor(Eigen::SparseLU<SparseMatrix>& lu, const SparseMatrix& m) {
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) throw SolverError("singular adjoint block");
}

std::unique_ptr<SplitBlocks> split(const MacroMatrices& mm) {
  auto b = std::make_unique<SplitBlocks>();
  const int F = mm.layout.M * 2 * mm.layout.nf;
  const int S = mm.layout.L * 2 * mm.layout.ns;
  b->nfluid = F;
  const SparseMatrix& D = mm.current;
  SparseMatrix ff_t = SparseMatrix(D.topLeftCorner(F, F)).transpose();
  SparseMatrix ss_t = SparseMatrix(D.bottomRightCorner(S, S)).transpose();
  b->fs_t = SparseMatrix(D.topRightCorner(F, S)).transpose();
  b->sf_t = SparseMatrix(D.bottomLeftCorner(S, F)).transpose();
  factor(b->ff, ff_t);
  factor(b->ss, ss_t);
  return b;
}

// Block Gauss-Seidel on the transposed macro system, relaxing the solid block.
Vector relax_transposed(const SplitBlocks& b, const Vector& rhs, const AdjointConfig& cfg, int n) {
  const int F = b.nfluid;
  const int S = static_cast<int>(rhs.size()) - F;
  const Vector rf = rhs.head(F);
  const Vector rs = rhs.tail(S);
  Vector zs = Vector::Zero(S);
  Vector zf;
  for (int it = 0; it < cfg.max_iter; ++it) {
    zf = b.ff.solve(rf - b.sf_t * zs);
    const Vector next = b.ss.solve(rs - b.fs_t * zf);
    const double change = (next - zs).lpNorm<Eigen::Infinity>();
    const double scale = next.lpNorm<Eigen::Infinity>();
    zs = cfg.tau * next + (1.0 - cfg.tau) * zs;
    if (change <= cfg.tol * scale || change == 0.0) {
      Vector z(rhs.size());
      z << b.ff.solve(rf - b.sf_t * zs), zs;
      return z;
    }
  }
  throw SolverError("adjoint relaxation did not converge on macro interval " + std::to_string(n));
}

}  // namespace

AdjointTrajectory solve_adjoint(const TimePartition& p, const OperatorSet& ops, const std::vector<FieldState>& fluid_load,
                                const std::vector<FieldState>& solid_load, const AdjointConfig& cfg) {
  const int nf = ops.size(Subdomain::fluid);
  const int ns = ops.size(Subdomain::solid);
  AdjointTrajectory Z;
  Z.fluid.assign(p.micro_count(Subdomain::fluid), FieldState::zero(nf));
  Z.solid.assign(p.micro_count(Subdomain::solid), FieldState::zero(ns));

  MacroFactorCache cache(ops);
  std::map<const MacroFactorCache::Entry*, std::unique_ptr<SplitBlocks>> blocks;
  Vector carry = Vector::Zero(2 * nf + 2 * ns);

  for (int n = p.macro_count() - 1; n >= 0; --n) {
    auto& entry = cache.get(p, n);
    const MacroLayout& lay = entry.matrices.layout;
    const int f0 = p.first_interval(Subdomain::fluid, n);
    const int s0 = p.first_interval(Subdomain::solid, n);
    Vector rhs = Vector::Zero(lay.size());
    if (!fluid_load.empty())
      for (int m = 1; m <= lay.M; ++m) {
        rhs.segment(lay.fluid_offset(m), nf) = fluid_load[f0 + m].u;
        rhs.segment(lay.fluid_offset(m) + nf, nf) = fluid_load[f0 + m].v;
      }
    if (!solid_load.empty())
      for (int l = 1; l <= lay.L; ++l) {
        rhs.segment(lay.solid_offset(l), ns) = solid_load[s0 + l].u;
        rhs.segment(lay.solid_offset(l) + ns, ns) = solid_load[s0 + l].v;
      }
    rhs.segment(lay.fluid_offset(lay.M), 2 * nf) -= carry.head(2 * nf);
    rhs.segment(lay.solid_offset(lay.L), 2 * ns) -= carry.tail(2 * ns);

    Vector z;
    try {
      if (cfg.method == AdjointMethod::monolithic) {
        z = entry.lu.transpose().solve(rhs);
      } else {
        auto& b = blocks[&entry];
        if (!b) b = split(entry.matrices);
        z = relax_transposed(*b, rhs, cfg, n);
      }
    } catch (const SolverError&) {
      throw;
    } catch (const std::exception& e) {
      throw SolverError("adjoint macro interval " + std::to_string(n) + ": " + e.what());
    }
    carry = entry.matrices.previous.transpose() * z;
    for (int m = 1; m <= lay.M; ++m)
      Z.fluid[f0 + m - 1] = {z.segment(lay.fluid_offset(m), nf), z.segment(lay.fluid_offset(m) + nf, nf)};
    for (int l = 1; l <= lay.L; ++l)
      Z.solid[s0 + l - 1] = {z.segment(lay.solid_offset(l), ns), z.segment(lay.solid_offset(l) + ns, ns)};
  }

  Vector rhs0 = -carry;
  if (!fluid_load.empty()) {
    rhs0.segment(0, nf) += fluid_load[0].u;
    rhs0.segment(nf, nf) += fluid_load[0].v;
  }
  if (!solid_load.empty()) {
    rhs0.segment(2 * nf, ns) += solid_load[0].u;
    rhs0.segment(2 * nf + ns, ns) += solid_load[0].v;
  }
  Eigen::SparseLU<SparseMatrix> lu0;
  const SparseMatrix init = SparseMatrix(initial_matrix(ops).transpose());
  factor(lu0, init);
  const Vector z0 = lu0.solve(rhs0);
  Z.fluid_initial = {z0.segment(0, nf), z0.segment(nf, nf)};
  Z.solid_initial = {z0.segment(2 * nf, ns), z0.segment(2 * nf + ns, ns)};
  return Z;
}

AdjointTrajectory solve_adjoint(const TimePartition& p, const OperatorSet& ops, const GoalFunctional& J,
                                const PrimalTrajectory& U, const AdjointConfig& cfg) {
  const auto load = goal_derivative_load(J, p, ops, U);
  if (J.owner() == Subdomain::fluid) return solve_adjoint(p, ops, load, {}, cfg);
  return solve_adjoint(p, ops, {}, load, cfg);
}

}  // namespace mrfsi
