#include "mrfsi/coupled_forms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mrfsi {

namespace {

Vector restrict_to(const Vector& x, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
  return out;
}

Vector combine(const Vector& a, const Vector& b, double wa, double wb) {
  if (a.size() == 0 && b.size() == 0) return {};
  return wa * a + wb * b;
}

void factorize(Eigen::SparseLU<SparseMatrix>& lu, const SparseMatrix& m, const char* what) {
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success) throw SolverError(std::string("singular ") + what + " system");
}

// Solid-side load from an interface vector: scatter to the solid interface nodes.
Vector scatter_solid(const OperatorSet& ops, const Vector& iface) {
  Vector out = Vector::Zero(ops.size(Subdomain::solid));
  for (int i = 0; i < ops.interface_count(); ++i) out[ops.interface_s[i]] += iface[i];
  return out;
}

}  // namespace

std::pair<double, double> macro_weights(const TimePartition& p, int n, Tick t) {
  const MacroInterval& I = p.macro(n);
  if (t < I.begin() || t > I.end())
    throw std::out_of_range("time outside macro interval " + std::to_string(n));
  const double w1 = static_cast<double>(t - I.begin()) / static_cast<double>(I.end() - I.begin());
  if (t == I.end()) return {0.0, 1.0};
  return {1.0 - w1, w1};
}

FieldState interp_fluid(const TimePartition& p, int n, const FieldState& solid_begin, const FieldState& solid_end,
                        Tick t) {
  const auto [w0, w1] = macro_weights(p, n, t);
  return {combine(solid_begin.u, solid_end.u, w0, w1), combine(solid_begin.v, solid_end.v, w0, w1)};
}

FieldState interp_solid(const TimePartition& p, int n, const FieldState& fluid_begin, const FieldState& fluid_end,
                        Tick t) {
  const auto [w0, w1] = macro_weights(p, n, t);
  return {combine(fluid_begin.u, fluid_end.u, w0, w1), combine(fluid_begin.v, fluid_end.v, w0, w1)};
}

InterfaceTrace blend(const InterfaceTrace& a, const InterfaceTrace& b, double wa, double wb) {
  return {a.owner, combine(a.u, b.u, wa, wb), combine(a.v, b.v, wa, wb), combine(a.flux, b.flux, wa, wb)};
}

double source_time_integral(double a, double b) {
  if (b < a) throw std::invalid_argument("source_time_integral: reversed bounds");
  double total = 0.0;
  for (double j = std::floor(a); j <= b; j += 1.0) {
    const double lo = std::max(a, j);
    const double hi = std::min(b, j + 0.1);
    if (hi > lo) total += hi - lo;
  }
  return total;
}

double source_time_moment(double a, double b) {
  if (b < a) throw std::invalid_argument("source_time_moment: reversed bounds");
  if (b == a) return 0.0;
  double total = 0.0;
  for (double j = std::floor(a); j <= b; j += 1.0) {
    const double lo = std::max(a, j);
    const double hi = std::min(b, j + 0.1);
    if (hi > lo) total += (hi - lo) * ((hi - a) + (lo - a)) / 2.0;
  }
  return total / (b - a);
}

InterfaceTrace solid_trace(const OperatorSet& ops, const FieldState& solid) {
  return {Subdomain::solid, restrict_to(solid.u, ops.interface_s), restrict_to(solid.v, ops.interface_s), {}};
}

InterfaceTrace fluid_trace(const OperatorSet& ops, const FieldState& fluid) {
  return {Subdomain::fluid, restrict_to(fluid.u, ops.interface_f), restrict_to(fluid.v, ops.interface_f),
          ops.params.nu * (ops.flux * fluid.v)};
}

MicroSolverCache::MicroSolverCache(const OperatorSet& ops) : ops_(&ops) {}

const Eigen::SparseLU<SparseMatrix>& MicroSolverCache::extension() {
  if (!extension_) {
    extension_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    factorize(*extension_, ops_->extension_f, "fluid extension");
  }
  return *extension_;
}

const Eigen::SparseLU<SparseMatrix>& MicroSolverCache::fluid_step(Tick length, double k) {
  auto& slot = fluid_[length];
  if (!slot) {
    slot = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    const SparseMatrix m = ops_->mass_f + (k / 2.0) * ops_->transport_f;
    factorize(*slot, m, "fluid micro-step");
  }
  return *slot;
}

const Eigen::SparseLU<SparseMatrix>& MicroSolverCache::solid_step(Tick length, double k) {
  auto& slot = solid_[length];
  if (!slot) {
    slot = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    factorize(*slot, solid_step_matrix(*ops_, k), "solid micro-step");
  }
  return *slot;
}

SparseMatrix solid_step_matrix(const OperatorSet& ops, double k) {
  const int ns = ops.size(Subdomain::solid);
  const double lam = ops.params.lambda;
  const double del = ops.params.delta;
  const SparseMatrix damp = ops.stiffness_s - ops.normal_trace_s;
  std::vector<Triplet> t;
  auto put = [&](const SparseMatrix& m, double scale, int r0, int c0) {
    for (int c = 0; c < m.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(m, c); it; ++it)
        t.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()), scale * it.value());
  };
  put(ops.mass_s, 1.0, 0, 0);
  put(ops.mass_s, -k / 2.0, 0, ns);
  put(ops.stiffness_s, k / 2.0 * lam, ns, 0);
  put(ops.mass_s, 1.0, ns, ns);
  put(damp, k / 2.0 * del, ns, ns);
  SparseMatrix m(2 * ns, 2 * ns);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<FieldState> fluid_macro_sweep(const TimePartition& p, int n, MicroSolverCache& cache,
                                          const FieldState& fluid_begin, const InterfaceTrace& solid_begin,
                                          const InterfaceTrace& solid_end) {
  const OperatorSet& ops = cache.ops();
  const auto& nodes = p.macro(n).fluid;
  std::vector<FieldState> out;
  out.reserve(nodes.size() - 1);
  FieldState prev = fluid_begin;
  Vector us_prev = solid_begin.u;
  Vector vs_prev = solid_begin.v;
  for (std::size_t m = 1; m < nodes.size(); ++m) {
    const double k = p.duration(nodes[m - 1], nodes[m]);
    const auto [w0, w1] = macro_weights(p, n, nodes[m]);
    Vector us = w0 * solid_begin.u + w1 * solid_end.u;
    Vector vs = w0 * solid_begin.v + w1 * solid_end.v;

    FieldState next;
    const Vector rhs_u = -(ops.extension_f * prev.u) + ops.penalty_cross * (us + us_prev);
    next.u = cache.extension().solve(rhs_u);

    const double src = source_time_integral(p.time(nodes[m - 1]), p.time(nodes[m]));
    Vector rhs_v = ops.mass_f * prev.v - (k / 2.0) * (ops.transport_f * prev.v) +
                   (k / 2.0) * (ops.penalty_cross * (vs + vs_prev));
    if (src != 0.0) rhs_v += src * ops.load_f;
    next.v = cache.fluid_step(nodes[m] - nodes[m - 1], k).solve(rhs_v);

    out.push_back(next);
    prev = std::move(next);
    us_prev = std::move(us);
    vs_prev = std::move(vs);
  }
  return out;
}

std::vector<FieldState> solid_macro_sweep(const TimePartition& p, int n, MicroSolverCache& cache,
                                          const FieldState& solid_begin, const InterfaceTrace& fluid_begin,
                                          const InterfaceTrace& fluid_end) {
  const OperatorSet& ops = cache.ops();
  const int ns = ops.size(Subdomain::solid);
  const double lam = ops.params.lambda;
  const double del = ops.params.delta;
  const auto& nodes = p.macro(n).solid;
  std::vector<FieldState> out;
  out.reserve(nodes.size() - 1);
  FieldState prev = solid_begin;
  Vector q_prev = fluid_begin.flux;
  for (std::size_t l = 1; l < nodes.size(); ++l) {
    const double k = p.duration(nodes[l - 1], nodes[l]);
    const auto [w0, w1] = macro_weights(p, n, nodes[l]);
    Vector q = w0 * fluid_begin.flux + w1 * fluid_end.flux;

    Vector rhs(2 * ns);
    rhs.head(ns) = ops.mass_s * prev.u + (k / 2.0) * (ops.mass_s * prev.v);
    // step weight k_s on both endpoint terms (the printed k_f is read as k_s)
    rhs.tail(ns) = ops.mass_s * prev.v -
                   (k / 2.0) * (lam * (ops.stiffness_s * prev.u) +
                                del * (ops.stiffness_s * prev.v - ops.normal_trace_s * prev.v)) -
                   (k / 2.0) * scatter_solid(ops, q + q_prev);
    const double src = source_time_integral(p.time(nodes[l - 1]), p.time(nodes[l]));
    if (src != 0.0) rhs.tail(ns) += src * ops.load_s;

    const Vector x = cache.solid_step(nodes[l] - nodes[l - 1], k).solve(rhs);
    FieldState next{x.head(ns), x.tail(ns)};
    out.push_back(next);
    prev = std::move(next);
    q_prev = std::move(q);
  }
  return out;
}

}  // namespace mrfsi
