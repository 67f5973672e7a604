#include "mrfsi/macro_system.hpp"

namespace mrfsi {

namespace {

class Builder {
 public:
  void add(const SparseMatrix& m, double scale, int r0, int c0) {
    if (scale == 0.0) return;
    for (int c = 0; c < m.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(m, c); it; ++it)
        t_.emplace_back(r0 + static_cast<int>(it.row()), c0 + static_cast<int>(it.col()), scale * it.value());
  }
  SparseMatrix build(int rows, int cols) {
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t_.begin(), t_.end());
    m.makeCompressed();
    return m;
  }

 private:
  std::vector<Triplet> t_;
};

// Fluid Nitsche load from the solid interface values: penalty_cross composed with restriction.
SparseMatrix penalty_from_solid(const OperatorSet& ops) {
  std::vector<Triplet> t;
  const SparseMatrix& pc = ops.penalty_cross;
  for (int c = 0; c < pc.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(pc, c); it; ++it)
      t.emplace_back(static_cast<int>(it.row()), ops.interface_s[it.col()], it.value());
  SparseMatrix m(ops.size(Subdomain::fluid), ops.size(Subdomain::solid));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Solid load nu <d_n v_f, phi_s> from the fluid velocity.
SparseMatrix flux_to_solid(const OperatorSet& ops) {
  std::vector<Triplet> t;
  const SparseMatrix& q = ops.flux;
  for (int c = 0; c < q.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(q, c); it; ++it)
      t.emplace_back(ops.interface_s[it.row()], static_cast<int>(it.col()), ops.params.nu * it.value());
  SparseMatrix m(ops.size(Subdomain::solid), ops.size(Subdomain::fluid));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

MacroLayout macro_layout(const TimePartition& p, int n, const OperatorSet& ops) {
  return {ops.size(Subdomain::fluid), ops.size(Subdomain::solid), p.macro(n).micro_count(Subdomain::fluid),
          p.macro(n).micro_count(Subdomain::solid)};
}

MacroMatrices assemble_macro_matrices(const TimePartition& p, int n, const OperatorSet& ops) {
  const MacroLayout lay = macro_layout(p, n, ops);
  const int nf = lay.nf;
  const int ns = lay.ns;
  const double lam = ops.params.lambda;
  const double del = ops.params.delta;
  const SparseMatrix pfs = penalty_from_solid(ops);
  const SparseMatrix qsf = flux_to_solid(ops);
  const SparseMatrix damp = ops.stiffness_s - ops.normal_trace_s;

  Builder cur;
  Builder prev;
  // previous-state columns
  const int pu_f = 0, pv_f = nf, pu_s = 2 * nf, pv_s = 2 * nf + ns;
  const int eu_s = lay.solid_offset(lay.L), ev_s = eu_s + ns;
  const int ev_f = lay.fluid_offset(lay.M) + nf;

  const auto& fn = p.macro(n).fluid;
  for (int m = 1; m <= lay.M; ++m) {
    const double k = p.duration(fn[m - 1], fn[m]);
    const auto [a0, a1] = macro_weights(p, n, fn[m - 1]);
    const auto [b0, b1] = macro_weights(p, n, fn[m]);
    const double w0 = a0 + b0, w1 = a1 + b1;
    const int r = lay.fluid_offset(m);
    cur.add(ops.extension_f, k / 2.0, r, r);
    cur.add(ops.mass_f, 1.0, r + nf, r + nf);
    cur.add(ops.transport_f, k / 2.0, r + nf, r + nf);
    if (m > 1) {
      const int c = lay.fluid_offset(m - 1);
      cur.add(ops.extension_f, k / 2.0, r, c);
      cur.add(ops.mass_f, -1.0, r + nf, c + nf);
      cur.add(ops.transport_f, k / 2.0, r + nf, c + nf);
    } else {
      prev.add(ops.extension_f, k / 2.0, r, pu_f);
      prev.add(ops.mass_f, -1.0, r + nf, pv_f);
      prev.add(ops.transport_f, k / 2.0, r + nf, pv_f);
    }
    cur.add(pfs, -k / 2.0 * w1, r, eu_s);
    cur.add(pfs, -k / 2.0 * w1, r + nf, ev_s);
    prev.add(pfs, -k / 2.0 * w0, r, pu_s);
    prev.add(pfs, -k / 2.0 * w0, r + nf, pv_s);
  }

  const auto& sn = p.macro(n).solid;
  for (int l = 1; l <= lay.L; ++l) {
    const double k = p.duration(sn[l - 1], sn[l]);
    const auto [a0, a1] = macro_weights(p, n, sn[l - 1]);
    const auto [b0, b1] = macro_weights(p, n, sn[l]);
    const double w0 = a0 + b0, w1 = a1 + b1;
    const int r = lay.solid_offset(l);
    cur.add(ops.mass_s, 1.0, r, r);
    cur.add(ops.mass_s, -k / 2.0, r, r + ns);
    cur.add(ops.stiffness_s, k / 2.0 * lam, r + ns, r);
    cur.add(ops.mass_s, 1.0, r + ns, r + ns);
    cur.add(damp, k / 2.0 * del, r + ns, r + ns);
    Builder& b = l > 1 ? cur : prev;
    const int cu = l > 1 ? lay.solid_offset(l - 1) : pu_s;
    const int cv = l > 1 ? cu + ns : pv_s;
    b.add(ops.mass_s, -1.0, r, cu);
    b.add(ops.mass_s, -k / 2.0, r, cv);
    b.add(ops.stiffness_s, k / 2.0 * lam, r + ns, cu);
    b.add(ops.mass_s, -1.0, r + ns, cv);
    b.add(damp, k / 2.0 * del, r + ns, cv);
    cur.add(qsf, k / 2.0 * w1, r + ns, ev_f);
    prev.add(qsf, k / 2.0 * w0, r + ns, pv_f);
  }

  return {lay, cur.build(lay.size(), lay.size()), prev.build(lay.size(), lay.state_size())};
}

Vector macro_source(const TimePartition& p, int n, const OperatorSet& ops) {
  const MacroLayout lay = macro_layout(p, n, ops);
  Vector b = Vector::Zero(lay.size());
  const auto& fn = p.macro(n).fluid;
  for (int m = 1; m <= lay.M; ++m) {
    const double src = source_time_integral(p.time(fn[m - 1]), p.time(fn[m]));
    if (src != 0.0) b.segment(lay.fluid_offset(m) + lay.nf, lay.nf) = src * ops.load_f;
  }
  const auto& sn = p.macro(n).solid;
  for (int l = 1; l <= lay.L; ++l) {
    const double src = source_time_integral(p.time(sn[l - 1]), p.time(sn[l]));
    if (src != 0.0) b.segment(lay.solid_offset(l) + lay.ns, lay.ns) = src * ops.load_s;
  }
  return b;
}

SparseMatrix initial_matrix(const OperatorSet& ops) {
  const int nf = ops.size(Subdomain::fluid);
  const int ns = ops.size(Subdomain::solid);
  Builder b;
  b.add(ops.mass_f, 1.0, 0, 0);
  b.add(ops.mass_f, 1.0, nf, nf);
  b.add(ops.mass_s, 1.0, 2 * nf, 2 * nf);
  b.add(ops.mass_s, 1.0, 2 * nf + ns, 2 * nf + ns);
  return b.build(2 * nf + 2 * ns, 2 * nf + 2 * ns);
}

Vector pack_state(const FieldState& fluid, const FieldState& solid) {
  Vector x(fluid.u.size() * 2 + solid.u.size() * 2);
  x << fluid.u, fluid.v, solid.u, solid.v;
  return x;
}

std::pair<FieldState, FieldState> unpack_state(const Vector& x, int nf, int ns) {
  return {FieldState{x.segment(0, nf), x.segment(nf, nf)},
          FieldState{x.segment(2 * nf, ns), x.segment(2 * nf + ns, ns)}};
}

Vector pack_macro(const MacroLayout& lay, const std::vector<FieldState>& fluid, const std::vector<FieldState>& solid) {
  Vector x(lay.size());
  for (int m = 1; m <= lay.M; ++m) {
    x.segment(lay.fluid_offset(m), lay.nf) = fluid[m - 1].u;
    x.segment(lay.fluid_offset(m) + lay.nf, lay.nf) = fluid[m - 1].v;
  }
  for (int l = 1; l <= lay.L; ++l) {
    x.segment(lay.solid_offset(l), lay.ns) = solid[l - 1].u;
    x.segment(lay.solid_offset(l) + lay.ns, lay.ns) = solid[l - 1].v;
  }
  return x;
}

void unpack_macro(const MacroLayout& lay, const Vector& x, std::vector<FieldState>& fluid,
                  std::vector<FieldState>& solid) {
  fluid.clear();
  solid.clear();
  for (int m = 1; m <= lay.M; ++m)
    fluid.push_back({x.segment(lay.fluid_offset(m), lay.nf), x.segment(lay.fluid_offset(m) + lay.nf, lay.nf)});
  for (int l = 1; l <= lay.L; ++l)
    solid.push_back({x.segment(lay.solid_offset(l), lay.ns), x.segment(lay.solid_offset(l) + lay.ns, lay.ns)});
}

Vector macro_end_state(const MacroLayout& lay, const Vector& x) {
  Vector s(lay.state_size());
  s << x.segment(lay.fluid_offset(lay.M), 2 * lay.nf), x.segment(lay.solid_offset(lay.L), 2 * lay.ns);
  return s;
}

MacroFactorCache::Entry& MacroFactorCache::get(const TimePartition& p, int n) {
  Key key;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    auto& lengths = s == Subdomain::fluid ? key.first : key.second;
    const auto& nodes = p.macro(n).nodes(s);
    for (std::size_t i = 1; i < nodes.size(); ++i) lengths.push_back(nodes[i] - nodes[i - 1]);
  }
  auto& slot = entries_[key];
  if (!slot) {
    slot = std::make_unique<Entry>();
    slot->matrices = assemble_macro_matrices(p, n, *ops_);
    slot->lu.analyzePattern(slot->matrices.current);
    slot->lu.factorize(slot->matrices.current);
    if (slot->lu.info() != Eigen::Success)
      throw SolverError("singular monolithic system on macro interval " + std::to_string(n));
  }
  return *slot;
}

}  // namespace mrfsi
