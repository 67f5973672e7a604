#include "mrfsi/space_disc.hpp"

#include "mrfsi/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mrfsi {

namespace {

constexpr std::array<std::array<int, 2>, 4> kCorners = {{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};

double shape(int a, double xi, double eta) {
  const double sx = kCorners[a][0] ? xi : 1.0 - xi;
  const double sy = kCorners[a][1] ? eta : 1.0 - eta;
  return sx * sy;
}

double shape_dxi(int a, double eta) {
  const double sy = kCorners[a][1] ? eta : 1.0 - eta;
  return (kCorners[a][0] ? 1.0 : -1.0) * sy;
}

double shape_deta(int a, double xi) {
  const double sx = kCorners[a][0] ? xi : 1.0 - xi;
  return (kCorners[a][1] ? 1.0 : -1.0) * sx;
}

int checked_count(double length, double h, const char* what) {
  const double ratio = length / h;
  const long n = std::lround(ratio);
  if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream msg;
    msg << "cell width h=" << h << " must divide " << what << " (" << length
        << "/h must be a positive integer)";
    throw std::invalid_argument(msg.str());
  }
  return static_cast<int>(n);
}

SubdomainGrid make_grid(Subdomain side, double h) {
  SubdomainGrid g;
  g.side = side;
  g.h = h;
  g.nx = checked_count(4.0, h, "the interface length 4");
  g.ny = checked_count(1.0, h, "the subdomain height 1");
  g.coords.resize(g.node_count());
  const double sign = side == Subdomain::fluid ? 1.0 : -1.0;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      g.coords[g.node(i, j)] = {i * h, j == 0 ? 0.0 : sign * (j * h)};

  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const bool constrained = side == Subdomain::fluid ? j == g.ny : (i == 0 || i == g.nx);
      if (constrained) g.dirichlet.push_back(g.node(i, j));
    }
  std::sort(g.dirichlet.begin(), g.dirichlet.end());
  for (int i = 0; i <= g.nx; ++i) g.interface.push_back(g.node(i, 0));
  return g;
}

/// Global node of local corner a in cell (i, j).
int cell_node(const SubdomainGrid& g, int i, int j, int a) {
  const int di = kCorners[a][0];
  const int dj = kCorners[a][1];
  // The solid cell (i, j) spans y in [-(j+1)h, -jh]; its local eta = 0 edge
  // lies on grid row j + 1.
  const int row = g.side == Subdomain::fluid ? j + dj : j + 1 - dj;
  return g.node(i + di, row);
}

/// Visits every cell with its 4x4 local mass/stiffness/convection matrices.
template <typename Visitor>
void for_each_cell(const SubdomainGrid& g, Visitor&& visit) {
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::array<int, 4> nodes{};
      for (int a = 0; a < 4; ++a) nodes[a] = cell_node(g, i, j, a);
      visit(i, j, nodes);
    }
}

Eigen::Matrix4d element_mass(double hx, double hy) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  const auto q = gauss2_unit_points();
  for (double xi : q)
    for (double eta : q) {
      const double w = 0.25 * hx * hy;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m(a, b) += w * shape(a, xi, eta) * shape(b, xi, eta);
    }
  return m;
}

Eigen::Matrix4d element_stiffness(double hx, double hy) {
  Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
  const auto q = gauss2_unit_points();
  for (double xi : q)
    for (double eta : q) {
      const double w = 0.25 * hx * hy;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          k(a, b) += w * (shape_dxi(a, eta) * shape_dxi(b, eta) / (hx * hx) +
                          shape_deta(a, xi) * shape_deta(b, xi) / (hy * hy));
    }
  return k;
}

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

/// Zeroes constrained rows/columns; optionally puts 1 on constrained diagonals.
SparseMatrix constrain(const SparseMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols,
                       bool unit_diagonal) {
  std::vector<char> drop_row(m.rows(), 0), drop_col(m.cols(), 0);
  for (int r : rows) drop_row[r] = 1;
  for (int c : cols) drop_col[c] = 1;
  std::vector<Triplet> t;
  t.reserve(m.nonZeros() + rows.size());
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      if (!drop_row[it.row()] && !drop_col[it.col()]) t.emplace_back(it.row(), it.col(), it.value());
  if (unit_diagonal)
    for (int r : rows) t.emplace_back(r, r, 1.0);
  return from_triplets(static_cast<int>(m.rows()), static_cast<int>(m.cols()), t);
}

Vector zero_entries(Vector v, const std::vector<int>& idx) {
  for (int i : idx) v[i] = 0.0;
  return v;
}

/// Interface positions of the solid grid that are Dirichlet (the corners).
std::vector<int> constrained_interface_positions(const SubdomainGrid& g) {
  std::vector<int> pos;
  for (int i = 0; i < static_cast<int>(g.interface.size()); ++i)
    if (g.is_dirichlet(g.interface[i])) pos.push_back(i);
  return pos;
}

}  // namespace

void PhysicalParams::check() const {
  if (!(nu > 0.0)) throw std::invalid_argument("nu must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("h must be > 0");
  checked_count(4.0, h, "the interface length 4");
  checked_count(1.0, h, "the subdomain height 1");
}

bool SubdomainGrid::is_dirichlet(int n) const {
  return std::binary_search(dirichlet.begin(), dirichlet.end(), n);
}

SpaceMesh build_domain_mesh(double h) {
  if (!(h > 0.0)) throw std::invalid_argument("cell width h must be > 0");
  SpaceMesh mesh;
  mesh.h = h;
  mesh.fluid = make_grid(Subdomain::fluid, h);
  mesh.solid = make_grid(Subdomain::solid, h);
  return mesh;
}

double source_shape(int config_id, Subdomain side, double x, double y) {
  if (config_id == 1 && side == Subdomain::fluid)
    return std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
  if (config_id == 2 && side == Subdomain::solid)
    return std::exp(-((x - 0.5) * (x - 0.5) + (y + 0.5) * (y + 0.5)));
  return 0.0;
}

Eigen::Matrix4d element_convection(double hx, double hy, const std::array<double, 2>& beta) {
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  const auto q = gauss2_unit_points();
  for (double xi : q)
    for (double eta : q) {
      const double w = 0.25 * hx * hy;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const double adv = beta[0] * shape_dxi(b, eta) / hx + beta[1] * shape_deta(b, xi) / hy;
          c(a, b) += w * adv * shape(a, xi, eta);
        }
    }
  return c;
}

SparseMatrix assemble_mass_raw(const SubdomainGrid& g) {
  const Eigen::Matrix4d me = element_mass(g.h, g.h);
  std::vector<Triplet> t;
  for_each_cell(g, [&](int, int, const std::array<int, 4>& n) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) t.emplace_back(n[a], n[b], me(a, b));
  });
  return from_triplets(g.node_count(), g.node_count(), t);
}

SparseMatrix assemble_stiffness_raw(const SubdomainGrid& g) {
  const Eigen::Matrix4d ke = element_stiffness(g.h, g.h);
  std::vector<Triplet> t;
  for_each_cell(g, [&](int, int, const std::array<int, 4>& n) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) t.emplace_back(n[a], n[b], ke(a, b));
  });
  return from_triplets(g.node_count(), g.node_count(), t);
}

SparseMatrix assemble_penalty_raw(const SpaceMesh& mesh, double gamma) {
  // 1D mass on the interface scaled by gamma/h, indexed by interface position.
  const double h = mesh.h;
  const int n = mesh.interface_count();
  std::vector<Triplet> t;
  const auto q = gauss2_unit_points();
  for (int e = 0; e + 1 < n; ++e)
    for (double s : q) {
      const double w = 0.5 * h * gamma / h;
      const std::array<double, 2> phi = {1.0 - s, s};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t.emplace_back(e + a, e + b, w * phi[a] * phi[b]);
    }
  return from_triplets(n, n, t);
}

OperatorSet assemble_operators(const SpaceMesh& mesh, const PhysicalParams& p, int config_id) {
  p.check();
  if (std::abs(p.h - mesh.h) > 1e-14) throw std::invalid_argument("PhysicalParams::h does not match the mesh");
  if (config_id != 1 && config_id != 2) throw std::invalid_argument("config_id must be 1 or 2");

  const SubdomainGrid& gf = mesh.fluid;
  const SubdomainGrid& gs = mesh.solid;
  const double h = mesh.h;
  const int nf = gf.node_count();
  const int ns = gs.node_count();
  const int ni = mesh.interface_count();

  OperatorSet ops;
  ops.params = p;
  ops.config_id = config_id;
  ops.interface_f = gf.interface;
  ops.interface_s = gs.interface;

  // volume terms
  const Eigen::Matrix4d me = element_mass(h, h);
  const Eigen::Matrix4d ke = element_stiffness(h, h);
  const Eigen::Matrix4d ce = element_convection(h, h, p.beta);
  std::vector<Triplet> tmf, tkf, tcf, tgf, tms, tks, tgs;
  Vector load_f = Vector::Zero(nf);
  Vector load_s = Vector::Zero(ns);
  const auto q = gauss2_unit_points();

  auto add_load = [&](const SubdomainGrid& g, const std::array<int, 4>& n, Vector& load) {
    for (double xi : q)
      for (double eta : q) {
        // physical point of the reference coordinates: corner 0 carries the
        // minimal x and, on both sides, the cell edge with local eta = 0
        const double x = g.coords[n[0]][0] + xi * h;
        const double y = g.coords[n[0]][1] + eta * h;
        const double val = source_shape(config_id, g.side, x, y);
        for (int a = 0; a < 4; ++a) load[n[a]] += 0.25 * h * h * val * shape(a, xi, eta);
      }
  };

  for_each_cell(gf, [&](int i, int, const std::array<int, 4>& n) {
    const bool right_half = (i + 0.5) * h > 2.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        tmf.emplace_back(n[a], n[b], me(a, b));
        tkf.emplace_back(n[a], n[b], ke(a, b));
        tcf.emplace_back(n[a], n[b], ce(a, b));
        if (right_half) tgf.emplace_back(n[a], n[b], ke(a, b));
      }
    add_load(gf, n, load_f);
  });
  for_each_cell(gs, [&](int i, int, const std::array<int, 4>& n) {
    const bool right_half = (i + 0.5) * h > 2.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        tms.emplace_back(n[a], n[b], me(a, b));
        tks.emplace_back(n[a], n[b], ke(a, b));
        if (right_half) tgs.emplace_back(n[a], n[b], ke(a, b));
      }
    add_load(gs, n, load_s);
  });

  // interface edges: j = 0 cells on both sides
  std::vector<Triplet> tnf, tns, tflux;
  for (int i = 0; i < gf.nx; ++i) {
    std::array<int, 4> nfl{}, nsl{};
    for (int a = 0; a < 4; ++a) {
      nfl[a] = cell_node(gf, i, 0, a);
      nsl[a] = cell_node(gs, i, 0, a);
    }
    for (double s : q) {
      const double w = 0.5 * h;
      const std::array<double, 2> edge_shape = {1.0 - s, s};  // interface positions i, i+1
      for (int b = 0; b < 4; ++b) {
        // fluid edge at eta = 0, outward normal (0,-1)
        const double dn_f = -shape_deta(b, s) / h;
        // solid edge at eta = 1, outward normal (0,+1)
        const double dn_s = shape_deta(b, s) / h;
        for (int e = 0; e < 2; ++e) {
          tnf.emplace_back(gf.interface[i + e], nfl[b], w * dn_f * edge_shape[e]);
          tflux.emplace_back(i + e, nfl[b], w * dn_f * edge_shape[e]);
          tns.emplace_back(gs.interface[i + e], nsl[b], w * dn_s * edge_shape[e]);
        }
      }
    }
  }

  const SparseMatrix penalty_if = assemble_penalty_raw(mesh, p.gamma);
  std::vector<Triplet> tpf, tpx;
  for (int k = 0; k < penalty_if.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(penalty_if, k); it; ++it) {
      tpf.emplace_back(gf.interface[it.row()], gf.interface[it.col()], it.value());
      tpx.emplace_back(gf.interface[it.row()], it.col(), it.value());
    }

  const std::vector<int>& df = gf.dirichlet;
  const std::vector<int>& ds = gs.dirichlet;
  const std::vector<int> dsi = constrained_interface_positions(gs);

  ops.mass_f = constrain(from_triplets(nf, nf, tmf), df, df, true);
  ops.stiffness_f = constrain(from_triplets(nf, nf, tkf), df, df, false);
  ops.convection_f = constrain(from_triplets(nf, nf, tcf), df, df, false);
  ops.normal_trace_f = constrain(from_triplets(nf, nf, tnf), df, df, false);
  ops.penalty_f = constrain(from_triplets(nf, nf, tpf), df, df, false);
  ops.extension_f = constrain(ops.stiffness_f - ops.normal_trace_f + ops.penalty_f, df, df, true);
  ops.transport_f =
      constrain(p.nu * ops.stiffness_f + ops.convection_f - p.nu * ops.normal_trace_f + ops.penalty_f, df, df, false);

  ops.mass_s = constrain(from_triplets(ns, ns, tms), ds, ds, true);
  ops.stiffness_s = constrain(from_triplets(ns, ns, tks), ds, ds, false);
  ops.normal_trace_s = constrain(from_triplets(ns, ns, tns), ds, ds, false);

  ops.penalty_cross = constrain(from_triplets(nf, ni, tpx), df, dsi, false);
  ops.flux = constrain(from_triplets(ni, nf, tflux), dsi, df, false);

  ops.load_f = zero_entries(load_f, df);
  ops.load_s = zero_entries(load_s, ds);
  ops.goal_stiffness_f = constrain(from_triplets(nf, nf, tgf), df, df, false);
  ops.goal_stiffness_s = constrain(from_triplets(ns, ns, tgs), ds, ds, false);
  return ops;
}

}  // namespace mrfsi
