#pragma once

#include "mrfsi/types.hpp"

#include <array>
#include <vector>

namespace mrfsi {

/// Material and discretization parameters of the coupled heat/wave model.
struct PhysicalParams {
  double nu = 0.001;
  std::array<double, 2> beta = {2.0, 0.0};
  double lambda = 1000.0;
  double delta = 0.1;
  double gamma = 1000.0;
  double h = 0.125;

  /// Throws std::invalid_argument naming the first violated constraint.
  void check() const;
};

/// Structured grid of one rectangular subdomain.
///
/// Nodes are numbered row by row starting at the interface: node (i, j) has
/// index j * (nx + 1) + i, x = i * h and y = +j * h (fluid) or -j * h (solid).
/// The interface row j = 0 therefore maps interface position i to node i on
/// both sides.
struct SubdomainGrid {
  Subdomain side = Subdomain::fluid;
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  std::vector<std::array<double, 2>> coords;
  std::vector<int> dirichlet;  // sorted node indices
  std::vector<int> interface;  // node index per interface position, ascending x

  int node(int i, int j) const { return j * (nx + 1) + i; }
  int node_count() const { return (nx + 1) * (ny + 1); }
  bool is_dirichlet(int node) const;
};

struct SpaceMesh {
  double h = 0.0;
  SubdomainGrid fluid;
  SubdomainGrid solid;

  const SubdomainGrid& grid(Subdomain s) const { return s == Subdomain::fluid ? fluid : solid; }
  int interface_count() const { return static_cast<int>(fluid.interface.size()); }
};

/// Builds the fixed grids on (0,4)x(0,1) and (0,4)x(-1,0). The fluid
/// Dirichlet set is the top edge; the solid Dirichlet set is the left and
/// right edges including both interface corners.
SpaceMesh build_domain_mesh(double h);

/// Assembled spatial blocks of the Nitsche-coupled forms.
///
/// All matrices carry the Dirichlet elimination: constrained rows and
/// columns are zero, except that the mass matrices and the fluid
/// displacement-extension operator carry a unit diagonal there so that every
/// time-step system stays regular and keeps constrained values at zero.
struct OperatorSet {
  PhysicalParams params;
  int config_id = 1;

  // fluid blocks
  SparseMatrix mass_f;
  SparseMatrix stiffness_f;
  SparseMatrix convection_f;    // (beta . grad phi_j, phi_i)
  SparseMatrix normal_trace_f;  // <d_{n_f} phi_j, phi_i>_Gamma
  SparseMatrix penalty_f;       // gamma/h <phi_j, phi_i>_Gamma

  /// Fluid operator on u_f tested with psi_f: K - N + P.
  SparseMatrix extension_f;
  /// Fluid operator on v_f tested with phi_f: nu K + C - nu N + P.
  SparseMatrix transport_f;

  // solid blocks
  SparseMatrix mass_s;
  SparseMatrix stiffness_s;
  SparseMatrix normal_trace_s;  // <d_{n_s} phi_j, phi_i>_Gamma

  // interface coupling, indexed by interface position
  SparseMatrix penalty_cross;  // fluid rows x interface: gamma/h <phi_s_j, phi_f_i>
  SparseMatrix flux;           // interface x fluid: <d_{n_f} phi_f_j, phi_s_i> (without nu)

  // loads (g^1, phi) for the active configuration
  Vector load_f;
  Vector load_s;

  // stiffness restricted to the right half of each subdomain
  SparseMatrix goal_stiffness_f;
  SparseMatrix goal_stiffness_s;

  std::vector<int> interface_f;
  std::vector<int> interface_s;

  int size(Subdomain s) const {
    return static_cast<int>(s == Subdomain::fluid ? mass_f.rows() : mass_s.rows());
  }
  int interface_count() const { return static_cast<int>(interface_f.size()); }
};

OperatorSet assemble_operators(const SpaceMesh& mesh, const PhysicalParams& p, int config_id);

// Unconstrained building blocks, exposed for verification.

/// Q1 element matrix (beta . grad N_b, N_a) on an axis-aligned hx-by-hy cell,
/// 2x2 Gauss. Local node order: (0,0), (1,0), (1,1), (0,1).
Eigen::Matrix4d element_convection(double hx, double hy, const std::array<double, 2>& beta);

SparseMatrix assemble_mass_raw(const SubdomainGrid& grid);
SparseMatrix assemble_stiffness_raw(const SubdomainGrid& grid);
SparseMatrix assemble_penalty_raw(const SpaceMesh& mesh, double gamma);

/// Gaussian bump g^1 of the chosen configuration evaluated on a subdomain;
/// zero on the inactive side.
double source_shape(int config_id, Subdomain side, double x, double y);

}  // namespace mrfsi
