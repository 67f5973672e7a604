#include <doctest.h>

#include "mrfsi/macro_system.hpp"
#include "mrfsi/primal_solver.hpp"
#include "mrfsi/quadrature.hpp"
#include "mrfsi/spacetime_form.hpp"

#include <cmath>
#include <random>

using namespace mrfsi;

namespace {

OperatorSet make_ops(double h, int config) {
  PhysicalParams p;
  p.h = h;
  return assemble_operators(build_domain_mesh(h), p, config);
}

FieldState random_state(std::mt19937_64& rng, const SubdomainGrid& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FieldState s = FieldState::zero(g.node_count());
  for (int n = 0; n < g.node_count(); ++n)
    if (!g.is_dirichlet(n)) {
      s.u[n] = u(rng);
      s.v[n] = u(rng);
    }
  return s;
}

PrimalTrajectory random_trajectory(std::mt19937_64& rng, const TimePartition& p, const SpaceMesh& mesh) {
  PrimalTrajectory U;
  for (int i = 0; i <= p.micro_count(Subdomain::fluid); ++i) U.fluid.push_back(random_state(rng, mesh.fluid));
  for (int i = 0; i <= p.micro_count(Subdomain::solid); ++i) U.solid.push_back(random_state(rng, mesh.solid));
  return U;
}

double max_abs(const AdjointTrajectory& Z) {
  double m = 0.0;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid})
    for (const auto& z : Z.of(s)) m = std::max({m, z.u.lpNorm<Eigen::Infinity>(), z.v.lpNorm<Eigen::Infinity>()});
  return m;
}

double max_diff(const AdjointTrajectory& a, const AdjointTrajectory& b) {
  double m = 0.0;
  for (Subdomain s : {Subdomain::fluid, Subdomain::solid}) {
    for (std::size_t i = 0; i < a.of(s).size(); ++i)
      m = std::max({m, (a.of(s)[i].u - b.of(s)[i].u).lpNorm<Eigen::Infinity>(),
                    (a.of(s)[i].v - b.of(s)[i].v).lpNorm<Eigen::Infinity>()});
    m = std::max({m, (a.initial(s).u - b.initial(s).u).lpNorm<Eigen::Infinity>(),
                  (a.initial(s).v - b.initial(s).v).lpNorm<Eigen::Infinity>()});
  }
  return m;
}

double load_dot(const std::vector<FieldState>& load, const std::vector<FieldState>& xi) {
  double s = 0.0;
  for (std::size_t i = 0; i < load.size(); ++i) s += load[i].u.dot(xi[i].u) + load[i].v.dot(xi[i].v);
  return s;
}

}  // namespace

TEST_CASE("two-point Gauss nodes on the unit interval") {
  const auto q = gauss2_unit_points();
  CHECK(std::abs(q[0] - (0.5 - 1.0 / (2.0 * std::sqrt(3.0)))) <= 1e-15);
  CHECK(std::abs(q[1] - (0.5 + 1.0 / (2.0 * std::sqrt(3.0)))) <= 1e-15);
  CHECK(q[0] == doctest::Approx(0.2113249));
  CHECK(q[1] == doctest::Approx(0.7886751));
  const Gauss2 g = gauss2(0.0, 1.0);
  CHECK(std::abs(g.points[0] - q[0]) <= 1e-15);
  CHECK(g.weights[0] + g.weights[1] == 1.0);
}

TEST_CASE("goal of a zero trajectory is zero") {
  const OperatorSet ops = make_ops(0.5, 1);
  const TimePartition p = uniform_partition(0.5, 3, 2, 1);
  PrimalTrajectory U;
  U.fluid.assign(7, FieldState::zero(ops.size(Subdomain::fluid)));
  U.solid.assign(4, FieldState::zero(ops.size(Subdomain::solid)));
  for (GoalKind k : {GoalKind::fluid, GoalKind::solid}) {
    const GoalFunctional J{k};
    CHECK(goal_value(J, p, ops, U) == 0.0);
    for (const auto& l : goal_derivative_load(J, p, ops, U)) CHECK(l.u.norm() + l.v.norm() == 0.0);
  }
}

TEST_CASE("goal of a field linear in time with constant gradient") {
  const OperatorSet ops = make_ops(0.25, 1);
  const SpaceMesh mesh = build_domain_mesh(0.25);
  const TimePartition p = uniform_partition(0.6, 3, 2, 1);
  const double a = 0.3, b = -1.7, T = 0.6;
  // v = (a + b t)(1 - y): |grad v|^2 = (a + b t)^2 on the right half of area 2
  PrimalTrajectory U;
  for (Tick t : p.nodes(Subdomain::fluid)) {
    FieldState s = FieldState::zero(mesh.fluid.node_count());
    for (int n = 0; n < mesh.fluid.node_count(); ++n) s.v[n] = (a + b * p.time(t)) * (1.0 - mesh.fluid.coords[n][1]);
    U.fluid.push_back(s);
  }
  U.solid.assign(p.micro_count(Subdomain::solid) + 1, FieldState::zero(mesh.solid.node_count()));
  const double time_integral = (std::pow(a + b * T, 3) - std::pow(a, 3)) / (3.0 * b);
  const double want = ops.params.nu * 2.0 * time_integral;
  CHECK(goal_value(GoalFunctional{GoalKind::fluid}, p, ops, U) == doctest::Approx(want).epsilon(1e-12));

  // solid displacement (a + b t) min(x, 4 - x) vanishes on both walls
  PrimalTrajectory W;
  W.fluid.assign(p.micro_count(Subdomain::fluid) + 1, FieldState::zero(mesh.fluid.node_count()));
  for (Tick t : p.nodes(Subdomain::solid)) {
    FieldState s = FieldState::zero(mesh.solid.node_count());
    for (int n = 0; n < mesh.solid.node_count(); ++n) s.u[n] = (a + b * p.time(t)) * std::min(mesh.solid.coords[n][0], 4.0 - mesh.solid.coords[n][0]);
    W.solid.push_back(s);
  }
  CHECK(goal_value(GoalFunctional{GoalKind::solid}, p, ops, W) ==
        doctest::Approx(ops.params.lambda * 2.0 * time_integral).epsilon(1e-12));
}

TEST_CASE("goal derivative matches finite differences and is linear") {
  const OperatorSet ops = make_ops(0.5, 1);
  const SpaceMesh mesh = build_domain_mesh(0.5);
  const TimePartition p = uniform_partition(0.4, 3, 2, 3);
  std::mt19937_64 rng(21);
  for (GoalKind k : {GoalKind::fluid, GoalKind::solid}) {
    const GoalFunctional J{k};
    const Subdomain own = J.owner();
    for (int trial = 0; trial < 5; ++trial) {
      const PrimalTrajectory U = random_trajectory(rng, p, mesh);
      const PrimalTrajectory X = random_trajectory(rng, p, mesh);
      const double s = 1e-7;
      // central difference: the quadratic term s J(X) cancels
      PrimalTrajectory Vp = U, Vm = U;
      for (std::size_t i = 0; i < U.of(own).size(); ++i) {
        Vp.of(own)[i].u += s * X.of(own)[i].u;
        Vp.of(own)[i].v += s * X.of(own)[i].v;
        Vm.of(own)[i].u -= s * X.of(own)[i].u;
        Vm.of(own)[i].v -= s * X.of(own)[i].v;
      }
      const double fd = (goal_value(J, p, ops, Vp) - goal_value(J, p, ops, Vm)) / (2.0 * s);
      const double exact = load_dot(goal_derivative_load(J, p, ops, U), X.of(own));
      CHECK(std::abs(fd - exact) <= 1e-6 * std::abs(exact));

      PrimalTrajectory U2 = U;
      for (auto& st : U2.of(own)) {
        st.u *= 2.0;
        st.v *= 2.0;
      }
      const auto l1 = goal_derivative_load(J, p, ops, U);
      const auto l2 = goal_derivative_load(J, p, ops, U2);
      for (std::size_t i = 0; i < l1.size(); ++i) {
        CHECK((l2[i].u - 2.0 * l1[i].u).norm() <= 1e-14 * (1.0 + l1[i].u.norm()));
        CHECK((l2[i].v - 2.0 * l1[i].v).norm() <= 1e-14 * (1.0 + l1[i].v.norm()));
      }
    }
  }
}

TEST_CASE("zero goal load gives a zero adjoint") {
  const OperatorSet ops = make_ops(0.5, 1);
  const TimePartition p = uniform_partition(0.3, 3, 2, 1);
  for (AdjointMethod m : {AdjointMethod::monolithic, AdjointMethod::relaxation}) {
    AdjointConfig cfg;
    cfg.method = m;
    const AdjointTrajectory Z = solve_adjoint(p, ops, std::vector<FieldState>{}, std::vector<FieldState>{}, cfg);
    CHECK(max_abs(Z) == 0.0);
    CHECK(Z.fluid.size() == 6);
    CHECK(Z.solid.size() == 3);
  }
}

TEST_CASE("adjoint pairs with any discrete perturbation like the goal derivative") {
  const OperatorSet ops = make_ops(0.5, 1);
  const SpaceMesh mesh = build_domain_mesh(0.5);
  std::mt19937_64 rng(22);
  for (const auto& [M, L] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 3}}) {
    const TimePartition p = uniform_partition(0.3, 3, M, L);
    for (GoalKind k : {GoalKind::fluid, GoalKind::solid}) {
      const GoalFunctional J{k};
      const PrimalTrajectory U = random_trajectory(rng, p, mesh);
      const AdjointTrajectory Z = solve_adjoint(p, ops, J, U);
      const SpaceTimeFunction z = from_adjoint(Z);
      for (int trial = 0; trial < 20; ++trial) {
        const PrimalTrajectory X = random_trajectory(rng, p, mesh);
        const double lhs = evaluate_form(p, ops, from_trajectory(X), z).total;
        double rhs = 0.0;
        for (double v : goal_derivative_pairing(J, p, ops, U, from_trajectory(X))) rhs += v;
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::abs(rhs));
      }
    }
  }
}

TEST_CASE("monolithic and relaxation adjoints agree") {
  const OperatorSet ops = make_ops(0.25, 2);
  for (const auto& [M, L] : {std::pair{1, 1}, std::pair{3, 1}, std::pair{1, 4}}) {
    const TimePartition p = uniform_partition(0.4, 4, M, L);
    const auto U = solve_primal(p, ops, {}).trajectory;
    const GoalFunctional J{GoalKind::solid};
    AdjointConfig rc;
    rc.method = AdjointMethod::relaxation;
    const AdjointTrajectory a = solve_adjoint(p, ops, J, U);
    const AdjointTrajectory b = solve_adjoint(p, ops, J, U, rc);
    CHECK(max_diff(a, b) <= 1e-8 * max_abs(a));
    CHECK(max_abs(a) > 0.0);
  }
}

TEST_CASE("space-time form reproduces the assembled macro blocks") {
  // B(e_j)(phi_i) over all unit trial and test functions equals the global
  // block matrix [init; E_1 D_1; E_2 D_2], whose transpose the adjoint solves
  const OperatorSet ops = make_ops(1.0, 1);
  const TimePartition p = uniform_partition(0.2, 2, 1, 1);
  const int nf = ops.size(Subdomain::fluid), ns = ops.size(Subdomain::solid);
  const int S = 2 * nf + 2 * ns;
  const int nodes = 3;

  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nodes * S, nodes * S);
  G.block(0, 0, S, S) = Eigen::MatrixXd(initial_matrix(ops));
  for (int n = 0; n < 2; ++n) {
    const MacroMatrices mm = assemble_macro_matrices(p, n, ops);
    G.block((n + 1) * S, n * S, S, S) = Eigen::MatrixXd(mm.previous);
    G.block((n + 1) * S, (n + 1) * S, S, S) = Eigen::MatrixXd(mm.current);
  }

  const auto unit_trial = [&](int j) {
    PrimalTrajectory X;
    X.fluid.assign(nodes, FieldState::zero(nf));
    X.solid.assign(nodes, FieldState::zero(ns));
    const int node = j / S, r = j % S;
    auto [f, s] = unpack_state(Vector::Unit(S, r), nf, ns);
    X.fluid[node] = f;
    X.solid[node] = s;
    return from_trajectory(X);
  };
  const auto unit_test = [&](int i) {
    AdjointTrajectory Z;
    Z.fluid.assign(2, FieldState::zero(nf));
    Z.solid.assign(2, FieldState::zero(ns));
    Z.fluid_initial = FieldState::zero(nf);
    Z.solid_initial = FieldState::zero(ns);
    const int slot = i / S, r = i % S;
    auto [f, s] = unpack_state(Vector::Unit(S, r), nf, ns);
    if (slot == 0) {
      Z.fluid_initial = f;
      Z.solid_initial = s;
    } else {
      Z.fluid[slot - 1] = f;
      Z.solid[slot - 1] = s;
    }
    return from_adjoint(Z);
  };

  std::vector<SpaceTimeFunction> trials, tests;
  for (int j = 0; j < nodes * S; ++j) trials.push_back(unit_trial(j));
  for (int i = 0; i < nodes * S; ++i) tests.push_back(unit_test(i));
  const double scale = G.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int i = 0; i < nodes * S; ++i)
    for (int j = 0; j < nodes * S; ++j)
      worst = std::max(worst, std::abs(evaluate_form(p, ops, trials[j], tests[i]).total - G(i, j)));
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("adjoint states before a load change are the only ones affected") {
  const OperatorSet ops = make_ops(0.5, 1);
  const SpaceMesh mesh = build_domain_mesh(0.5);
  const TimePartition p = uniform_partition(0.5, 5, 2, 1);
  std::mt19937_64 rng(23);
  std::vector<FieldState> load;
  for (int i = 0; i <= p.micro_count(Subdomain::fluid); ++i) load.push_back(random_state(rng, mesh.fluid));
  const AdjointTrajectory a = solve_adjoint(p, ops, load, std::vector<FieldState>{});
  // change the load at the first two macro intervals only (fluid nodes 0..4)
  for (int i = 0; i <= 4; ++i) load[i] = random_state(rng, mesh.fluid);
  const AdjointTrajectory b = solve_adjoint(p, ops, load, std::vector<FieldState>{});
  for (int i = 4; i < p.micro_count(Subdomain::fluid); ++i) {
    CHECK(a.fluid[i].u == b.fluid[i].u);
    CHECK(a.fluid[i].v == b.fluid[i].v);
  }
  for (int i = 2; i < p.micro_count(Subdomain::solid); ++i) CHECK(a.solid[i].v == b.solid[i].v);
  CHECK((a.fluid[0].v - b.fluid[0].v).norm() > 0.0);
}

TEST_CASE("goal and adjoint names") {
  CHECK(parse_goal("fluid") == GoalKind::fluid);
  CHECK(parse_goal("solid") == GoalKind::solid);
  CHECK_THROWS(parse_goal("both"));
  CHECK(parse_adjoint_method("relaxation") == AdjointMethod::relaxation);
  CHECK_THROWS(parse_adjoint_method("shooting"));
}
