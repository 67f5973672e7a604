#include <doctest.h>

#include "mrfsi/adaptivity.hpp"

using namespace mrfsi;

namespace {

ErrorBreakdown filled(int nf, int ns, double c) {
  ErrorBreakdown e;
  e.theta_f.assign(nf, c);
  e.vartheta_f.assign(nf, c);
  e.theta_s.assign(ns, c);
  e.vartheta_s.assign(ns, c);
  e.sigma_bar = indicator_average(e);
  return e;
}

OperatorSet make_ops(double h, int config) {
  PhysicalParams p;
  p.h = h;
  return assemble_operators(build_domain_mesh(h), p, config);
}

}  // namespace

TEST_CASE("equal indicators mark nothing") {
  const ErrorBreakdown e = filled(6, 3, 0.4);
  CHECK(e.sigma_bar == doctest::Approx(0.8));
  CHECK(mark(e).empty());
}

TEST_CASE("one large indicator is the only mark") {
  ErrorBreakdown e = filled(8, 4, 1e-3);
  e.theta_f[5] = 1.0;
  e.sigma_bar = indicator_average(e);
  e.theta_f[5] = 10.0 * e.sigma_bar;
  const MarkSet m = mark(e);
  CHECK(m.fluid == std::set<int>{5});
  CHECK(m.solid.empty());

  // the adjoint indicator alone also marks, on either side
  ErrorBreakdown g = filled(4, 4, 1e-3);
  g.vartheta_s[2] = -1.0;
  g.sigma_bar = indicator_average(g);
  CHECK(mark(g).solid == std::set<int>{2});
  CHECK(mark(g).fluid.empty());
}

TEST_CASE("the threshold is inclusive") {
  ErrorBreakdown e = filled(2, 2, 0.0);
  e.theta_f = {1.0, 0.0};
  e.sigma_bar = 1.0;
  CHECK(mark(e).fluid == std::set<int>{0});
}

TEST_CASE("a zero average marks nothing") {
  CHECK(mark(filled(5, 5, 0.0)).empty());
}

TEST_CASE("zero source makes the loop a fixed point") {
  OperatorSet ops = make_ops(0.5, 1);
  ops.load_f.setZero();
  ops.load_s.setZero();
  AdaptiveProblem pr;
  pr.ops = &ops;
  pr.primal.method = DecouplingMethod::monolithic;
  const TimePartition p0 = uniform_partition(1.0, 4, 2, 1);
  const AdaptiveResult res = adaptive_loop(p0, 2, pr);
  REQUIRE(res.records.size() == 3);
  REQUIRE(res.partitions.size() == 3);
  for (const auto& r : res.records) {
    CHECK(r.goal == 0.0);
    CHECK(r.breakdown.sigma == 0.0);
    CHECK(r.marked_fluid + r.marked_solid == 0);
    CHECK_FALSE(r.eff.has_value());
  }
  for (const auto& p : res.partitions) CHECK(p == p0);
}

TEST_CASE("loop records follow the refined partitions") {
  const OperatorSet ops = make_ops(0.5, 1);
  AdaptiveProblem pr;
  pr.ops = &ops;
  pr.primal.method = DecouplingMethod::monolithic;
  pr.reference = 0.0;
  const AdaptiveResult res = adaptive_loop(uniform_partition(1.0, 10, 1, 1), 2, pr);
  REQUIRE(res.records.size() == 3);
  for (std::size_t k = 0; k < res.records.size(); ++k) {
    const auto& r = res.records[k];
    const auto& p = res.partitions[k];
    CHECK(r.step == static_cast<int>(k));
    CHECK(r.macro_count == p.macro_count());
    CHECK(r.fluid_count == p.micro_count(Subdomain::fluid));
    CHECK(r.solid_count == p.micro_count(Subdomain::solid));
    CHECK(validate(p).empty());
    REQUIRE(r.error.has_value());
    CHECK(*r.error == -r.goal);
    if (k + 1 < res.records.size()) {
      CHECK(r.marked_fluid + r.marked_solid > 0);
      CHECK(res.partitions[k + 1].micro_count(Subdomain::fluid) >= r.fluid_count + r.marked_fluid);
    } else {
      CHECK(r.marked_fluid + r.marked_solid == 0);
    }
  }
  const AdaptiveRecord again = evaluate_partition(res.partitions[1], pr);
  CHECK(again.goal == res.records[1].goal);
}

TEST_CASE("a failing stage reports its step and the records so far") {
  const OperatorSet ops = make_ops(0.5, 1);
  AdaptiveProblem pr;
  pr.ops = &ops;
  pr.primal.method = DecouplingMethod::relaxation;
  pr.primal.max_iter = 1;
  try {
    adaptive_loop(uniform_partition(1.0, 4, 1, 1), 2, pr);
    FAIL("expected an AdaptiveError");
  } catch (const AdaptiveError& e) {
    CHECK(e.step() == 0);
    CHECK(e.partial().records.empty());
    CHECK(std::string(e.what()).find("step 0") != std::string::npos);
  }
}
