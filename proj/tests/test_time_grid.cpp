#include <doctest.h>

#include "mrfsi/time_grid.hpp"

#include <algorithm>
#include <random>
#include <sstream>

using namespace mrfsi;

namespace {

bool has_error(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.find(needle) != e.npos; });
}

bool nested(const std::vector<Tick>& coarse, const std::vector<Tick>& fine) {
  return std::includes(fine.begin(), fine.end(), coarse.begin(), coarse.end());
}

}  // namespace

TEST_CASE("uniform partition sizes") {
  const TimePartition p = uniform_partition(1.0, 50, 1, 1);
  CHECK(p.macro_count() == 50);
  CHECK(p.micro_count(Subdomain::fluid) == 50);
  CHECK(p.micro_count(Subdomain::solid) == 50);
  CHECK(p.interval_length(Subdomain::fluid, 7) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(p.time(p.macro(1).begin()) == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(validate(p).empty());

  const TimePartition q = uniform_partition(1.0, 5, 2, 1);
  CHECK(q.macro(0).fluid.size() == 3);
  CHECK(q.micro_count(Subdomain::fluid) == 10);
  CHECK(q.micro_count(Subdomain::solid) == 5);
  CHECK(validate(q).empty());

  // equal subcycling puts fluid and solid nodes on the same macro midpoint;
  // that coincidence is the only reported violation
  const TimePartition r = uniform_partition(1.0, 2, 2, 2);
  const auto errors = validate(r);
  CHECK(errors.size() == 2);
  for (const auto& e : errors) CHECK(e.find("shared interior node") != e.npos);
  CHECK(r.patches(Subdomain::fluid).size() == 2);
  CHECK(r.patches(Subdomain::solid).size() == 2);
}

TEST_CASE("uniform partition rejects zero counts") {
  CHECK_THROWS_AS(uniform_partition(1.0, 0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(uniform_partition(1.0, 1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(uniform_partition(1.0, 1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_partition(0.0, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("odd micro counts leave one trailing single patch") {
  const TimePartition p = uniform_partition(1.0, 3, 1, 3);
  CHECK(validate(p).empty());
  const auto& fp = p.patches(Subdomain::fluid);
  REQUIRE(fp.size() == 2);
  CHECK(fp[0].count == 2);
  CHECK(fp[1].count == 1);
  // the first fluid patch straddles the first macro boundary
  CHECK(fp[0].begin == p.macro(0).begin());
  CHECK(fp[0].end == p.macro(1).end());
  CHECK(p.patches(Subdomain::solid).size() == 5);
  CHECK(p.patch_of_interval(Subdomain::fluid, 2) == 1);
}

TEST_CASE("validate reports shared interior nodes") {
  std::vector<MacroInterval> macros{{{0, 2, 4}, {0, 2, 4}}};
  const TimePartition p(1.0, 4, macros, {{0, 4, 2}}, {{0, 4, 2}});
  CHECK(has_error(validate(p), "shared interior node"));
}

TEST_CASE("validate reports unequal patch lengths") {
  std::vector<MacroInterval> macros{{{0, 1, 3}, {0, 3}}};
  const TimePartition p(0.03, 3, macros, {{0, 3, 2}}, {{0, 3, 1}});
  CHECK(has_error(validate(p), "unequal patch lengths"));
}

TEST_CASE("validate reports broken macro structure") {
  std::vector<MacroInterval> macros{{{0, 4}, {0, 4}}, {{5, 8}, {5, 8}}};
  const TimePartition p(1.0, 8, macros, {}, {});
  CHECK(has_error(validate(p), "gap between macro intervals"));
  std::vector<MacroInterval> bad{{{0, 3, 2, 4}, {0, 4}}};
  CHECK(has_error(validate(TimePartition(1.0, 4, bad, {}, {})), "non-increasing"));
}

TEST_CASE("refine with no marks is the identity") {
  const TimePartition p = uniform_partition(1.0, 4, 2, 1);
  CHECK(refine(p, {}) == p);
}

TEST_CASE("marking one interval of a patch bisects both") {
  const TimePartition p = uniform_partition(1.0, 4, 2, 1);
  MarkSet m;
  m.fluid.insert(1);
  const TimePartition q = refine(p, m);
  CHECK(q.micro_count(Subdomain::fluid) == p.micro_count(Subdomain::fluid) + 2);
  CHECK(q.micro_count(Subdomain::solid) == p.micro_count(Subdomain::solid));
  CHECK(q.macro_count() == 4);
  CHECK(validate(q).empty());
  CHECK(q.macro(0).fluid.size() == 5);
}

TEST_CASE("a new fluid node on an existing solid node splits the macro interval") {
  const TimePartition p = uniform_partition(1.0, 1, 1, 2);
  MarkSet m;
  m.fluid.insert(0);
  const TimePartition q = refine(p, m);
  CHECK(q.macro_count() == 2);
  CHECK(q.time(q.macro(0).end()) == 0.5);
  CHECK(q.macro(0).micro_count(Subdomain::fluid) == 1);
  CHECK(q.macro(0).micro_count(Subdomain::solid) == 1);
  CHECK(validate(q).empty());
  // the refined fluid pair is a patch across the new macro node
  REQUIRE(q.patches(Subdomain::fluid).size() == 1);
  CHECK(q.patches(Subdomain::fluid)[0].count == 2);
}

TEST_CASE("refine splits coincidences already present in the input") {
  const TimePartition p = uniform_partition(1.0, 2, 2, 2);
  MarkSet m;
  m.solid.insert(0);
  const TimePartition q = refine(p, m);
  CHECK(validate(q).empty());
  CHECK(q.macro_count() == 4);
}

TEST_CASE("patches straddling a macro split are kept") {
  const TimePartition p = uniform_partition(1.0, 2, 1, 2);
  MarkSet m;
  m.fluid.insert(0);
  const TimePartition q = refine(p, m);
  CHECK(q.macro_count() == 4);
  CHECK(q.patches(Subdomain::fluid).size() == 2);
  CHECK(q.patches(Subdomain::solid) == p.patches(Subdomain::solid));
  CHECK(validate(q).empty());
}

TEST_CASE("refine rejects marks outside the mesh") {
  const TimePartition p = uniform_partition(1.0, 2, 1, 1);
  MarkSet m;
  m.solid.insert(2);
  CHECK_THROWS_AS(refine(p, m), std::invalid_argument);
  m.solid = {-1};
  CHECK_THROWS_AS(refine(p, m), std::invalid_argument);
}

TEST_CASE("random refine sequences keep every invariant") {
  std::mt19937_64 rng(20241);
  std::uniform_int_distribution<int> macro_count(1, 6);
  std::uniform_int_distribution<int> micro(1, 4);
  std::uniform_int_distribution<int> steps(1, 4);
  std::bernoulli_distribution pick(0.25);
  int sequences = 0;
  for (int trial = 0; trial < 500; ++trial) {
    TimePartition p = uniform_partition(1.0, macro_count(rng), micro(rng), micro(rng));
    for (const auto& e : validate(p)) REQUIRE(e.find("shared interior node") != e.npos);
    const int n_steps = steps(rng);
    for (int s = 0; s < n_steps; ++s) {
      MarkSet marks;
      for (Subdomain d : {Subdomain::fluid, Subdomain::solid})
        for (int i = 0; i < p.micro_count(d); ++i)
          if (pick(rng)) marks.of(d).insert(i);
      const TimePartition q = refine(p, marks);
      if (marks.empty()) {
        CHECK(q == p);
      } else {
        const auto errors = validate(q);
        REQUIRE_MESSAGE(errors.empty(), errors.front());
      }
      for (Subdomain d : {Subdomain::fluid, Subdomain::solid}) {
        CHECK(nested(p.nodes(d), q.nodes(d)));
        CHECK(q.micro_count(d) >= p.micro_count(d));
        // whole patches are bisected
        int expected = 0;
        std::set<int> touched;
        for (int i : marks.of(d)) touched.insert(p.patch_of_interval(d, i));
        for (int k : touched) expected += p.patches(d)[k].count;
        CHECK(q.micro_count(d) - p.micro_count(d) == expected);
      }
      CHECK(q.macro_count() >= p.macro_count());
      std::vector<Tick> old_macro{0}, new_macro{0};
      for (const auto& I : p.macros()) old_macro.push_back(I.end());
      for (const auto& I : q.macros()) new_macro.push_back(I.end());
      CHECK(nested(old_macro, new_macro));
      p = q;
    }
    ++sequences;
  }
  CHECK(sequences == 500);
}

TEST_CASE("text serialization has one line per macro interval") {
  const TimePartition p = uniform_partition(1.0, 2, 2, 1);
  std::ostringstream out;
  write_partition_text(out, p);
  CHECK(out.str() == "0 0.5 | 0 0.25 0.5 | 0 0.5\n0.5 1 | 0.5 0.75 1 | 0.5 1\n");
}
