#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gsr/groups.hpp"
#include "gsr/rng.hpp"

using namespace gsr;

TEST_SUITE("groups") {

TEST_CASE("partition validation") {
  CHECK_NOTHROW(GroupStructure(4, {{0, 2}, {1, 3}}));
  CHECK_THROWS_AS(GroupStructure(4, {{0, 1}, {1, 2, 3}}), std::invalid_argument);  // overlap
  CHECK_THROWS_AS(GroupStructure(4, {{0, 1}, {2}}), std::invalid_argument);        // missing 3
  CHECK_THROWS_AS(GroupStructure(3, {{0, 1, 2}, {}}), std::invalid_argument);     // empty group
  CHECK_THROWS_AS(GroupStructure(3, {{0, 1, 5}}), std::invalid_argument);         // out of range
}

TEST_CASE("contiguous blocks") {
  const auto g = GroupStructure::contiguous(10, 4);
  REQUIRE(g.num_groups() == 4);
  CHECK(g.group_size(0) == 3);
  CHECK(g.group_size(3) == 1);
  CHECK(g.group_of(9) == 3);
  const auto h = GroupStructure::from_sizes({2, 3});
  CHECK(h.group(1) == IndexList{2, 3, 4});
}

TEST_CASE("norms") {
  const GroupStructure g(2, {{0, 1}});
  Vec x(2);
  x << 3, 4;
  CHECK(group_norms(x, g)[0] == doctest::Approx(5.0));

  const auto g3 = GroupStructure::from_sizes({1, 2, 1});
  Vec y(4);
  y << 1, 3, 4, 3;  // norms (1, 5, 3)
  Vec w(3);
  w << 2, 0, 1;
  CHECK(l21_norm(y, g3, w) == doctest::Approx(5.0));
  CHECK(l21_norm(y, g3) == doctest::Approx(9.0));
}

TEST_CASE("zero norms") {
  const auto g = GroupStructure::from_sizes({2, 2, 2});
  Vec x = Vec::Zero(6);
  x[2] = 1e-6;  // exactly at the tolerance: not counted
  x[5] = 2e-6;
  CHECK(approx_group_zero_norm(x, g) == 1);
  CHECK(group_zero_norm(x, g) == 2);
  CHECK(group_zero_norm(Vec::Zero(6), g) == 0);
}

TEST_CASE("equilibrium residual") {
  const auto g = GroupStructure::from_sizes({1, 1});
  Vec x(2);
  x << 1, -2;
  CHECK(equilibrium_residual(x, Vec::Zero(2), g) == doctest::Approx(3.0));
  CHECK(equilibrium_residual(x, Vec::Ones(2), g) == 0.0);
}

TEST_CASE("box") {
  CHECK_THROWS_AS(BoxConstraint(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(BoxConstraint(std::nan("")), std::invalid_argument);
  CHECK_NOTHROW(BoxConstraint(0.0));
  Vec x(3);
  x << -5, 0.5, 2;
  const Vec y = project_box(x, BoxConstraint(1.0));
  CHECK(y[0] == -1.0);
  CHECK(y[1] == 0.5);
  CHECK(y[2] == 1.0);
}

TEST_CASE("gather/scatter and json roundtrip") {
  const GroupStructure g(5, {{4, 0}, {1, 2, 3}});
  Vec x(5);
  x << 0, 1, 2, 3, 4;
  const Vec a = g.gather(x, 0);
  CHECK(a[0] == 4.0);
  CHECK(a[1] == 0.0);
  Vec z = Vec::Zero(5);
  g.scatter(z, 0, a);
  CHECK(z[4] == 4.0);
  const auto j = g.to_json();
  CHECK(j["groups"][0][0] == 5);  // stored 1-based
  CHECK(GroupStructure::from_json(j) == g);
}

TEST_CASE("property: norm homogeneity and triangle inequality") {
  Rng rng(7);
  const auto g = GroupStructure::contiguous(20, 5);
  for (int t = 0; t < 100; ++t) {
    const Vec x = rng.normal_vector(20), y = rng.normal_vector(20);
    const double c = rng.uniform() * 4 - 2;
    CHECK(l21_norm(c * x, g) == doctest::Approx(std::abs(c) * l21_norm(x, g)));
    CHECK(l21_norm(x + y, g) <= l21_norm(x, g) + l21_norm(y, g) + 1e-12);
  }
}

}
