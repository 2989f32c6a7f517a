#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "gsr/rng.hpp"

using namespace gsr;

TEST_SUITE("rng") {

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(Rng::philox(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Rng::philox(A4{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                    A2{0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Rng::philox(A4{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                    A2{0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("determinism and streams") {
  Rng a(5, 3), b(5, 3), c(5, 4);
  bool differs = false;
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    if (x != c.next_u64()) differs = true;
  }
  CHECK(differs);
  CHECK(derive_stream(2, 1) != derive_stream(2, 2));
  CHECK(derive_stream(2, 1) != derive_stream(3, 1));
}

TEST_CASE("moments") {
  Rng r(9);
  const int n = 200000;
  double s = 0, s2 = 0, u = 0;
  for (int k = 0; k < n; ++k) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    const double v = r.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    u += v;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(u / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("index sampling") {
  Rng r(10);
  std::vector<int> counts(7, 0);
  for (int k = 0; k < 70000; ++k) ++counts[static_cast<std::size_t>(r.uniform_index(7))];
  for (int c : counts) CHECK(std::abs(c - 10000) < 5 * std::sqrt(10000.0));
  const auto s = r.sample_without_replacement(50, 20);
  CHECK(s.size() == 20);
  CHECK(std::set<Index>(s.begin(), s.end()).size() == 20);
  CHECK(*std::max_element(s.begin(), s.end()) < 50);
  CHECK_THROWS_AS(r.sample_without_replacement(5, 6), std::invalid_argument);
}

}
