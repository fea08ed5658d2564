#include <doctest.h>

#include <cstdint>
#include <vector>

#include "spinbath/rng.hpp"

using spinbath::RandomStream;

TEST_CASE("streams are pure functions of (seed, stream index)") {
  RandomStream a(42, 7);
  RandomStream b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct seeds and distinct streams decorrelate") {
  RandomStream a(42, 0);
  RandomStream b(43, 0);
  RandomStream c(42, 1);
  int same_ab = 0;
  int same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
}

TEST_CASE("doubles live in [0, 1) and fill the interval") {
  RandomStream rng(1, 0);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 1e-4);
  CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("uniform respects bounds") {
  RandomStream rng(2, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-3.25, 11.5);
    CHECK(u >= -3.25);
    CHECK(u < 11.5);
  }
}
