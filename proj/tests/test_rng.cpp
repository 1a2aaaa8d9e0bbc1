#include <catch2/catch.hpp>

#include <set>

#include "holant/rng.hpp"

using namespace holant;

TEST_CASE("splitmix64 reference values", "[rng]") {
  // First outputs for seed 0 of the standard SplitMix64 stream (frozen so
  // refactors cannot silently change every downstream result).
  Rng rng(0);
  REQUIRE(rng.next() == 0x378e82a64533334eULL);
  REQUIRE(rng.next() == 0x7742fc838f1521e6ULL);
  REQUIRE(rng.next() == 0x215cd334844ca80bULL);
}

TEST_CASE("streams are reproducible and seed-sensitive", "[rng]") {
  Rng a(123), b(123), c(124);
  for (int i = 0; i < 100; ++i) {
    auto x = a.next();
    REQUIRE(x == b.next());
  }
  bool differs = false;
  Rng a2(123);
  for (int i = 0; i < 100; ++i) differs = differs || (a2.next() != c.next());
  REQUIRE(differs);
}

TEST_CASE("uniform doubles land in [0,1) and fill the range", "[rng]") {
  Rng rng(55);
  double mn = 1.0, mx = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    mn = std::min(mn, u);
    mx = std::max(mx, u);
  }
  REQUIRE(mn < 0.001);
  REQUIRE(mx > 0.999);
}

TEST_CASE("bounded integers are unbiased enough and in range", "[rng]") {
  Rng rng(7);
  std::vector<long> counts(7, 0);
  for (int i = 0; i < 700000; ++i) ++counts[rng.next_below(7)];
  for (long c : counts) {
    REQUIRE(c > 95000);
    REQUIRE(c < 105000);
  }
}

TEST_CASE("seed splitting separates streams", "[rng]") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(split_seed(42, i));
  REQUIRE(seeds.size() == 1000);
  REQUIRE(split_seed(42, 0) != split_seed(43, 0));
  REQUIRE(split_seed(42, 0) == split_seed(42, 0));
}
