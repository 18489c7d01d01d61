#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lamplab/rng.hpp"

using namespace lamplab;
using Catch::Approx;

TEST_CASE("streams are reproducible and separated", "[rng]") {
  Rng a(7, experiment_id("alpha"), 3);
  Rng b(7, experiment_id("alpha"), 3);
  for (int i = 0; i < 64; ++i) REQUIRE(a() == b());

  Rng c(7, experiment_id("alpha"), 4);
  Rng d(7, experiment_id("beta"), 3);
  Rng e(8, experiment_id("alpha"), 3);
  bool all_equal = true;
  Rng ref(7, experiment_id("alpha"), 3);
  for (int i = 0; i < 8; ++i) {
    std::uint64_t r = ref();
    all_equal = all_equal && (c() == r) && (d() == r) && (e() == r);
  }
  REQUIRE_FALSE(all_equal);
}

TEST_CASE("experiment ids distinguish names", "[rng]") {
  REQUIRE(experiment_id("cover") == experiment_id("cover"));
  REQUIRE(experiment_id("cover") != experiment_id("r3"));
  REQUIRE(experiment_id("") != experiment_id("x"));
}

TEST_CASE("below is in range and unbiased enough", "[rng]") {
  Rng rng(1, experiment_id("below"), 0);
  const std::uint64_t n = 6;
  std::vector<std::int64_t> cnt(n, 0);
  const int draws = 120000;
  for (int i = 0; i < draws; ++i) {
    std::uint64_t v = rng.below(n);
    REQUIRE(v < n);
    ++cnt[v];
  }
  // each bucket: mean 20000, sd ~ sqrt(20000 * 5/6) ~ 129
  for (auto c : cnt) REQUIRE(std::abs(c - draws / 6.0) < 5 * 130.0);
}

TEST_CASE("u01 and coin moments", "[rng]") {
  Rng rng(1, experiment_id("u01"), 0);
  const int n = 100000;
  double s = 0, s2 = 0;
  int heads = 0;
  for (int i = 0; i < n; ++i) {
    double u = rng.u01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
    heads += rng.coin() ? 1 : 0;
  }
  double mean = s / n;
  REQUIRE(mean == Approx(0.5).margin(4.0 / std::sqrt(12.0 * n)));
  double var = s2 / n - mean * mean;
  REQUIRE(var == Approx(1.0 / 12).margin(0.002));
  REQUIRE(std::abs(heads - n / 2) < 4 * std::sqrt(0.25 * n));
}

TEST_CASE("normal moments", "[rng]") {
  Rng rng(1, experiment_id("normal"), 0);
  const int n = 100000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    s += x;
    s2 += x * x;
  }
  REQUIRE(s / n == Approx(0.0).margin(4.0 / std::sqrt((double)n)));
  REQUIRE(s2 / n == Approx(1.0).margin(4.0 * std::sqrt(2.0 / n)));
}
