#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lamplab/walk.hpp"
#include "oracles.hpp"

using namespace lamplab;
using Catch::Approx;

TEST_CASE("lazy walk holds half the time, thirds per axis", "[walk]") {
  TorusSpec s = TorusSpec::from_h(16, 4);
  Torus3Walk w(s);
  Rng rng(3, experiment_id("walk-hold"), 0);
  const int steps = 60000;
  int moved = 0, vertical = 0;
  for (int i = 0; i < steps; ++i) {
    int z0 = w.z;
    if (w.step(rng, true)) {
      ++moved;
      if (w.z != z0) ++vertical;
    }
  }
  REQUIRE(std::abs(moved - steps / 2.0) < 4 * std::sqrt(steps * 0.25));
  REQUIRE(std::abs(vertical - moved / 3.0) <
          4 * std::sqrt(moved * (1.0 / 3) * (2.0 / 3)));

  // non-lazy steps always move
  Torus3Walk w2(s);
  for (int i = 0; i < 1000; ++i) REQUIRE(w2.step(rng, false));
}

TEST_CASE("each move changes one coordinate by one", "[walk]") {
  TorusSpec s = TorusSpec::from_h(9, 5);
  Torus3Walk w(s, 4, 4, 2);
  Rng rng(5, experiment_id("walk-step"), 0);
  for (int i = 0; i < 2000; ++i) {
    int x0 = w.x, y0 = w.y, z0 = w.z;
    bool moved = w.step(rng, true);
    int dx = std::abs(wrap_delta(w.x - x0, s.n));
    int dy = std::abs(wrap_delta(w.y - y0, s.n));
    int dz = std::abs(wrap_delta(w.z - z0, s.h));
    REQUIRE(dx + dy + dz == (moved ? 1 : 0));
  }
}

TEST_CASE("trajectories are reproducible", "[walk]") {
  TorusSpec s = TorusSpec::from_h(8, 4);
  Torus3Walk a(s), b(s);
  Rng r1(9, experiment_id("walk-rep"), 2), r2(9, experiment_id("walk-rep"), 2);
  for (int i = 0; i < 500; ++i) {
    a.step(r1, true);
    b.step(r2, true);
    REQUIRE(a.index() == b.index());
  }
}

TEST_CASE("lamp state bookkeeping", "[walk]") {
  LampState l(70);
  REQUIRE(l.size() == 70);
  REQUIRE(l.count_on() == 0);
  l.set(0, true);
  l.set(69, true);
  l.set(33, true);
  l.set(33, false);
  REQUIRE(l.get(0));
  REQUIRE(l.get(69));
  REQUIRE_FALSE(l.get(33));
  REQUIRE(l.count_on() == 2);
  l.clear();
  REQUIRE(l.count_on() == 0);

  Rng rng(1, experiment_id("lamps"), 0);
  l.randomize(rng);
  REQUIRE(std::abs(l.count_on() - 35.0) < 4 * std::sqrt(70 * 0.25));
}

TEST_CASE("lamp refresh touches exactly the move endpoints", "[walk]") {
  Graph g = build_cycle(8);
  GraphWalk w(g, 0);
  LampState lamps(8);
  Rng rng(4, experiment_id("lamp-endpoints"), 0);
  for (int i = 0; i < 2000; ++i) {
    std::vector<bool> before(8);
    for (vid v = 0; v < 8; ++v) before[v] = lamps.get(v);
    vid from = w.v;
    bool moved = step_lamplighter(w, lamps, rng);
    if (!moved) {
      REQUIRE(w.v == from);
      for (vid v = 0; v < 8; ++v) REQUIRE(lamps.get(v) == before[v]);
    } else {
      REQUIRE(g.adjacent(from, w.v));
      for (vid v = 0; v < 8; ++v)
        if (v != from && v != w.v) REQUIRE(lamps.get(v) == before[v]);
    }
  }
}

TEST_CASE("cycle cover times match first-step analysis", "[walk]") {
  // E[cover] of the n-cycle is n(n-1)/2 for the plain walk, doubled when lazy
  const int trials = 3000;
  Graph g = build_cycle(4);
  std::vector<double> plain, lazy;
  for (int t = 0; t < trials; ++t) {
    Rng r1(11, experiment_id("cover-c4"), t);
    plain.push_back(static_cast<double>(
        run_until_cover_graph(g, 0, r1, false).steps));
    Rng r2(11, experiment_id("cover-c4-lazy"), t);
    lazy.push_back(static_cast<double>(
        run_until_cover_graph(g, 0, r2, true).steps));
  }
  auto [mp, sp] = oracle::mean_se(plain);
  auto [ml, sl] = oracle::mean_se(lazy);
  REQUIRE(mp == Approx(6.0).margin(4 * sp));
  REQUIRE(ml == Approx(12.0).margin(4 * sl));
}

TEST_CASE("cover result bookkeeping", "[walk]") {
  TorusSpec s = TorusSpec::from_h(6, 3);
  Rng rng(2, experiment_id("cover-book"), 0);
  CoverResult res = run_until_cover(s, rng, true, std::int64_t{1} << 40, true);
  REQUIRE(res.covered);
  REQUIRE((std::int64_t)res.first_hit.size() == s.vertices());
  REQUIRE(res.first_hit[0] == 0);  // start vertex
  std::int64_t latest = 0;
  vid argmax = -1;
  for (vid v = 0; v < s.vertices(); ++v) {
    REQUIRE(res.first_hit[v] >= 0);
    if (res.first_hit[v] > latest) latest = res.first_hit[v], argmax = v;
  }
  REQUIRE(latest == res.steps);
  REQUIRE(argmax == res.last_vertex);

  // budget exhaustion reports failure
  Rng rng2(2, experiment_id("cover-book"), 1);
  CoverResult cut = run_until_cover(s, rng2, true, 10);
  REQUIRE_FALSE(cut.covered);
  REQUIRE(cut.steps == 10);
}

TEST_CASE("visited curve matches the arc oracle", "[walk]") {
  const int n = 8, tmax = 32, trials = 4000;
  Graph g = build_cycle(n);
  for (bool lazy : {false, true}) {
    auto exact = oracle::cycle_visited_expectation(n, lazy, tmax);
    std::vector<std::int64_t> checkpoints = {0, 1, 2, 4, 8, 16, 32};
    std::vector<std::vector<double>> samples(checkpoints.size());
    for (int t = 0; t < trials; ++t) {
      Rng rng(7, experiment_id(lazy ? "curve-lazy" : "curve"), t);
      auto c = visited_count_curve(g, 0, lazy, rng, checkpoints);
      for (std::size_t i = 0; i < c.size(); ++i)
        samples[i].push_back(static_cast<double>(c[i]));
    }
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      auto [m, se] = oracle::mean_se(samples[i]);
      double want = exact[checkpoints[i]];
      INFO("lazy=" << lazy << " t=" << checkpoints[i] << " mc=" << m
                   << " exact=" << want);
      REQUIRE(std::abs(m - want) < std::max(4 * se, 1e-9));
    }
  }
}

TEST_CASE("antipodal hitting times on the cycle", "[walk]") {
  // gambler's ruin: E[hit k from 0 on the n-cycle] = k(n-k)
  const int n = 8, trials = 3000;
  Graph g = build_cycle(n);
  std::vector<double> hits;
  for (int t = 0; t < trials; ++t) {
    Rng rng(13, experiment_id("hit-c8"), t);
    auto ht = hitting_time_graph(g, 0, 4, rng, false, 1 << 20);
    REQUIRE(ht.has_value());
    hits.push_back(static_cast<double>(*ht));
  }
  auto [m, se] = oracle::mean_se(hits);
  REQUIRE(m == Approx(16.0).margin(4 * se));
}

TEST_CASE("visited bitmap sanity", "[walk]") {
  TorusSpec s = TorusSpec::from_h(8, 4);
  Rng rng(3, experiment_id("bitmap"), 0);
  auto bm = visited_bitmap(s, 50, true, rng);
  std::int64_t pop = 0;
  for (auto w : bm) pop += __builtin_popcountll(w);
  REQUIRE(pop >= 1);
  REQUIRE(pop <= 51);
  REQUIRE((bm[0] & 1) == 1);  // start vertex (0,0,0)
}

TEST_CASE("escape probability estimator", "[walk]") {
  QR3Result r = estimate_q_r3(20000, {8, 16, 32}, 21);
  INFO("q=" << r.q << " +- " << r.se_q << " r3=" << r.r3);
  REQUIRE(r.q > 0.62);
  REQUIRE(r.q < 0.70);
  REQUIRE(r.r3 == Approx(1.0 / (6.0 * r.q)).epsilon(1e-12));
  // raw escape frequencies decrease with the radius
  REQUIRE(r.q_at_radius.size() == 3);
  REQUIRE(r.q_at_radius[0] >= r.q_at_radius[1]);
  REQUIRE(r.q_at_radius[1] >= r.q_at_radius[2]);
  REQUIRE(r.trials == 20000);

  REQUIRE_THROWS_AS(estimate_q_r3(0, {8}, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(estimate_q_r3(10, {16, 8}, 1), std::invalid_argument);
}
