#pragma once
// Reference computations used only by the tests, implemented independently of
// the library code they check: an exact visited-set expectation for cycle
// walks via (arc length, offset) dynamics, a dense-matrix version of the lamp
// chain transition, and small stat helpers.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lamplab/lattice.hpp"

namespace oracle {

// E[# distinct vertices visited by step t], t = 0..tmax, for the walk on the
// n-cycle. The visited set of a cycle walk is always an arc, so (arc length,
// walker offset from the arc's left end) is a complete Markov state.
inline std::vector<double> cycle_visited_expectation(int n, bool lazy,
                                                     int tmax) {
  auto id = [n](int len, int pos) { return (len - 1) * n + pos; };
  std::vector<double> cur(static_cast<std::size_t>(n) * n, 0.0), nxt;
  cur[id(1, 0)] = 1.0;
  auto expect = [&] {
    double e = 0;
    for (int len = 1; len <= n; ++len)
      for (int pos = 0; pos < len; ++pos) e += len * cur[id(len, pos)];
    return e;
  };
  std::vector<double> out;
  out.reserve(tmax + 1);
  out.push_back(expect());
  const double mv = lazy ? 0.25 : 0.5, hold = lazy ? 0.5 : 0.0;
  for (int t = 1; t <= tmax; ++t) {
    nxt.assign(cur.size(), 0.0);
    for (int len = 1; len <= n; ++len)
      for (int pos = 0; pos < len; ++pos) {
        double m = cur[id(len, pos)];
        if (m == 0) continue;
        if (hold > 0) nxt[id(len, pos)] += hold * m;
        if (len == n) {  // covered; the arc can no longer grow
          nxt[id(n, pos)] += 2 * mv * m;
          continue;
        }
        if (pos > 0)
          nxt[id(len, pos - 1)] += mv * m;
        else
          nxt[id(len + 1, 0)] += mv * m;
        if (pos < len - 1)
          nxt[id(len, pos + 1)] += mv * m;
        else
          nxt[id(len + 1, len)] += mv * m;
      }
    cur.swap(nxt);
    out.push_back(expect());
  }
  return out;
}

// Dense row-stochastic transition matrix of the lazy lamp chain on g, state
// index pos * 2^nv + mask: hold w.p. 1/2, otherwise move to a uniform
// neighbor and re-randomize the lamps at both endpoints of the move.
inline Eigen::MatrixXd dense_lamp_matrix(const lamplab::Graph& g) {
  const int nv = static_cast<int>(g.nv);
  const long long masks = 1LL << nv;
  const int S = static_cast<int>(nv * masks);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(S, S);
  for (int pos = 0; pos < nv; ++pos) {
    const double d = static_cast<double>(g.degree(pos));
    for (long long mask = 0; mask < masks; ++mask) {
      const int s = static_cast<int>(pos * masks + mask);
      P(s, s) += 0.5;
      for (std::int64_t it = g.offsets[pos]; it < g.offsets[pos + 1]; ++it) {
        const int y = g.nbrs[it];
        for (int b1 = 0; b1 < 2; ++b1)
          for (int b2 = 0; b2 < 2; ++b2) {
            long long m2 = mask;
            m2 = b1 ? (m2 | (1LL << pos)) : (m2 & ~(1LL << pos));
            m2 = b2 ? (m2 | (1LL << y)) : (m2 & ~(1LL << y));
            P(s, static_cast<int>(y * masks + m2)) += 1.0 / (8.0 * d);
          }
      }
    }
  }
  return P;
}

inline std::pair<double, double> mean_se(const std::vector<double>& v) {
  double n = static_cast<double>(v.size());
  double s = 0, s2 = 0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  double m = s / n;
  double var = (s2 - n * m * m) / (n - 1.0);
  return {m, std::sqrt(std::max(0.0, var) / n)};
}

}  // namespace oracle
