#pragma once
// Walk engine: samplers for the (optionally lazy) simple random walk on the
// thin torus, the 2D torus, generic graphs, and Z^3; the lamplighter chain on
// top of the lazy walk; cover/hitting runners; and the escape-probability
// estimator behind the r3 constant.
//
// Every sampler takes an Rng stream; identical (seed, stream) pairs give
// identical trajectories.

#include <cstdint>
#include <chrono>
#include <limits>
#include <optional>
#include <vector>

#include "lamplab/lattice.hpp"
#include "lamplab/rng.hpp"

namespace lamplab {

// ---------------------------------------------------------------------------
// Steppers. A "lazy" step holds with probability 1/2; a step reports whether
// the walker actually moved. Directions are drawn with a single bounded draw:
// below(2d) for the non-lazy kernel, below(4d) with the top half meaning
// "hold" for the lazy kernel.
// ---------------------------------------------------------------------------
struct Torus3Walk {
  int n = 0, h = 0;
  int x = 0, y = 0, z = 0;

  explicit Torus3Walk(const TorusSpec& t, int x0 = 0, int y0 = 0, int z0 = 0)
      : n(t.n), h(t.h), x(x0), y(y0), z(z0) {}

  bool step(Rng& rng, bool lazy) {
    std::uint32_t d = static_cast<std::uint32_t>(rng.below(lazy ? 12 : 6));
    if (d >= 6) return false;  // hold
    switch (d) {
      case 0: x = (x + 1 == n) ? 0 : x + 1; break;
      case 1: x = (x == 0) ? n - 1 : x - 1; break;
      case 2: y = (y + 1 == n) ? 0 : y + 1; break;
      case 3: y = (y == 0) ? n - 1 : y - 1; break;
      case 4: z = (z + 1 == h) ? 0 : z + 1; break;
      default: z = (z == 0) ? h - 1 : z - 1; break;
    }
    return true;
  }

  vid index() const { return static_cast<vid>((std::int64_t(x) * n + y) * h + z); }
};

struct Torus2Walk {
  int n = 0;
  int x = 0, y = 0;

  Torus2Walk(int n_, int x0 = 0, int y0 = 0) : n(n_), x(x0), y(y0) {}

  bool step(Rng& rng, bool lazy) {
    std::uint32_t d = static_cast<std::uint32_t>(rng.below(lazy ? 8 : 4));
    if (d >= 4) return false;
    switch (d) {
      case 0: x = (x + 1 == n) ? 0 : x + 1; break;
      case 1: x = (x == 0) ? n - 1 : x - 1; break;
      case 2: y = (y + 1 == n) ? 0 : y + 1; break;
      default: y = (y == 0) ? n - 1 : y - 1; break;
    }
    return true;
  }

  vid index() const { return static_cast<vid>(std::int64_t(x) * n + y); }
};

// Graph walk for the oracle-scale graphs (cycles, complete graphs, ...).
struct GraphWalk {
  const Graph* g = nullptr;
  vid v = 0;

  GraphWalk(const Graph& graph, vid start) : g(&graph), v(start) {}

  bool step(Rng& rng, bool lazy) {
    int d = g->degree(v);
    std::uint64_t r = rng.below(lazy ? 2 * d : d);
    if (r >= static_cast<std::uint64_t>(d)) return false;
    v = g->nbrs[g->offsets[v] + static_cast<std::int64_t>(r)];
    return true;
  }
};

// ---------------------------------------------------------------------------
// Lamp configuration over a vertex set, packed 64 per word.
// ---------------------------------------------------------------------------
class LampState {
 public:
  explicit LampState(std::int64_t n_vertices)
      : n_(n_vertices), bits_((n_vertices + 63) / 64, 0) {}

  bool get(vid v) const { return (bits_[v >> 6] >> (v & 63)) & 1; }
  void set(vid v, bool on) {
    std::uint64_t m = 1ULL << (v & 63);
    if (on)
      bits_[v >> 6] |= m;
    else
      bits_[v >> 6] &= ~m;
  }
  std::int64_t count_on() const {
    std::int64_t c = 0;
    for (auto w : bits_) c += __builtin_popcountll(w);
    return c;
  }
  std::int64_t size() const { return n_; }
  void randomize(Rng& rng) {
    for (auto& w : bits_) w = rng();
    int rem = static_cast<int>(n_ & 63);
    if (rem) bits_.back() &= (1ULL << rem) - 1;
  }
  void clear() { std::fill(bits_.begin(), bits_.end(), 0); }

 private:
  std::int64_t n_;
  std::vector<std::uint64_t> bits_;
};

// One lamplighter transition: the walker takes a lazy step; iff it actually
// moved, the lamps at the departure and arrival vertices are replaced by
// independent fair bits. Holding leaves every lamp untouched.
inline bool step_lamplighter(Torus3Walk& w, LampState& lamps, Rng& rng) {
  vid from = w.index();
  if (!w.step(rng, /*lazy=*/true)) return false;
  std::uint64_t b = rng();
  lamps.set(from, b & 1);
  lamps.set(w.index(), (b >> 1) & 1);
  return true;
}

inline bool step_lamplighter(GraphWalk& w, LampState& lamps, Rng& rng) {
  vid from = w.v;
  if (!w.step(rng, /*lazy=*/true)) return false;
  std::uint64_t b = rng();
  lamps.set(from, b & 1);
  lamps.set(w.v, (b >> 1) & 1);
  return true;
}

// ---------------------------------------------------------------------------
// Cover and hitting runners.
// ---------------------------------------------------------------------------
struct CoverResult {
  std::int64_t steps = 0;   // step count at which the last vertex was reached
  bool covered = false;     // false iff the budget ran out first
  vid last_vertex = -1;     // the vertex whose first visit completed the cover
  std::vector<std::int64_t> first_hit;  // per-vertex first-hit step (-1 =
                                        // never); filled only when requested
};

template <typename WalkT, typename IndexFn>
CoverResult run_until_cover_impl(WalkT& w, std::int64_t n_vertices, IndexFn idx,
                                 Rng& rng, bool lazy, std::int64_t budget,
                                 bool record_hits = false) {
  CoverResult res;
  std::vector<std::uint64_t> visited;
  if (record_hits)
    res.first_hit.assign(n_vertices, -1);
  else
    visited.assign((n_vertices + 63) / 64, 0);
  std::int64_t remaining = n_vertices;
  std::int64_t t = 0;
  auto visit = [&](vid v) {
    bool fresh;
    if (record_hits) {
      fresh = res.first_hit[v] < 0;
      if (fresh) res.first_hit[v] = t;
    } else {
      std::uint64_t m = 1ULL << (v & 63);
      fresh = !(visited[v >> 6] & m);
      if (fresh) visited[v >> 6] |= m;
    }
    if (fresh && --remaining == 0) res.last_vertex = v;
  };
  visit(idx(w));
  while (remaining > 0 && t < budget) {
    ++t;
    if (w.step(rng, lazy)) visit(idx(w));
  }
  res.steps = t;
  res.covered = (remaining == 0);
  return res;
}

inline CoverResult run_until_cover(const TorusSpec& spec, Rng& rng, bool lazy,
                                   std::int64_t budget = (std::int64_t{1} << 62),
                                   bool record_hits = false) {
  Torus3Walk w(spec);
  return run_until_cover_impl(w, spec.vertices(),
                              [](const Torus3Walk& x) { return x.index(); }, rng,
                              lazy, budget, record_hits);
}

inline CoverResult run_until_cover_torus2(int n, Rng& rng, bool lazy,
                                          std::int64_t budget = (std::int64_t{1} << 62),
                                          bool record_hits = false) {
  Torus2Walk w(n);
  return run_until_cover_impl(w, std::int64_t(n) * n,
                              [](const Torus2Walk& x) { return x.index(); }, rng,
                              lazy, budget, record_hits);
}

inline CoverResult run_until_cover_graph(const Graph& g, vid start, Rng& rng,
                                         bool lazy,
                                         std::int64_t budget = (std::int64_t{1} << 62),
                                         bool record_hits = false) {
  GraphWalk w(g, start);
  return run_until_cover_impl(w, g.nv, [](const GraphWalk& x) { return x.v; },
                              rng, lazy, budget, record_hits);
}

// visited-set bitmap after a fixed number of steps (for uncovered-set work)
inline std::vector<std::uint64_t> visited_bitmap(const TorusSpec& spec,
                                                 std::int64_t steps, bool lazy,
                                                 Rng& rng) {
  Torus3Walk w(spec);
  std::vector<std::uint64_t> visited((spec.vertices() + 63) / 64, 0);
  auto mark = [&](vid v) { visited[v >> 6] |= 1ULL << (v & 63); };
  mark(w.index());
  for (std::int64_t t = 0; t < steps; ++t)
    if (w.step(rng, lazy)) mark(w.index());
  return visited;
}

// first passage time to `target`, or nullopt if the budget runs out
inline std::optional<std::int64_t> hitting_time(const TorusSpec& spec, vid start,
                                                vid target, Rng& rng, bool lazy,
                                                std::int64_t budget) {
  int sx, sy, sz;
  spec.coords(start, sx, sy, sz);
  Torus3Walk w(spec, sx, sy, sz);
  if (start == target) return 0;
  for (std::int64_t t = 1; t <= budget; ++t) {
    w.step(rng, lazy);
    if (w.index() == target) return t;
  }
  return std::nullopt;
}

inline std::optional<std::int64_t> hitting_time_graph(const Graph& g, vid start,
                                                      vid target, Rng& rng,
                                                      bool lazy,
                                                      std::int64_t budget) {
  GraphWalk w(g, start);
  if (start == target) return 0;
  for (std::int64_t t = 1; t <= budget; ++t) {
    w.step(rng, lazy);
    if (w.v == target) return t;
  }
  return std::nullopt;
}

// number of distinct vertices seen by each checkpoint time (lazy steps count)
inline std::vector<std::int64_t> visited_count_curve(const Graph& g, vid start,
                                                     bool lazy, Rng& rng,
                                                     const std::vector<std::int64_t>& checkpoints) {
  GraphWalk w(g, start);
  std::vector<std::uint64_t> visited((g.nv + 63) / 64, 0);
  std::int64_t seen = 0;
  auto visit = [&](vid v) {
    std::uint64_t m = 1ULL << (v & 63);
    if (!(visited[v >> 6] & m)) {
      visited[v >> 6] |= m;
      ++seen;
    }
  };
  visit(start);
  std::vector<std::int64_t> out;
  out.reserve(checkpoints.size());
  std::int64_t t = 0;
  std::size_t ci = 0;
  while (ci < checkpoints.size()) {
    if (t == checkpoints[ci]) {
      out.push_back(seen);
      ++ci;
      continue;
    }
    ++t;
    if (w.step(rng, lazy)) visit(w.v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Escape probability of the simple random walk on Z^3, extrapolated over an
// increasing radius schedule. A trial walks from the origin until it either
// revisits the origin or crosses the largest radius; the per-radius escape
// frequencies are Richardson-extrapolated in 1/rho to rho = infinity, which
// kills the O(1/rho) truncation bias. r3 = 1/(6q).
// ---------------------------------------------------------------------------
struct QR3Result {
  double q = 0, se_q = 0;
  double r3 = 0, se_r3 = 0;
  std::vector<double> q_at_radius;  // raw escape frequencies, one per radius
  std::vector<std::int64_t> radii;
  std::int64_t trials = 0;
  double elapsed_sec = 0;
};

inline QR3Result estimate_q_r3(std::int64_t trials,
                               std::vector<std::int64_t> radii,
                               std::uint64_t seed) {
  if (radii.empty() || trials <= 0)
    throw std::invalid_argument("estimate_q_r3: need trials > 0 and at least one radius");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (radii[i] >= radii[i + 1])
      throw std::invalid_argument("estimate_q_r3: radii must be strictly increasing");

  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t k = radii.size();
  std::vector<std::int64_t> thr(k);
  for (std::size_t i = 0; i < k; ++i) thr[i] = radii[i] * radii[i];

  std::vector<std::int64_t> reached_count(k, 0);
  const std::uint64_t eid = experiment_id("r3");
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed, eid, static_cast<std::uint64_t>(trial));
    std::int64_t x = 0, y = 0, z = 0, r2 = 0;
    std::size_t reached = 0;
    while (true) {
      std::uint32_t d = static_cast<std::uint32_t>(rng.below(6));
      switch (d) {
        case 0: r2 += 2 * x + 1; ++x; break;
        case 1: r2 += -2 * x + 1; --x; break;
        case 2: r2 += 2 * y + 1; ++y; break;
        case 3: r2 += -2 * y + 1; --y; break;
        case 4: r2 += 2 * z + 1; ++z; break;
        default: r2 += -2 * z + 1; --z; break;
      }
      if (r2 >= thr[reached]) {
        while (reached < k && r2 >= thr[reached]) ++reached;
        if (reached == k) break;
      } else if (r2 == 0) {
        break;  // returned to the origin
      }
    }
    for (std::size_t i = 0; i < reached; ++i) ++reached_count[i];
  }

  QR3Result res;
  res.radii = radii;
  res.trials = trials;
  res.q_at_radius.resize(k);
  for (std::size_t i = 0; i < k; ++i)
    res.q_at_radius[i] = static_cast<double>(reached_count[i]) / static_cast<double>(trials);

  // Lagrange weights for extrapolation to 1/rho = 0
  std::vector<double> u(k), wgt(k, 1.0);
  for (std::size_t i = 0; i < k; ++i) u[i] = 1.0 / static_cast<double>(radii[i]);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) wgt[i] *= (0.0 - u[j]) / (u[i] - u[j]);
  double q = 0;
  for (std::size_t i = 0; i < k; ++i) q += wgt[i] * res.q_at_radius[i];

  // covariance of the nested escape indicators: Cov(qi, qj) = qj(1-qi)/N, j>=i
  double var = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double qi = res.q_at_radius[std::min(i, j)];
      double qj = res.q_at_radius[std::max(i, j)];
      var += wgt[i] * wgt[j] * qj * (1.0 - qi) / static_cast<double>(trials);
    }
  res.q = q;
  res.se_q = std::sqrt(std::max(0.0, var));
  res.r3 = 1.0 / (6.0 * q);
  res.se_r3 = res.se_q / (6.0 * q * q);
  res.elapsed_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace lamplab
