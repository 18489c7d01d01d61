#pragma once
// Finite lattices: the thin torus Z_n x Z_n x Z_h, plus the small zoo of
// graphs (cycles, 2D tori, boxes, complete graphs) the oracles need.
// Vertices are packed as idx = (x*n + y)*h + z.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace lamplab {

using vid = std::int32_t;

struct TorusSpec {
  int n = 0;
  int h = 0;
  double a = 0.0;  // aspect parameter; h = floor(a * ln n) when derived

  static TorusSpec from_a(int n, double a) {
    TorusSpec s;
    s.n = n;
    s.a = a;
    s.h = static_cast<int>(std::floor(a * std::log(static_cast<double>(n))));
    s.validate();
    return s;
  }
  static TorusSpec from_h(int n, int h) {
    TorusSpec s;
    s.n = n;
    s.h = h;
    s.a = static_cast<double>(h) / std::log(static_cast<double>(n));
    s.validate();
    return s;
  }
  void validate() const {
    if (n < 3) throw std::invalid_argument("TorusSpec: n must be >= 3, got " + std::to_string(n));
    if (h < 3) throw std::invalid_argument("TorusSpec: h must be >= 3, got " + std::to_string(h));
  }

  std::int64_t vertices() const { return std::int64_t(n) * n * h; }
  std::int64_t edges() const { return 3 * vertices(); }  // 6-regular

  vid index(int x, int y, int z) const {
    return static_cast<vid>((std::int64_t(x) * n + y) * h + z);
  }
  void coords(vid v, int& x, int& y, int& z) const {
    z = static_cast<int>(v % h);
    std::int64_t w = v / h;
    y = static_cast<int>(w % n);
    x = static_cast<int>(w / n);
  }
};

inline int wrap_delta(int d, int n) {
  d = std::abs(d) % n;
  return std::min(d, n - d);
}

// squared 2D torus distance between columns
inline std::int64_t dist2_2d(int x0, int y0, int x1, int y1, int n) {
  std::int64_t dx = wrap_delta(x0 - x1, n);
  std::int64_t dy = wrap_delta(y0 - y1, n);
  return dx * dx + dy * dy;
}

inline std::int64_t dist2_3d(const TorusSpec& t, int x0, int y0, int z0, int x1,
                             int y1, int z1) {
  std::int64_t dz = wrap_delta(z0 - z1, t.h);
  return dist2_2d(x0, y0, x1, y1, t.n) + dz * dz;
}

// ---------------------------------------------------------------------------
// Generic immutable graph (CSR). Used by the potential-theory solvers; the
// walk engine steps tori arithmetically and never touches this.
// ---------------------------------------------------------------------------
struct Graph {
  std::int64_t nv = 0;
  std::vector<std::int64_t> offsets;  // size nv+1
  std::vector<vid> nbrs;              // sorted within each row

  int degree(vid v) const { return static_cast<int>(offsets[v + 1] - offsets[v]); }
  bool adjacent(vid u, vid v) const {
    auto b = nbrs.begin() + offsets[u], e = nbrs.begin() + offsets[u + 1];
    return std::binary_search(b, e, v);
  }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(nbrs.size()) / 2; }

  // copy with one undirected edge removed (Rayleigh monotonicity checks)
  Graph without_edge(vid u, vid v) const {
    if (!adjacent(u, v)) throw std::invalid_argument("without_edge: not an edge");
    Graph g;
    g.nv = nv;
    g.offsets.assign(nv + 1, 0);
    g.nbrs.reserve(nbrs.size() - 2);
    for (vid w = 0; w < nv; ++w) {
      for (auto i = offsets[w]; i < offsets[w + 1]; ++i) {
        vid x = nbrs[i];
        if ((w == u && x == v) || (w == v && x == u)) continue;
        g.nbrs.push_back(x);
      }
      g.offsets[w + 1] = static_cast<std::int64_t>(g.nbrs.size());
    }
    return g;
  }
};

namespace detail {
inline Graph from_adj(std::vector<std::vector<vid>> adj) {
  Graph g;
  g.nv = static_cast<std::int64_t>(adj.size());
  g.offsets.assign(g.nv + 1, 0);
  for (std::int64_t v = 0; v < g.nv; ++v) {
    auto& row = adj[v];
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end())
      throw std::logic_error("graph builder produced a parallel edge");
    g.offsets[v + 1] = g.offsets[v] + static_cast<std::int64_t>(row.size());
  }
  g.nbrs.reserve(g.offsets[g.nv]);
  for (auto& row : adj)
    for (vid x : row) g.nbrs.push_back(x);
  return g;
}
}  // namespace detail

inline Graph build_torus(const TorusSpec& t) {
  t.validate();
  std::vector<std::vector<vid>> adj(t.vertices());
  for (int x = 0; x < t.n; ++x)
    for (int y = 0; y < t.n; ++y)
      for (int z = 0; z < t.h; ++z) {
        auto& row = adj[t.index(x, y, z)];
        row = {t.index((x + 1) % t.n, y, z), t.index((x + t.n - 1) % t.n, y, z),
               t.index(x, (y + 1) % t.n, z), t.index(x, (y + t.n - 1) % t.n, z),
               t.index(x, y, (z + 1) % t.h), t.index(x, y, (z + t.h - 1) % t.h)};
      }
  return detail::from_adj(std::move(adj));
}

inline Graph build_torus2(int n) {
  if (n < 3) throw std::invalid_argument("build_torus2: n must be >= 3");
  std::vector<std::vector<vid>> adj(std::int64_t(n) * n);
  auto id = [n](int x, int y) { return static_cast<vid>(std::int64_t(x) * n + y); };
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      adj[id(x, y)] = {id((x + 1) % n, y), id((x + n - 1) % n, y),
                       id(x, (y + 1) % n), id(x, (y + n - 1) % n)};
  return detail::from_adj(std::move(adj));
}

inline Graph build_cycle(int n) {
  if (n < 3) throw std::invalid_argument("build_cycle: n must be >= 3");
  std::vector<std::vector<vid>> adj(n);
  for (int x = 0; x < n; ++x)
    adj[x] = {static_cast<vid>((x + 1) % n), static_cast<vid>((x + n - 1) % n)};
  return detail::from_adj(std::move(adj));
}

inline Graph build_complete(int m) {
  if (m < 2) throw std::invalid_argument("build_complete: m must be >= 2");
  std::vector<std::vector<vid>> adj(m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      if (x != y) adj[x].push_back(static_cast<vid>(y));
  return detail::from_adj(std::move(adj));
}

// w x h grid with open (free) boundary; boundary set = outermost frame
inline Graph build_box2(int w, int h) {
  if (w < 2 || h < 2) throw std::invalid_argument("build_box2: sides must be >= 2");
  std::vector<std::vector<vid>> adj(std::int64_t(w) * h);
  auto id = [h](int x, int y) { return static_cast<vid>(std::int64_t(x) * h + y); };
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y) {
      auto& row = adj[id(x, y)];
      if (x + 1 < w) row.push_back(id(x + 1, y));
      if (x > 0) row.push_back(id(x - 1, y));
      if (y + 1 < h) row.push_back(id(x, y + 1));
      if (y > 0) row.push_back(id(x, y - 1));
    }
  return detail::from_adj(std::move(adj));
}

inline std::vector<vid> box2_boundary(int w, int h) {
  std::vector<vid> b;
  auto id = [h](int x, int y) { return static_cast<vid>(std::int64_t(x) * h + y); };
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y)
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) b.push_back(id(x, y));
  return b;
}

// Half-lazy kernel: P(x,x) = 1/2, P(x,y) = 1/(2 deg x) on edges, else 0.
inline double lazy_kernel(const Graph& g, vid u, vid v) {
  if (u == v) return 0.5;
  if (g.adjacent(u, v)) return 0.5 / g.degree(u);
  return 0.0;
}

// ---------------------------------------------------------------------------
// Regions. Balls use the full 3D wrap metric (vertical wrap is legitimate on
// the torus); cylinders are 2D disks swept over the whole height and must not
// wrap, hence r_out < n/2. r_in < 0 means solid (no inner hole removed);
// annulus membership is r_in < d <= r_out.
// ---------------------------------------------------------------------------
enum class RegionKind { Ball, Cylinder };

struct Region {
  RegionKind kind = RegionKind::Cylinder;
  int cx = 0, cy = 0, cz = 0;
  double r_in = -1.0;
  double r_out = 0.0;

  void validate(const TorusSpec& t) const {
    if (r_out <= 0) throw std::invalid_argument("Region: outer radius must be positive");
    if (r_in >= r_out) throw std::invalid_argument("Region: inner radius must be < outer");
    if (kind == RegionKind::Cylinder && 2.0 * r_out >= t.n)
      throw std::invalid_argument("Region: cylinder of radius " + std::to_string(r_out) +
                                  " wraps around n = " + std::to_string(t.n));
    if (kind == RegionKind::Ball && 2.0 * r_out >= t.n)
      throw std::invalid_argument("Region: ball of radius " + std::to_string(r_out) +
                                  " wraps around n = " + std::to_string(t.n));
  }

  bool contains(const TorusSpec& t, int x, int y, int z) const {
    double d2 = (kind == RegionKind::Cylinder)
                    ? static_cast<double>(dist2_2d(cx, cy, x, y, t.n))
                    : static_cast<double>(dist2_3d(t, cx, cy, cz, x, y, z));
    if (d2 > r_out * r_out) return false;
    return r_in < 0 || d2 > r_in * r_in;
  }
};

inline std::vector<vid> region_members(const TorusSpec& t, const Region& reg) {
  reg.validate(t);
  std::vector<vid> out;
  // scan only the bounding box of the region
  int rr = static_cast<int>(std::floor(reg.r_out));
  for (int dx = -rr; dx <= rr; ++dx)
    for (int dy = -rr; dy <= rr; ++dy) {
      int x = ((reg.cx + dx) % t.n + t.n) % t.n;
      int y = ((reg.cy + dy) % t.n + t.n) % t.n;
      if (reg.kind == RegionKind::Cylinder) {
        double d2 = static_cast<double>(dist2_2d(reg.cx, reg.cy, x, y, t.n));
        if (d2 > reg.r_out * reg.r_out || (reg.r_in >= 0 && d2 <= reg.r_in * reg.r_in))
          continue;
        for (int z = 0; z < t.h; ++z) out.push_back(t.index(x, y, z));
      } else {
        for (int z = 0; z < t.h; ++z)
          if (reg.contains(t, x, y, z)) out.push_back(t.index(x, y, z));
      }
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// 2D column positions at pairwise torus distance >= spacing (greedy grid)
inline std::vector<std::pair<int, int>> separated_centers_2d(int n, int spacing) {
  if (spacing <= 0) throw std::invalid_argument("separated_centers_2d: spacing must be > 0");
  int k = n / spacing;
  if (k == 0) return {};
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.emplace_back(i * spacing, j * spacing);
  return out;
}

// ---------------------------------------------------------------------------
// Nested excursion scales. Level k hands the walk an annulus between the
// mid radius R'_k and the outer radius R_k; R''_k is the spacing scale of the
// centers. Ball scales r' and r = M r' live inside the level-0 cylinders.
// Geometry:  R''_0 = h, R'_k = M R''_k, R_k = M R'_k,
//            R''_k = n^{k/L} h for 0 < k < L, and the top level is anchored
//            at R_L = n / M^3. All radii may be fractional.
// ---------------------------------------------------------------------------
struct RadiiLevel {
  double rpp = 0, rp = 0, r = 0;  // R'' <= R' <= R
};

struct RadiiSchedule {
  int n = 0, h = 0, M = 0, L = 0;
  double r_ball_in = 0, r_ball = 0;  // r' = M, r = M^2
  std::vector<RadiiLevel> levels;    // size L+1

  void validate() const {
    if (M < 2) throw std::invalid_argument("RadiiSchedule: M must be >= 2");
    if (L < 1) throw std::invalid_argument("RadiiSchedule: L must be >= 1");
    if (r_ball > h)
      throw std::invalid_argument("RadiiSchedule: ball radius r = M^2 = " +
                                  std::to_string(r_ball) + " exceeds h = " + std::to_string(h));
    for (const auto& lv : levels)
      if (!(lv.rpp < lv.rp && lv.rp < lv.r))
        throw std::invalid_argument("RadiiSchedule: radii within a level must increase");
    for (std::size_t k = 0; k + 1 < levels.size(); ++k)
      if (levels[k].r > levels[k + 1].rpp)
        throw std::invalid_argument("RadiiSchedule: level " + std::to_string(k) +
                                    " overlaps level " + std::to_string(k + 1));
    if (2.0 * levels.back().r >= n)
      throw std::invalid_argument("RadiiSchedule: top radius wraps around the torus");
  }
};

inline RadiiSchedule make_radii_schedule(int n, int h, int M, int L) {
  RadiiSchedule s;
  s.n = n;
  s.h = h;
  s.M = M;
  s.L = L;
  s.r_ball_in = M;
  s.r_ball = static_cast<double>(M) * M;
  s.levels.resize(L + 1);
  for (int k = 0; k < L; ++k) {
    double rpp = (k == 0) ? h : std::pow(n, static_cast<double>(k) / L) * h;
    s.levels[k] = {rpp, M * rpp, static_cast<double>(M) * M * rpp};
  }
  double top = static_cast<double>(n) / (static_cast<double>(M) * M * M);
  s.levels[L] = {top / (static_cast<double>(M) * M), top / M, top};
  s.validate();
  return s;
}

}  // namespace lamplab
