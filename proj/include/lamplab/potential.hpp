#pragma once
// Exact potential theory on finite graphs, all via sparse Cholesky on the
// grounded Laplacian: effective resistance, minimum-energy (electrical)
// flows, occupation flows of geometrically killed walks, Green's functions of
// stopped walks (plain and conditioned on the exit vertex), Gaussian free
// field sampling, the |E|(E max eta)^2 cover-time estimator, and the
// Sudakov–Fernique comparison harness.
//
// Unit resistors on every edge throughout. Walk conventions are non-lazy
// here; callers compare against non-lazy simulation.

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lamplab/lattice.hpp"
#include "lamplab/rng.hpp"

namespace lamplab {

using SpMat = Eigen::SparseMatrix<double>;

// undirected edge list with u < v, in CSR order
inline std::vector<std::pair<vid, vid>> edge_list(const Graph& g) {
  std::vector<std::pair<vid, vid>> edges;
  edges.reserve(static_cast<std::size_t>(g.edge_count()));
  for (vid u = 0; u < g.nv; ++u)
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i)
      if (vid v = g.nbrs[i]; u < v) edges.emplace_back(u, v);
  return edges;
}

namespace detail {
// Laplacian restricted to non-pinned vertices
inline SpMat reduced_laplacian(const Graph& g, const std::vector<int>& fidx,
                               int nfree) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(g.offsets[g.nv]) + nfree);
  for (vid u = 0; u < g.nv; ++u) {
    if (fidx[u] < 0) continue;
    trip.emplace_back(fidx[u], fidx[u], static_cast<double>(g.degree(u)));
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i)
      if (vid v = g.nbrs[i]; fidx[v] >= 0)
        trip.emplace_back(fidx[u], fidx[v], -1.0);
  }
  SpMat lap(nfree, nfree);
  lap.setFromTriplets(trip.begin(), trip.end());
  return lap;
}

inline std::vector<int> free_index(std::int64_t nv, const std::vector<vid>& pinned,
                                   int* nfree) {
  std::vector<int> fidx(nv, 0);
  for (vid v : pinned) {
    if (v < 0 || v >= nv) throw std::invalid_argument("pinned vertex out of range");
    fidx[v] = -1;
  }
  int k = 0;
  for (std::int64_t v = 0; v < nv; ++v)
    if (fidx[v] == 0) fidx[v] = k++;
  *nfree = k;
  if (k == nv) throw std::invalid_argument("at least one vertex must be pinned");
  if (k == 0) throw std::invalid_argument("every vertex is pinned");
  return fidx;
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Grounded Laplacian system: solve L phi = rhs with phi = 0 on the pinned
// set. Factorized once; every solve is residual-checked.
// ---------------------------------------------------------------------------
class PotentialSystem {
 public:
  PotentialSystem(const Graph& g, std::vector<vid> pinned, double tol = 1e-8)
      : g_(&g), pinned_(std::move(pinned)), tol_(tol) {
    fidx_ = detail::free_index(g.nv, pinned_, &nfree_);
    lap_ = detail::reduced_laplacian(g, fidx_, nfree_);
    ldlt_.compute(lap_);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error("PotentialSystem: factorization failed (disconnected input?)");
  }

  const Graph& graph() const { return *g_; }
  bool is_pinned(vid v) const { return fidx_[v] < 0; }

  // rhs over all vertices; entries at pinned vertices are ignored
  std::vector<double> solve(const std::vector<double>& rhs) const {
    Eigen::VectorXd b(nfree_);
    for (vid v = 0; v < g_->nv; ++v)
      if (fidx_[v] >= 0) b[fidx_[v]] = rhs[v];
    Eigen::VectorXd x = ldlt_.solve(b);
    double resid = (lap_ * x - b).template lpNorm<Eigen::Infinity>();
    if (!(resid <= tol_ * (1.0 + b.template lpNorm<Eigen::Infinity>())))
      throw std::runtime_error("PotentialSystem: solve residual " +
                               std::to_string(resid) + " exceeds tolerance");
    std::vector<double> full(g_->nv, 0.0);
    for (vid v = 0; v < g_->nv; ++v)
      if (fidx_[v] >= 0) full[v] = x[fidx_[v]];
    return full;
  }

  std::vector<double> solve_unit(vid u) const {
    std::vector<double> rhs(g_->nv, 0.0);
    rhs[u] = 1.0;
    return solve(rhs);
  }

 private:
  const Graph* g_;
  std::vector<vid> pinned_;
  std::vector<int> fidx_;
  int nfree_ = 0;
  SpMat lap_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  double tol_;
};

// R_eff(u,v) via a unit u->v current; any single-ground system over the same
// graph works because e_u - e_v is orthogonal to constants
inline double effective_resistance(const PotentialSystem& sys, vid u, vid v) {
  if (u == v) throw std::invalid_argument("effective_resistance: u == v");
  std::vector<double> rhs(sys.graph().nv, 0.0);
  rhs[u] = 1.0;
  rhs[v] = -1.0;
  auto phi = sys.solve(rhs);
  return phi[u] - phi[v];
}

inline double effective_resistance(const Graph& g, vid u, vid v) {
  PotentialSystem sys(g, {v});
  return sys.solve_unit(u)[u];
}

// exact all-pairs resistance maximum (small graphs)
inline double resistance_diameter(const Graph& g) {
  PotentialSystem sys(g, {0});
  std::vector<std::vector<double>> col(g.nv);
  for (vid u = 1; u < g.nv; ++u) col[u] = sys.solve_unit(u);
  auto entry = [&](vid u, vid v) { return u == 0 || v == 0 ? 0.0 : col[u][v]; };
  double best = 0.0;
  for (vid u = 0; u < g.nv; ++u)
    for (vid v = u + 1; v < g.nv; ++v)
      best = std::max(best, entry(u, u) + entry(v, v) - 2.0 * entry(u, v));
  return best;
}

// ---------------------------------------------------------------------------
// Flows. theta is stored on canonical edges (u < v) as the flow from u to v;
// divergence(v) = sum of flow out of v.
// ---------------------------------------------------------------------------
struct FlowAssignment {
  std::vector<std::pair<vid, vid>> edges;
  std::vector<double> theta;
  std::vector<double> divergence;
  double energy = 0;
};

namespace detail {
inline FlowAssignment flow_from_potential(const Graph& g,
                                          const std::vector<double>& phi,
                                          double scale) {
  FlowAssignment f;
  f.edges = edge_list(g);
  f.theta.reserve(f.edges.size());
  f.divergence.assign(g.nv, 0.0);
  for (auto [u, v] : f.edges) {
    double th = scale * (phi[u] - phi[v]);
    f.theta.push_back(th);
    f.divergence[u] += th;
    f.divergence[v] -= th;
    f.energy += th * th;
  }
  return f;
}
}  // namespace detail

// energy-minimal flow with prescribed divergence (Thomson principle); rho
// must be balanced and carry unit total flow
inline FlowAssignment min_energy_flow(const PotentialSystem& sys,
                                      const std::vector<double>& rho) {
  const Graph& g = sys.graph();
  double total = 0, mass = 0;
  for (double r : rho) {
    total += r;
    mass += std::abs(r);
  }
  if (std::abs(total) > 1e-9)
    throw std::invalid_argument("min_energy_flow: divergence not balanced");
  if (std::abs(0.5 * mass - 1.0) > 1e-9)
    throw std::invalid_argument("min_energy_flow: total flow must be 1");
  auto phi = sys.solve(rho);
  return detail::flow_from_potential(g, phi, 1.0);
}

// ---------------------------------------------------------------------------
// Geometrically killed walk from `origin`: at each step the (non-lazy) walker
// dies with probability kill_rate. With t = 1 - kill_rate,
//   ell = (D - tA)^{-1} e_origin   (ell(v) = E[visits to v] / deg(v)),
//   p_v = (1-t) deg(v) ell(v)      (the law of the death position),
// and the occupation flow theta(x->y) = t (ell(y) - ell(x)) has divergence
// p_v - 1{v = origin} and energy at most ell(origin).
// ---------------------------------------------------------------------------
struct KilledFlowResult {
  FlowAssignment flow;
  std::vector<double> ell;  // scaled occupation density
  std::vector<double> p;    // death-position law
  double ell_origin = 0;
};

inline KilledFlowResult killed_walk_flow(const Graph& g, vid origin,
                                         double kill_rate) {
  if (!(kill_rate > 0 && kill_rate < 1))
    throw std::invalid_argument("killed_walk_flow: kill_rate outside (0,1)");
  const double t = 1.0 - kill_rate;
  std::vector<Eigen::Triplet<double>> trip;
  for (vid u = 0; u < g.nv; ++u) {
    trip.emplace_back(u, u, static_cast<double>(g.degree(u)));
    for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i)
      trip.emplace_back(u, g.nbrs[i], -t);
  }
  SpMat m(g.nv, g.nv);
  m.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<SpMat> ldlt(m);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("killed_walk_flow: factorization failed");
  Eigen::VectorXd b = Eigen::VectorXd::Zero(g.nv);
  b[origin] = 1.0;
  Eigen::VectorXd ell = ldlt.solve(b);

  KilledFlowResult res;
  res.ell.assign(ell.data(), ell.data() + g.nv);
  res.p.resize(g.nv);
  for (vid v = 0; v < g.nv; ++v)
    res.p[v] = (1.0 - t) * g.degree(v) * res.ell[v];
  res.ell_origin = res.ell[origin];
  // theta(x->y) = t (ell(y) - ell(x)): potential -ell scaled by t
  std::vector<double> neg(res.ell.size());
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -res.ell[i];
  res.flow = detail::flow_from_potential(g, neg, t);
  return res;
}

// ---------------------------------------------------------------------------
// Green's function of the walk stopped on exiting `interior`:
//   G(v,x) = E_v[visits to x before the exit step].
// Conditioning on the exit vertex w is available through two independent
// routes: the harmonic-ratio identity G^w(v,x) = (h(x)/h(v)) G(v,x) with
// h(.) = P_.[exit at w], and a direct solve of the h-transformed (Doob)
// chain, which is non-symmetric and goes through sparse LU.
// ---------------------------------------------------------------------------
class StoppedGreen {
 public:
  StoppedGreen(const Graph& g, const std::vector<vid>& interior,
               double tol = 1e-8)
      : g_(&g), tol_(tol), inside_(g.nv, 0), iidx_(g.nv, -1) {
    for (vid v : interior) {
      if (v < 0 || v >= g.nv) throw std::invalid_argument("StoppedGreen: bad vertex");
      inside_[v] = 1;
    }
    for (vid v = 0; v < g.nv; ++v)
      if (inside_[v]) iidx_[v] = static_cast<int>(verts_.size()), verts_.push_back(v);
    if (verts_.empty() || verts_.size() == static_cast<std::size_t>(g.nv))
      throw std::invalid_argument("StoppedGreen: interior must be a proper nonempty subset");
    std::vector<Eigen::Triplet<double>> trip;
    for (vid u : verts_) {
      trip.emplace_back(iidx_[u], iidx_[u], static_cast<double>(g.degree(u)));
      for (std::int64_t i = g.offsets[u]; i < g.offsets[u + 1]; ++i)
        if (vid v = g.nbrs[i]; inside_[v])
          trip.emplace_back(iidx_[u], iidx_[v], -1.0);
    }
    SpMat lap(static_cast<int>(verts_.size()), static_cast<int>(verts_.size()));
    lap.setFromTriplets(trip.begin(), trip.end());
    lap_ = lap;
    ldlt_.compute(lap_);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error("StoppedGreen: factorization failed");
  }

  bool inside(vid v) const { return inside_[v]; }

  // E_v[visits to x before exit]; both strictly inside
  double green(vid v, vid x) const {
    require_inside(v);
    return green_column(x)[iidx_[v]];
  }

  // full column G(., x) over the interior ordering verts()
  Eigen::VectorXd green_column(vid x) const {
    require_inside(x);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(lap_.rows());
    b[iidx_[x]] = static_cast<double>(g_->degree(x));
    Eigen::VectorXd w = ldlt_.solve(b);
    check_resid(lap_ * w - b);
    return w;
  }

  // P_.[exit vertex = w] over the interior; w must lie outside the interior
  Eigen::VectorXd harmonic(vid w) const {
    if (inside_[w]) throw std::invalid_argument("StoppedGreen: exit vertex is interior");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(lap_.rows());
    for (std::int64_t i = g_->offsets[w]; i < g_->offsets[w + 1]; ++i)
      if (vid v = g_->nbrs[i]; inside_[v]) b[iidx_[v]] += 1.0;
    Eigen::VectorXd h = ldlt_.solve(b);
    check_resid(lap_ * h - b);
    return h;
  }

  // conditioned Green via the exit-probability ratio identity
  double conditioned_green_formula(vid v, vid x, vid w) const {
    require_inside(v);
    require_inside(x);
    Eigen::VectorXd h = harmonic(w);
    double hv = h[iidx_[v]];
    if (!(hv > 0))
      throw std::invalid_argument("StoppedGreen: start cannot reach that exit");
    return h[iidx_[x]] / hv * green(v, x);
  }

  // conditioned Green by directly solving the Doob h-transform chain
  double conditioned_green_direct(vid v, vid x, vid w) const {
    require_inside(v);
    require_inside(x);
    Eigen::VectorXd h = harmonic(w);
    const int m = static_cast<int>(verts_.size());
    std::vector<Eigen::Triplet<double>> trip;
    for (vid u : verts_) {
      trip.emplace_back(iidx_[u], iidx_[u], 1.0);
      if (!(h[iidx_[u]] > 0)) continue;  // unreachable-to-w states keep row I
      for (std::int64_t i = g_->offsets[u]; i < g_->offsets[u + 1]; ++i)
        if (vid y = g_->nbrs[i]; inside_[y])
          trip.emplace_back(iidx_[u], iidx_[y],
                            -h[iidx_[y]] / (g_->degree(u) * h[iidx_[u]]));
    }
    SpMat mat(m, m);
    mat.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(mat);
    lu.factorize(mat);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("StoppedGreen: LU factorization failed");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b[iidx_[x]] = 1.0;
    Eigen::VectorXd ghat = lu.solve(b);
    return ghat[iidx_[v]];
  }

  const std::vector<vid>& verts() const { return verts_; }
  int interior_index(vid v) const { return iidx_[v]; }

 private:
  void require_inside(vid v) const {
    if (v < 0 || v >= g_->nv || !inside_[v])
      throw std::invalid_argument("StoppedGreen: vertex not strictly inside the region");
  }
  void check_resid(const Eigen::VectorXd& r) const {
    double x = r.lpNorm<Eigen::Infinity>();
    if (!(x <= tol_))
      throw std::runtime_error("StoppedGreen: residual " + std::to_string(x));
  }
  const Graph* g_;
  double tol_;
  std::vector<char> inside_;
  std::vector<int> iidx_;
  std::vector<vid> verts_;
  SpMat lap_;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

// ---------------------------------------------------------------------------
// Gaussian free field with density prop to exp(-1/4 sum_{ordered u~v}
// (eta_u - eta_v)^2) = exp(-1/2 eta' L eta), pinned to zero on a nonempty
// set. Increments then satisfy E[(eta_u - eta_v)^2] = R_eff(u,v) with unit
// resistors. Sampling uses the sparse Cholesky factor: with P A P' = L L',
// eta_free = P' L'^{-1} z for z standard normal.
// ---------------------------------------------------------------------------
struct GFFSample {
  std::vector<double> eta;   // full vector, zeros at pinned vertices
};

class GffSystem {
 public:
  GffSystem(const Graph& g, std::vector<vid> pinned, double tol = 1e-8)
      : g_(&g), pinned_(std::move(pinned)), tol_(tol) {
    fidx_ = detail::free_index(g.nv, pinned_, &nfree_);
    lap_ = detail::reduced_laplacian(g, fidx_, nfree_);
    llt_.compute(lap_);
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("GffSystem: Cholesky failed (disconnected input?)");
  }

  const Graph& graph() const { return *g_; }
  const std::vector<vid>& pinned() const { return pinned_; }

  GFFSample sample(Rng& rng) const {
    Eigen::VectorXd z(nfree_);
    for (int i = 0; i < nfree_; ++i) z[i] = rng.normal();
    Eigen::VectorXd y = llt_.matrixU().solve(z);
    Eigen::VectorXd x = llt_.permutationPinv() * y;
    GFFSample s;
    s.eta.assign(g_->nv, 0.0);
    for (vid v = 0; v < g_->nv; ++v)
      if (fidx_[v] >= 0) s.eta[v] = x[fidx_[v]];
    return s;
  }

  // covariance E[eta_u eta_v] (zero when either vertex is pinned)
  double covariance(vid u, vid v) const {
    if (fidx_[u] < 0 || fidx_[v] < 0) return 0.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nfree_);
    b[fidx_[u]] = 1.0;
    Eigen::VectorXd x = llt_.solve(b);
    double resid = (lap_ * x - b).lpNorm<Eigen::Infinity>();
    if (!(resid <= tol_))
      throw std::runtime_error("GffSystem: solve residual " + std::to_string(resid));
    return x[fidx_[v]];
  }

  double increment_var(vid u, vid v) const {
    return covariance(u, u) + covariance(v, v) - 2.0 * covariance(u, v);
  }

 private:
  const Graph* g_;
  std::vector<vid> pinned_;
  std::vector<int> fidx_;
  int nfree_ = 0;
  SpMat lap_;
  Eigen::SimplicialLLT<SpMat> llt_;
  double tol_;
};

// ---------------------------------------------------------------------------
// Cover-time estimator |E| (E max_v eta_v)^2 from GFF samples, with a
// delta-method standard error.
// ---------------------------------------------------------------------------
struct DingEstimate {
  double estimate = 0, se = 0;
  double mean_max = 0, se_mean = 0;
  std::int64_t samples = 0;
};

inline DingEstimate ding_cover_estimate(const GffSystem& sys, std::int64_t samples,
                                        Rng& rng) {
  if (samples < 2) throw std::invalid_argument("ding_cover_estimate: samples < 2");
  double sum = 0, sum2 = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    GFFSample s = sys.sample(rng);
    double mx = *std::max_element(s.eta.begin(), s.eta.end());
    sum += mx;
    sum2 += mx * mx;
  }
  DingEstimate d;
  d.samples = samples;
  double n = static_cast<double>(samples);
  d.mean_max = sum / n;
  double var = std::max(0.0, (sum2 - n * d.mean_max * d.mean_max) / (n - 1.0));
  d.se_mean = std::sqrt(var / n);
  double edges = static_cast<double>(sys.graph().edge_count());
  d.estimate = edges * d.mean_max * d.mean_max;
  d.se = edges * 2.0 * std::abs(d.mean_max) * d.se_mean;
  return d;
}

// ---------------------------------------------------------------------------
// Sudakov–Fernique comparison: with E[(eta_i - eta_j)^2] >= E[(xi_i - xi_j)^2]
// on a common index set, E[max eta] >= E[max xi]. The index set is given as
// pairs (vertex in the eta system, vertex in the xi system); xi is scaled by
// `xi_scale` before comparison. Domination is verified exactly (solves), the
// max gap estimated by sampling.
// ---------------------------------------------------------------------------
struct SudakovReport {
  double min_domination_slack = 0;  // min over pairs of Var-increment gap
  double e_max_eta = 0, e_max_xi = 0;
  double gap = 0, se = 0;
  bool violated = false;  // gap < -3 se
};

inline SudakovReport sudakov_check(const GffSystem& eta_sys,
                                   const GffSystem& xi_sys,
                                   const std::vector<std::pair<vid, vid>>& mapping,
                                   double xi_scale, std::int64_t samples,
                                   Rng& rng) {
  if (mapping.size() < 2) throw std::invalid_argument("sudakov_check: need >= 2 indices");
  {
    std::vector<vid> a, b;
    for (auto [u, v] : mapping) a.push_back(u), b.push_back(v);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (std::adjacent_find(a.begin(), a.end()) != a.end() ||
        std::adjacent_find(b.begin(), b.end()) != b.end())
      throw std::invalid_argument("sudakov_check: mapping not injective");
  }
  SudakovReport rep;
  rep.min_domination_slack = std::numeric_limits<double>::infinity();
  const double c2 = xi_scale * xi_scale;
  for (std::size_t i = 0; i < mapping.size(); ++i)
    for (std::size_t j = i + 1; j < mapping.size(); ++j) {
      double ve = eta_sys.increment_var(mapping[i].first, mapping[j].first);
      double vx = c2 * xi_sys.increment_var(mapping[i].second, mapping[j].second);
      rep.min_domination_slack = std::min(rep.min_domination_slack, ve - vx);
    }
  if (rep.min_domination_slack < -1e-9)
    throw std::invalid_argument(
        "sudakov_check: increment domination fails by " +
        std::to_string(-rep.min_domination_slack));

  double se_sum = 0, se_sum2 = 0, sx_sum = 0, sx_sum2 = 0;
  for (std::int64_t k = 0; k < samples; ++k) {
    GFFSample se_ = eta_sys.sample(rng);
    GFFSample sx_ = xi_sys.sample(rng);
    double me = -std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    for (auto [u, v] : mapping) {
      me = std::max(me, se_.eta[u]);
      mx = std::max(mx, xi_scale * sx_.eta[v]);
    }
    se_sum += me;
    se_sum2 += me * me;
    sx_sum += mx;
    sx_sum2 += mx * mx;
  }
  double n = static_cast<double>(samples);
  rep.e_max_eta = se_sum / n;
  rep.e_max_xi = sx_sum / n;
  double var_e = std::max(0.0, (se_sum2 - n * rep.e_max_eta * rep.e_max_eta) / (n - 1.0));
  double var_x = std::max(0.0, (sx_sum2 - n * rep.e_max_xi * rep.e_max_xi) / (n - 1.0));
  rep.gap = rep.e_max_eta - rep.e_max_xi;
  rep.se = std::sqrt((var_e + var_x) / n);
  rep.violated = rep.gap < -3.0 * rep.se;
  return rep;
}

}  // namespace lamplab
