#pragma once
// Mixing-time measurement for the lamplighter chain: exact total-variation
// curves on tiny bases (full state-space matrix iteration), an exact expected
// cover-time oracle (absorbing-chain dynamic program), Monte Carlo TV lower
// bounds from witness statistics, the exponential-moment mixing certificate
// E[2^(|uncovered ∩ uncovered'|)], and the cutoff-profile scan over (a, n, s).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamplab/asymptotics.hpp"
#include "lamplab/excursion.hpp"
#include "lamplab/lattice.hpp"
#include "lamplab/walk.hpp"

namespace lamplab {

inline constexpr double kMixDelta = 1.0 / (2.0 * 2.718281828459045235);

struct TVCurve {
  std::vector<std::int64_t> times;
  std::vector<double> tv;
  std::string method;  // exact | witness_lower | certificate_upper
};

// both standard TV expressions; they agree to rounding and the pair is kept
// so tests can assert that
inline std::pair<double, double> tv_distance_both(const std::vector<double>& mu,
                                                  const std::vector<double>& pi) {
  double l1 = 0, sup = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    double d = mu[i] - pi[i];
    l1 += std::abs(d);
    if (d > 0) sup += d;
  }
  return {0.5 * l1, sup};
}

// ---------------------------------------------------------------------------
// Exact lamplighter distribution on a tiny base graph. State index =
// pos * 2^|V| + lampmask. One transition: hold w.p. 1/2 (lamps frozen);
// otherwise move to a uniform neighbor and re-randomize the lamps at the
// departure and arrival vertices (4 equally likely bit pairs).
// ---------------------------------------------------------------------------
class ExactLamplighter {
 public:
  explicit ExactLamplighter(const Graph& g) : g_(&g), nv_(static_cast<int>(g.nv)) {
    double states = std::ldexp(static_cast<double>(nv_), nv_);
    if (states > 1e6)
      throw std::invalid_argument(
          "ExactLamplighter: state space " + std::to_string(states) +
          " exceeds 1e6; use Monte Carlo bounds instead");
    nstates_ = static_cast<std::int64_t>(nv_) << nv_;
  }

  std::int64_t states() const { return nstates_; }
  std::int64_t state_of(vid pos, std::uint64_t mask) const {
    return (static_cast<std::int64_t>(pos) << nv_) | static_cast<std::int64_t>(mask);
  }

  std::vector<double> point_mass(vid pos, std::uint64_t mask) const {
    std::vector<double> mu(nstates_, 0.0);
    mu[state_of(pos, mask)] = 1.0;
    return mu;
  }

  // product law: lazy-walk stationary (prop. to degree) x uniform lamps
  std::vector<double> stationary() const {
    std::vector<double> pi(nstates_, 0.0);
    double edges2 = 2.0 * static_cast<double>(g_->edge_count());
    double lamp = std::ldexp(1.0, -nv_);
    for (vid p = 0; p < nv_; ++p) {
      double w = g_->degree(p) / edges2 * lamp;
      for (std::uint64_t m = 0; m < (1ULL << nv_); ++m) pi[state_of(p, m)] = w;
    }
    return pi;
  }

  std::vector<double> step(const std::vector<double>& mu) const {
    std::vector<double> out(nstates_, 0.0);
    for (vid p = 0; p < nv_; ++p) {
      const int d = g_->degree(p);
      const double move = 1.0 / (8.0 * d);
      for (std::uint64_t m = 0; m < (1ULL << nv_); ++m) {
        double mass = mu[state_of(p, m)];
        if (mass == 0.0) continue;
        out[state_of(p, m)] += 0.5 * mass;
        for (std::int64_t i = g_->offsets[p]; i < g_->offsets[p + 1]; ++i) {
          vid y = g_->nbrs[i];
          std::uint64_t base = m & ~((1ULL << p) | (1ULL << y));
          for (int bits = 0; bits < 4; ++bits) {
            std::uint64_t mm = base | (static_cast<std::uint64_t>(bits & 1) << p) |
                               (static_cast<std::uint64_t>(bits >> 1) << y);
            out[state_of(y, mm)] += move * mass;
          }
        }
      }
    }
    return out;
  }

 private:
  const Graph* g_;
  int nv_;
  std::int64_t nstates_ = 0;
};

struct ExactTVResult {
  TVCurve curve;           // pointwise max over the candidate starts
  std::int64_t t_mix = -1; // first crossing of delta (-1 if not within horizon)
  double delta = kMixDelta;
};

namespace detail {
inline ExactTVResult exact_tv_from_starts(
    const ExactLamplighter&ex, const Graph& g,
    const std::vector<std::pair<vid, std::uint64_t>>& starts,
    std::int64_t horizon, double delta) {
  ExactTVResult res;
  res.delta = delta;
  res.curve.method = "exact";
  std::vector<double> pi = ex.stationary();
  std::vector<std::vector<double>> mus;
  mus.reserve(starts.size());
  for (auto [p, m] : starts) mus.push_back(ex.point_mass(p, m));
  for (std::int64_t t = 0; t <= horizon; ++t) {
    if (t > 0)
      for (auto& mu : mus) mu = ex.step(mu);
    double worst = 0;
    for (const auto& mu : mus)
      worst = std::max(worst, tv_distance_both(mu, pi).first);
    res.curve.times.push_back(t);
    res.curve.tv.push_back(worst);
    if (res.t_mix < 0 && worst <= delta) res.t_mix = t;
  }
  return res;
}
}  // namespace detail

// worst start taken over (all lamps off, every position); on vertex-transitive
// bases each position gives the same curve
inline ExactTVResult exact_tv_curve(const Graph& g, std::int64_t horizon,
                                    double delta = kMixDelta) {
  ExactLamplighter ex(g);
  std::vector<std::pair<vid, std::uint64_t>> starts;
  for (vid p = 0; p < g.nv; ++p) starts.emplace_back(p, 0);
  return detail::exact_tv_from_starts(ex, g, starts, horizon, delta);
}

// exhaustive variant over every (position, lamp mask) start — only for the
// smallest bases, to validate that all-off starts are worst
inline ExactTVResult exact_tv_curve_all_starts(const Graph& g,
                                               std::int64_t horizon,
                                               double delta = kMixDelta) {
  ExactLamplighter ex(g);
  std::vector<std::pair<vid, std::uint64_t>> starts;
  for (vid p = 0; p < g.nv; ++p)
    for (std::uint64_t m = 0; m < (1ULL << g.nv); ++m) starts.emplace_back(p, m);
  return detail::exact_tv_from_starts(ex, g, starts, horizon, delta);
}

// ---------------------------------------------------------------------------
// Exact expected cover time of the (lazy or non-lazy) SRW on a tiny graph:
// dynamic program over (visited mask, position) with a dense solve per mask,
// masks processed by decreasing popcount. The lazy value is exactly twice the
// non-lazy one (holding times are independent Geometric(1/2)).
// ---------------------------------------------------------------------------
inline double exact_cover_time(const Graph& g, vid start, bool lazy) {
  const int nv = static_cast<int>(g.nv);
  if (nv > 16) throw std::invalid_argument("exact_cover_time: graph too large");
  const std::uint64_t full = (1ULL << nv) - 1;
  std::vector<std::vector<double>> e(1ULL << nv);
  std::vector<std::uint64_t> order;
  order.reserve(1ULL << nv);
  for (std::uint64_t m = 1; m <= full; ++m)
    if (m & full) order.push_back(m);
  std::sort(order.begin(), order.end(), [](std::uint64_t a, std::uint64_t b) {
    return __builtin_popcountll(a) > __builtin_popcountll(b);
  });

  for (std::uint64_t mask : order) {
    e[mask].assign(nv, 0.0);
    if (mask == full) continue;
    std::vector<int> members;
    for (int p = 0; p < nv; ++p)
      if (mask >> p & 1) members.push_back(p);
    const int k = static_cast<int>(members.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(k);
    for (int i = 0; i < k; ++i) {
      int p = members[i];
      int d = g.degree(p);
      double hold = lazy ? 0.5 : 0.0;
      double mv = lazy ? 1.0 / (2.0 * d) : 1.0 / d;
      A(i, i) = 1.0 - hold;
      for (std::int64_t j = g.offsets[p]; j < g.offsets[p + 1]; ++j) {
        int y = g.nbrs[j];
        if (mask >> y & 1) {
          int yi = static_cast<int>(std::lower_bound(members.begin(), members.end(), y) -
                                    members.begin());
          A(i, yi) -= mv;
        } else {
          b[i] += mv * e[mask | (1ULL << y)][y];
        }
      }
    }
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    for (int i = 0; i < k; ++i) e[mask][members[i]] = x[i];
  }
  return e[1ULL << start][start];
}

// ---------------------------------------------------------------------------
// Monte Carlo TV lower bound from a witness statistic: sample the statistic
// under the chain at time t (all lamps off, walker at `start`) and under
// stationarity, then scan threshold events. The reported bound subtracts 3
// binomial standard errors, so it is a conservative, valid lower bound.
// ---------------------------------------------------------------------------
struct WitnessBound {
  double bound = 0;        // max_c |F1(c) - F2(c)| - 3 SE, clamped to [0,1]
  double raw_gap = 0;      // the same maximum before the SE haircut
  double se = 0;           // SE at the maximizing threshold
  double threshold = 0;
  std::int64_t trials = 0;
  bool undersampled = false;  // SE > 0.05 at the maximizing threshold
};

namespace detail {
inline WitnessBound witness_bound_from_samples(std::vector<double>& s_chain,
                                               std::vector<double>& s_stat) {
  WitnessBound wb;
  wb.trials = static_cast<std::int64_t>(s_chain.size());
  std::vector<double> thresholds = s_chain;
  thresholds.insert(thresholds.end(), s_stat.begin(), s_stat.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  std::sort(s_chain.begin(), s_chain.end());
  std::sort(s_stat.begin(), s_stat.end());
  const double n1 = static_cast<double>(s_chain.size());
  const double n2 = static_cast<double>(s_stat.size());
  double best_score = -std::numeric_limits<double>::infinity();
  for (double c : thresholds) {
    auto tail = [c](const std::vector<double>& v) {
      return static_cast<double>(v.end() -
                                 std::lower_bound(v.begin(), v.end(), c));
    };
    double p1 = tail(s_chain) / n1, p2 = tail(s_stat) / n2;
    double se = std::sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2);
    double gap = std::abs(p1 - p2);
    if (gap - 3.0 * se > best_score) {
      best_score = gap - 3.0 * se;
      wb.raw_gap = gap;
      wb.se = se;
      wb.threshold = c;
    }
  }
  wb.bound = std::clamp(best_score, 0.0, 1.0);
  wb.undersampled = wb.se > 0.05;
  return wb;
}

inline vid sample_degree_weighted(const Graph& g, Rng& rng) {
  std::uint64_t r = rng.below(static_cast<std::uint64_t>(2 * g.edge_count()));
  // offsets are exactly the cumulative degrees
  auto it = std::upper_bound(g.offsets.begin() + 1, g.offsets.end(),
                             static_cast<std::int64_t>(r));
  return static_cast<vid>(it - (g.offsets.begin() + 1));
}
}  // namespace detail

// statistic signature: (lamps, walker position) -> real
using WitnessStat = std::function<double(const LampState&, vid)>;

inline WitnessStat on_count_statistic() {
  return [](const LampState& l, vid) { return static_cast<double>(l.count_on()); };
}

inline WitnessStat discrepancy_statistic(const WitnessRegions* regions) {
  return [regions](const LampState& l, vid) { return regions->u_statistic(l); };
}

inline WitnessBound witness_tv_lower(const Graph& g, std::int64_t t,
                                     const WitnessStat& stat, std::int64_t trials,
                                     std::uint64_t seed, vid start = 0) {
  std::vector<double> s_chain, s_stat;
  s_chain.reserve(trials);
  s_stat.reserve(trials);
  const std::uint64_t eid_c = experiment_id("witness-chain");
  const std::uint64_t eid_s = experiment_id("witness-stationary");
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed, eid_c, static_cast<std::uint64_t>(trial));
    GraphWalk w(g, start);
    LampState lamps(g.nv);
    for (std::int64_t k = 0; k < t; ++k) step_lamplighter(w, lamps, rng);
    s_chain.push_back(stat(lamps, w.v));

    Rng rng2(seed, eid_s, static_cast<std::uint64_t>(trial));
    LampState stat_lamps(g.nv);
    stat_lamps.randomize(rng2);
    vid pos = detail::sample_degree_weighted(g, rng2);
    s_stat.push_back(stat(stat_lamps, pos));
  }
  return detail::witness_bound_from_samples(s_chain, s_stat);
}

// ---------------------------------------------------------------------------
// Exponential-moment certificate: over independent lazy walk pairs run to
// time s * t_box, average 2^(number of vertices covered by neither walk).
// Values near 1 certify lamplighter mixing at that time. Exponents are
// capped; the cap-hit frequency is part of the result.
// ---------------------------------------------------------------------------
struct CertificatePoint {
  double s = 0;
  std::int64_t steps = 0;
  double mean = 0, se = 0;
  double cap_hit_frac = 0;
  double mean_exponent = 0;  // average |intersection|, for reporting huge values
};

struct CertificateResult {
  std::vector<CertificatePoint> points;
  double pass_threshold = 1.1;
  std::optional<double> crossing_s;  // least grid s with mean <= threshold
  int exponent_cap = 30;
};

inline CertificateResult exp_moment_certificate(const TorusSpec& spec,
                                                std::vector<double> s_grid,
                                                std::int64_t pairs,
                                                std::uint64_t seed,
                                                int exponent_cap = 30) {
  if (pairs < 2) throw std::invalid_argument("exp_moment_certificate: pairs < 2");
  std::sort(s_grid.begin(), s_grid.end());
  const double t_box = t_box_steps(spec.n, true);
  CertificateResult res;
  res.exponent_cap = exponent_cap;
  const std::int64_t nv = spec.vertices();
  const std::size_t words = static_cast<std::size_t>((nv + 63) / 64);
  std::vector<std::int64_t> checkpoints(s_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i)
    checkpoints[i] = static_cast<std::int64_t>(std::llround(s_grid[i] * t_box));

  std::vector<std::vector<double>> values(s_grid.size());
  std::vector<std::int64_t> caphits(s_grid.size(), 0);
  std::vector<double> expsum(s_grid.size(), 0.0);
  const std::uint64_t eid = experiment_id("certificate");
  for (std::int64_t pair = 0; pair < pairs; ++pair) {
    Rng r1(seed, eid, static_cast<std::uint64_t>(2 * pair));
    Rng r2(seed, eid, static_cast<std::uint64_t>(2 * pair + 1));
    Torus3Walk w1(spec), w2(spec);
    std::vector<std::uint64_t> v1(words, 0), v2(words, 0);
    auto mark = [](std::vector<std::uint64_t>& bm, vid v) {
      bm[v >> 6] |= 1ULL << (v & 63);
    };
    mark(v1, w1.index());
    mark(v2, w2.index());
    std::int64_t t = 0;
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
      for (; t < checkpoints[i]; ++t) {
        if (w1.step(r1, true)) mark(v1, w1.index());
        if (w2.step(r2, true)) mark(v2, w2.index());
      }
      std::int64_t joint = 0;
      for (std::size_t k = 0; k < words; ++k)
        joint += __builtin_popcountll(v1[k] | v2[k]);
      std::int64_t inter = nv - joint;  // covered by neither walk
      expsum[i] += static_cast<double>(inter);
      if (inter > exponent_cap) {
        ++caphits[i];
        inter = exponent_cap;
      }
      values[i].push_back(std::ldexp(1.0, static_cast<int>(inter)));
    }
  }
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    CertificatePoint pt;
    pt.s = s_grid[i];
    pt.steps = checkpoints[i];
    double n = static_cast<double>(pairs);
    double sum = 0, sum2 = 0;
    for (double v : values[i]) {
      sum += v;
      sum2 += v * v;
    }
    pt.mean = sum / n;
    pt.se = std::sqrt(std::max(0.0, (sum2 - n * pt.mean * pt.mean) / (n - 1.0)) / n);
    pt.cap_hit_frac = static_cast<double>(caphits[i]) / n;
    pt.mean_exponent = expsum[i] / n;
    res.points.push_back(pt);
    if (!res.crossing_s && pt.mean <= res.pass_threshold && pt.cap_hit_frac == 0.0)
      res.crossing_s = pt.s;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Cutoff-profile scan. For each (a, n): build the thin torus with
// h = max(3, floor(a ln n)) (and the effective a the rounding produces), run
// the lamp-discrepancy witness lower bound and the certificate on a common
// s-grid of multiples of the lazy 2D-projection cover time, and report the
// empirical threshold bracket
//   [ max s with lower bound > 0.5 ,  min s with certificate <= 1.1 ]
// alongside Psi(phi). All chains here are lazy; the recorded t_box makes the
// convention explicit.
// ---------------------------------------------------------------------------
struct ScanRow {
  double a = 0;
  int n = 0, h = 0;
  double a_eff = 0;
  double s = 0;
  std::int64_t steps = 0;
  double lower = 0, lower_se = 0;
  double cert = 0, cert_se = 0, cert_cap_frac = 0;
  double psi_pred = 0;
  std::uint64_t seed = 0;
};

struct ScanSummary {
  double a = 0;
  int n = 0, h = 0;
  double a_eff = 0, phi = 0, psi = 0;
  double bracket_lo = std::numeric_limits<double>::quiet_NaN();
  double bracket_hi = std::numeric_limits<double>::quiet_NaN();
  double midpoint = std::numeric_limits<double>::quiet_NaN();
  double normalized = std::numeric_limits<double>::quiet_NaN();  // mid/(1+2phi)
  bool complete = false;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<ScanSummary> summaries;
};

struct ScanConfig {
  std::vector<double> a_list;
  std::vector<int> n_list;
  std::vector<double> s_grid;
  std::int64_t witness_trials = 64;
  std::int64_t cert_pairs = 48;
  std::uint64_t seed = 1;
  double r3 = kR3Default;
  int witness_radius = 0;  // 0 = auto: max(2, h/2)
};

inline ScanResult cutoff_scan(const ScanConfig& cfg) {
  ScanResult out;
  std::vector<double> s_grid = cfg.s_grid;
  std::sort(s_grid.begin(), s_grid.end());
  for (int n : cfg.n_list)
    for (double a : cfg.a_list) {
      const int h = std::max(3, static_cast<int>(std::floor(a * std::log(n))));
      TorusSpec spec{n, h, a};
      spec.validate();
      const double a_eff = h / std::log(n);
      const double phi = kPi * cfg.r3 * a_eff;
      const double psi = psi_closed(phi);
      const double t_box = t_box_steps(n, true);
      const int rad = cfg.witness_radius > 0 ? cfg.witness_radius
                                             : std::max(2, h / 2);
      auto centers = separated_centers_2d(n, 4 * rad);
      WitnessRegions regions(spec, centers, rad);

      std::vector<std::int64_t> checks(s_grid.size());
      for (std::size_t i = 0; i < s_grid.size(); ++i)
        checks[i] = static_cast<std::int64_t>(std::llround(s_grid[i] * t_box));

      // witness side: one walk per trial, snapshot the statistic at every
      // checkpoint; stationary resamples per checkpoint
      const std::uint64_t eid_c = experiment_id("scan-chain");
      const std::uint64_t eid_s = experiment_id("scan-stationary");
      std::vector<std::vector<double>> chain_stats(s_grid.size()),
          stat_stats(s_grid.size());
      for (std::int64_t trial = 0; trial < cfg.witness_trials; ++trial) {
        Rng rng(cfg.seed, eid_c, static_cast<std::uint64_t>(trial));
        Torus3Walk w(spec);
        LampState lamps(spec.vertices());
        std::int64_t t = 0;
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
          for (; t < checks[i]; ++t) step_lamplighter(w, lamps, rng);
          chain_stats[i].push_back(regions.u_statistic(lamps));
        }
        Rng rng2(cfg.seed, eid_s, static_cast<std::uint64_t>(trial));
        LampState slamps(spec.vertices());
        for (std::size_t i = 0; i < s_grid.size(); ++i) {
          slamps.randomize(rng2);
          stat_stats[i].push_back(regions.u_statistic(slamps));
        }
      }
      CertificateResult cert =
          exp_moment_certificate(spec, s_grid, cfg.cert_pairs, cfg.seed);

      ScanSummary sum;
      sum.a = a;
      sum.n = n;
      sum.h = h;
      sum.a_eff = a_eff;
      sum.phi = phi;
      sum.psi = psi;
      for (std::size_t i = 0; i < s_grid.size(); ++i) {
        WitnessBound wb = detail::witness_bound_from_samples(chain_stats[i],
                                                             stat_stats[i]);
        ScanRow row;
        row.a = a;
        row.n = n;
        row.h = h;
        row.a_eff = a_eff;
        row.s = s_grid[i];
        row.steps = checks[i];
        row.lower = wb.bound;
        row.lower_se = wb.se;
        row.cert = cert.points[i].mean;
        row.cert_se = cert.points[i].se;
        row.cert_cap_frac = cert.points[i].cap_hit_frac;
        row.psi_pred = psi;
        row.seed = cfg.seed;
        out.rows.push_back(row);
        if (row.lower > 0.5)
          sum.bracket_lo = std::isnan(sum.bracket_lo)
                               ? row.s
                               : std::max(sum.bracket_lo, row.s);
        if (row.cert <= 1.1 && row.cert_cap_frac == 0.0 &&
            std::isnan(sum.bracket_hi))
          sum.bracket_hi = row.s;
      }
      if (!std::isnan(sum.bracket_lo) && !std::isnan(sum.bracket_hi)) {
        sum.midpoint = 0.5 * (sum.bracket_lo + sum.bracket_hi);
        sum.normalized = sum.midpoint / (1.0 + 2.0 * phi);
        sum.complete = true;
      }
      out.summaries.push_back(sum);
    }
  return out;
}

}  // namespace lamplab
