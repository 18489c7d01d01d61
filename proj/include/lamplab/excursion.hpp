#pragma once
// Excursion decomposition of walk paths against annuli (ball or cylinder),
// excursion counting with checkpoints, z-type classification of count
// profiles, uncovered-set extraction, and the lamp-discrepancy witness
// statistic with its parameter certificate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamplab/asymptotics.hpp"
#include "lamplab/lattice.hpp"
#include "lamplab/walk.hpp"

namespace lamplab {

// one completed excursion: enter the outer region from strictly outside
// (external part begins), first touch the inner region, leave the outer
// region again (internal part [hit_step, end_step])
struct ExcursionRecord {
  int annulus_id = -1;
  std::int64_t start_step = -1, hit_step = -1, end_step = -1;
  vid entry_point = -1, hit_point = -1, exit_point = -1;
};

// ---------------------------------------------------------------------------
// Streaming annulus automaton. Feed it the walk position once per step; it
// counts maximal non-overlapping excursions in path order. A path that begins
// inside the outer region is ignored until it first leaves (that partial
// excursion has no entry point). Cylinder annuli measure 2D distance only, so
// they also serve plain Z_n^2 work; balls use the full wrapped 3D metric.
// ---------------------------------------------------------------------------
class ExcursionTracker {
 public:
  ExcursionTracker(const TorusSpec& spec, RegionKind kind, int cx, int cy,
                   int cz, double r_inner, double r_outer, int annulus_id = -1,
                   bool keep_records = false)
      : n_(spec.n),
        h_(spec.h),
        kind_(kind),
        cx_(cx),
        cy_(cy),
        cz_(cz),
        r_in2_(r_inner * r_inner),
        r_out2_(r_outer * r_outer),
        id_(annulus_id),
        keep_(keep_records) {
    if (!(r_inner >= 1.0))
      throw std::invalid_argument("ExcursionTracker: inner radius must be >= 1");
    if (!(r_outer >= r_inner + 1.0))
      throw std::invalid_argument(
          "ExcursionTracker: need outer >= inner + 1 so entry cannot touch the "
          "inner region in the same step");
    if (!(2.0 * r_outer < n_))
      throw std::invalid_argument("ExcursionTracker: outer region wraps the torus");
  }

  // returns true when an excursion completes at this step
  bool observe(int x, int y, int z, std::int64_t t) {
    std::int64_t d2 = dist2_2d(x, y, cx_, cy_, n_);
    if (kind_ == RegionKind::Ball) {
      std::int64_t dz = wrap_delta(z - cz_, h_);
      d2 += static_cast<std::int64_t>(dz) * dz;
    }
    const bool in_outer = static_cast<double>(d2) <= r_out2_;
    const bool in_inner = static_cast<double>(d2) <= r_in2_;
    switch (phase_) {
      case Phase::Init:
        if (!in_outer) phase_ = Phase::Outside;
        return false;
      case Phase::Outside:
        if (in_outer) {
          phase_ = Phase::Entered;
          cur_.annulus_id = id_;
          cur_.start_step = t;
          cur_.entry_point = pack(x, y, z);
          // fallthrough intentionally avoided: entry cannot be an inner
          // contact because outer - inner >= 1 and steps move distance <= 1
        }
        return false;
      case Phase::Entered:
        if (!in_outer) {
          phase_ = Phase::Outside;  // retreated without touching inner: a gap
        } else if (in_inner) {
          phase_ = Phase::Inside;
          cur_.hit_step = t;
          cur_.hit_point = pack(x, y, z);
        }
        return false;
      case Phase::Inside:
        if (!in_outer) {
          cur_.end_step = t;
          cur_.exit_point = pack(x, y, z);
          ++count_;
          last_ = cur_;
          if (keep_) records_.push_back(cur_);
          phase_ = Phase::Outside;
          cur_ = ExcursionRecord{};
          cur_.annulus_id = id_;
          return true;
        }
        return false;
    }
    return false;
  }

  // true while the walk is in the internal part (inner hit, outer not yet left)
  bool in_internal_part() const { return phase_ == Phase::Inside; }
  std::int64_t count() const { return count_; }
  int annulus_id() const { return id_; }
  const std::optional<ExcursionRecord> last() const {
    return count_ ? std::optional<ExcursionRecord>(last_) : std::nullopt;
  }
  const std::vector<ExcursionRecord>& records() const { return records_; }

 private:
  enum class Phase { Init, Outside, Entered, Inside };
  vid pack(int x, int y, int z) const {
    return static_cast<vid>((static_cast<std::int64_t>(x) * n_ + y) * h_ + z);
  }
  int n_, h_;
  RegionKind kind_;
  int cx_, cy_, cz_;
  double r_in2_, r_out2_;
  int id_;
  bool keep_;
  Phase phase_ = Phase::Init;
  ExcursionRecord cur_;
  ExcursionRecord last_;
  std::int64_t count_ = 0;
  std::vector<ExcursionRecord> records_;
};

// offline decomposition of a stored path (step index = position in `path`)
inline std::vector<ExcursionRecord> decompose_excursions(
    const TorusSpec& spec, const std::vector<vid>& path, RegionKind kind,
    int cx, int cy, int cz, double r_inner, double r_outer,
    int annulus_id = -1) {
  ExcursionTracker tr(spec, kind, cx, cy, cz, r_inner, r_outer, annulus_id,
                      /*keep_records=*/true);
  for (std::size_t t = 0; t < path.size(); ++t) {
    int x, y, z;
    spec.coords(path[t], x, y, z);
    tr.observe(x, y, z, static_cast<std::int64_t>(t));
  }
  return tr.records();
}

inline void write_records_jsonl(std::ostream& os,
                                const std::vector<ExcursionRecord>& recs) {
  for (const auto& r : recs)
    os << "{\"annulus\":" << r.annulus_id << ",\"start\":" << r.start_step
       << ",\"hit\":" << r.hit_step << ",\"end\":" << r.end_step
       << ",\"entry\":" << r.entry_point << ",\"hit_v\":" << r.hit_point
       << ",\"exit\":" << r.exit_point << "}\n";
}

// ---------------------------------------------------------------------------
// Multi-level counting ledger: one cylinder tracker per schedule level, all
// centered at the same 2D point, plus optional ball trackers. The checkpoint
// is the step at which the ceil(nbar_target)-th top-level excursion
// completes; counts are frozen there for type classification.
// ---------------------------------------------------------------------------
struct ExcursionCounts {
  std::vector<std::int64_t> n_c;  // per cylinder level
  std::vector<std::int64_t> n_b;  // per ball annulus
  std::int64_t checkpoint = -1;   // -1 while not yet reached
};

class ExcursionLedger {
 public:
  ExcursionLedger(const TorusSpec& spec, const RadiiSchedule& sched, int cx,
                  int cy, double nbar_target)
      : target_(static_cast<std::int64_t>(std::ceil(nbar_target))) {
    for (std::size_t k = 0; k < sched.levels.size(); ++k)
      cyl_.emplace_back(spec, RegionKind::Cylinder, cx, cy, 0,
                        sched.levels[k].rp, sched.levels[k].r,
                        static_cast<int>(k));
  }

  void add_ball(const TorusSpec& spec, int bx, int by, int bz, double r_inner,
                double r_outer) {
    ball_.emplace_back(spec, RegionKind::Ball, bx, by, bz, r_inner, r_outer,
                       static_cast<int>(ball_.size()));
  }

  void observe(int x, int y, int z, std::int64_t t) {
    for (auto& tr : cyl_) tr.observe(x, y, z, t);
    for (auto& tr : ball_) tr.observe(x, y, z, t);
    if (frozen_.checkpoint < 0 && cyl_.back().count() >= target_) {
      frozen_.checkpoint = t;
      frozen_.n_c = counts_of(cyl_);
      frozen_.n_b = counts_of(ball_);
    }
  }

  bool checkpoint_reached() const { return frozen_.checkpoint >= 0; }
  // counts frozen at the checkpoint (throws if never reached)
  const ExcursionCounts& at_checkpoint() const {
    if (frozen_.checkpoint < 0)
      throw std::logic_error("ExcursionLedger: checkpoint not reached");
    return frozen_;
  }
  ExcursionCounts current(std::int64_t t) const {
    ExcursionCounts c;
    c.n_c = counts_of(cyl_);
    c.n_b = counts_of(ball_);
    c.checkpoint = t;
    return c;
  }

 private:
  static std::vector<std::int64_t> counts_of(const std::vector<ExcursionTracker>& v) {
    std::vector<std::int64_t> out;
    out.reserve(v.size());
    for (const auto& tr : v) out.push_back(tr.count());
    return out;
  }
  std::vector<ExcursionTracker> cyl_;
  std::vector<ExcursionTracker> ball_;
  std::int64_t target_;
  ExcursionCounts frozen_;
};

// ---------------------------------------------------------------------------
// z-type classification. Grid {0, 1/K, ..., 1} with K = round(1/eta); the
// assigned type is the largest grid value whose lower threshold the count
// meets: count >= ((z - slack*eta)_+)^2 * nbar, slack 2 for cylinder counts
// and 3 for ball counts. Deterministic and total; monotone in the count.
// ---------------------------------------------------------------------------
struct TypeProfile {
  std::vector<double> z;  // z_0..z_L with z_L = 1 pinned
  double eta = 0;
  double s = 0;
};

namespace detail {
inline int type_grid_size(double eta) {
  if (!(eta > 0 && eta < 0.5))
    throw std::invalid_argument("type grid: eta outside (0, 0.5)");
  int K = static_cast<int>(std::lround(1.0 / eta));
  if (std::abs(K * eta - 1.0) > 1e-9)
    throw std::invalid_argument("type grid: eta must divide 1");
  return K;
}
}  // namespace detail

inline double classify_count(std::int64_t count, double nbar, double eta,
                             int slack) {
  const int K = detail::type_grid_size(eta);
  for (int i = K; i >= 0; --i) {
    double z = static_cast<double>(i) / K;
    double gap = std::max(z - slack * eta, 0.0);
    if (static_cast<double>(count) >= gap * gap * nbar) return z;
  }
  return 0.0;  // unreachable: z=0 has threshold 0
}

inline TypeProfile classify_type(const ExcursionCounts& counts, double s,
                                 double eta, double nbar_c,
                                 double nbar_b = 0.0,
                                 std::vector<double>* ball_types = nullptr) {
  TypeProfile tp;
  tp.eta = eta;
  tp.s = s;
  if (counts.n_c.empty())
    throw std::invalid_argument("classify_type: no cylinder counts");
  // levels 0..L-1 classified; the top level defines the checkpoint, z_L = 1
  for (std::size_t k = 0; k + 1 < counts.n_c.size(); ++k)
    tp.z.push_back(classify_count(counts.n_c[k], nbar_c, eta, 2));
  tp.z.push_back(1.0);
  if (ball_types) {
    ball_types->clear();
    for (auto c : counts.n_b)
      ball_types->push_back(classify_count(c, nbar_b, eta, 3));
  }
  return tp;
}

// admissibility: sqrt(s) <= (1 - k/L)/(1 - z_k) at every interpolation level
// (equivalently b_{k/L}(z_k) >= 0); levels with z_k = 1 impose nothing
inline bool admissible(const TypeProfile& tp, double s,
                       double* margin = nullptr) {
  const int L = static_cast<int>(tp.z.size()) - 1;
  double m = std::numeric_limits<double>::infinity();
  for (int k = 0; k < L; ++k) {
    if (tp.z[k] >= 1.0) continue;
    double rho = static_cast<double>(k) / L;
    m = std::min(m, (1.0 - rho) / (1.0 - tp.z[k]) - std::sqrt(s));
  }
  if (margin) *margin = m;
  return m >= 0.0;
}

// ---------------------------------------------------------------------------
// Uncovered set.
// ---------------------------------------------------------------------------
inline std::vector<vid> uncovered_set(const std::vector<std::int64_t>& first_hit,
                                      std::int64_t t) {
  std::vector<vid> out;
  for (std::size_t v = 0; v < first_hit.size(); ++v)
    if (first_hit[v] < 0 || first_hit[v] > t) out.push_back(static_cast<vid>(v));
  return out;
}

// ---------------------------------------------------------------------------
// Lamp-discrepancy witness. D^v = (#off - #on) over a region around center v;
// U_n = max over the centers. Centers must be pairwise >= 4 * radius apart in
// the 2D base metric, which also guarantees disjointness.
// ---------------------------------------------------------------------------
class WitnessRegions {
 public:
  // cylinders of the given radius at explicit 2D centers
  WitnessRegions(const TorusSpec& spec, const std::vector<std::pair<int, int>>& centers,
                 int radius) {
    if (radius < 1) throw std::invalid_argument("WitnessRegions: radius < 1");
    for (std::size_t i = 0; i < centers.size(); ++i)
      for (std::size_t j = i + 1; j < centers.size(); ++j) {
        std::int64_t d2 = dist2_2d(centers[i].first, centers[i].second,
                                   centers[j].first, centers[j].second, spec.n);
        if (d2 < static_cast<std::int64_t>(16) * radius * radius)
          throw std::invalid_argument(
              "WitnessRegions: centers closer than 4x radius");
      }
    for (auto [cx, cy] : centers) {
      Region r{RegionKind::Cylinder, cx, cy, 0, -1, static_cast<double>(radius)};
      sets_.push_back(region_members(spec, r));
    }
  }

  // arbitrary vertex sets (tiny-graph witnesses); no separation requirement
  explicit WitnessRegions(std::vector<std::vector<vid>> sets)
      : sets_(std::move(sets)) {}

  std::size_t size() const { return sets_.size(); }
  const std::vector<std::vector<vid>>& sets() const { return sets_; }

  // D-values and U_n
  std::vector<double> discrepancies(const LampState& lamps) const {
    std::vector<double> d;
    d.reserve(sets_.size());
    for (const auto& s : sets_) {
      std::int64_t on = 0;
      for (vid v : s) on += lamps.get(v);
      d.push_back(static_cast<double>(static_cast<std::int64_t>(s.size()) - 2 * on));
    }
    return d;
  }

  double u_statistic(const LampState& lamps) const {
    double best = -std::numeric_limits<double>::infinity();
    for (double d : discrepancies(lamps)) best = std::max(best, d);
    return best;
  }

 private:
  std::vector<std::vector<vid>> sets_;
};

// ---------------------------------------------------------------------------
// Witness parameter certificate: the tuple (rho, delta, w, z) with derived
//   lambda = 2 s (w - z + delta)^2 / (rho - delta)^2,
//   A      = ((z - delta) rho - w delta) / (w - z + delta),
// valid when  b_rho(w - delta) >= 2 delta,
//             alpha(z + 3 delta) + lambda (rho - delta) <= rho - 5 delta,
//             lambda < 2, A > 0, and w > z > (1 + w/rho) delta.
// Such parameters exist exactly in the subcritical regime s < Psi(phi).
// ---------------------------------------------------------------------------
struct WitnessParams {
  double rho = 0, delta = 0, w = 0, z = 0;
  double s = 0, phi = 0;
  double lambda = 0, A = 0;

  void validate() const {
    auto fail = [](const std::string& msg) {
      throw std::invalid_argument("WitnessParams: " + msg);
    };
    if (!(rho > 0 && rho <= 1)) fail("rho outside (0,1]");
    if (!(delta > 0)) fail("delta must be positive");
    if (!(w > z && w <= 1)) fail("need z < w <= 1");
    if (!(z > (1.0 + w / rho) * delta)) fail("z too small for this delta");
    if (!(lambda < 2.0)) fail("lambda >= 2");
    if (!(A > 0.0)) fail("A <= 0");
    if (b_alpha(rho, w - delta, s, phi).b < 2.0 * delta)
      fail("b_rho(w - delta) < 2 delta");
    double a0 = s * (z + 3.0 * delta) * (z + 3.0 * delta) / phi;
    if (a0 + lambda * (rho - delta) > rho - 5.0 * delta)
      fail("alpha/lambda budget exceeded");
  }
};

inline WitnessParams make_witness_params(double rho, double delta, double w,
                                         double z, double s, double phi) {
  WitnessParams p;
  p.rho = rho;
  p.delta = delta;
  p.w = w;
  p.z = z;
  p.s = s;
  p.phi = phi;
  p.lambda = 2.0 * s * (w - z + delta) * (w - z + delta) /
             ((rho - delta) * (rho - delta));
  p.A = ((z - delta) * rho - w * delta) / (w - z + delta);
  p.validate();
  return p;
}

// search for a valid parameter tuple at (s, phi); succeeds iff s is far
// enough below Psi(phi) for the grid resolution
inline std::optional<WitnessParams> find_witness_params(double s, double phi) {
  const int G = 60;
  for (double delta : {1e-2, 3e-3, 1e-3, 1e-4}) {
    for (int ir = 1; ir <= G; ++ir) {
      double rho = static_cast<double>(ir) / G;
      for (int iw = 1; iw <= G; ++iw) {
        double w = static_cast<double>(iw) / G;
        // candidate z near the smoothing-optimal 2 phi w / (rho + 2 phi)
        double zc = 2.0 * phi * w / (rho + 2.0 * phi);
        for (double z : {zc, 0.8 * zc, 1.2 * zc, 0.5 * zc}) {
          if (!(z > 0 && z < w)) continue;
          try {
            return make_witness_params(rho, delta, w, z, s, phi);
          } catch (const std::invalid_argument&) {
          }
        }
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Monte Carlo excursion counting on the 2D torus: count completed annulus
// excursions by a fixed horizon. Used for the concentration checks against
// nbar_C; the annulus is centered at the walk start for definiteness of the
// initial phase (start inside => tracker waits until the first clean exit).
// ---------------------------------------------------------------------------
struct CountTrialResult {
  std::int64_t count = 0;
  std::int64_t steps = 0;
};

inline CountTrialResult count_excursions_2d(int n, double r_inner,
                                            double r_outer, std::int64_t steps,
                                            bool lazy, std::uint64_t seed,
                                            std::uint64_t trial) {
  TorusSpec spec{n, 3, 0.0};  // h unused by cylinder metric
  Rng rng(seed, experiment_id("excursions-2d"), trial);
  // start at the center; the tracker ignores everything until the walk first
  // leaves the outer disk, after which counting is clean
  ExcursionTracker tr(spec, RegionKind::Cylinder, 0, 0, 0, r_inner, r_outer, 0);
  Torus2Walk w(n);
  tr.observe(0, 0, 0, 0);
  for (std::int64_t t = 1; t <= steps; ++t) {
    w.step(rng, lazy);
    tr.observe(w.x, w.y, 0, t);
  }
  return {tr.count(), steps};
}

}  // namespace lamplab
