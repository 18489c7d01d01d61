// Acceptance suite: twelve numbered criteria, one [PASS]/[FAIL] line each,
// with the measured values and the pinned tolerances printed on the line.
// Exit code = number of failing criteria. Run `acceptance` for all twelve or
// `acceptance <k>` for one. Criteria 1, 3, 11 and 12 state properties that
// the implemented mathematics does not satisfy; they are run exactly as
// stated and report honest failures — the measured values on those lines
// document what actually holds (see the indented notes they print).

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lamplab/asymptotics.hpp"
#include "lamplab/excursion.hpp"
#include "lamplab/lattice.hpp"
#include "lamplab/mixing.hpp"
#include "lamplab/potential.hpp"
#include "lamplab/rng.hpp"
#include "lamplab/walk.hpp"

using namespace lamplab;

namespace {

void report(int k, bool pass, const std::string& detail) {
  std::printf("[%s] C%d: %s\n", pass ? "PASS" : "FAIL", k, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- C1: closed form vs variational; one-sided slopes at the kink ----------
bool c1() {
  double worst = 0;
  for (int i = 1; i <= 50; ++i) {
    double phi = 0.1 * i;
    worst = std::max(worst, std::abs(psi_variational(phi).psi - psi_closed(phi)));
  }
  PsiSlopes sl = psi_closed_slopes(kPhiKink);
  double gap = std::abs(sl.left - sl.right);
  bool agree = worst <= 1e-6;
  bool kink = gap >= 0.5;
  report(1, agree && kink,
         fmt("variational vs closed: worst gap %.3e (tol 1e-6) %s; "
             "one-sided slopes at phi=1+sqrt2: left %.15f, right %.15f, "
             "gap %.3e (stated threshold 0.5) %s",
             worst, agree ? "ok" : "VIOLATED", sl.left, sl.right, gap,
             kink ? "ok" : "VIOLATED"));
  if (!kink)
    std::printf("        note: the threshold function is C^1 at the kink -- "
                "both one-sided slopes equal 1 exactly; the transition is "
                "second-order (curvature drops %.6f -> 0), so no slope gap "
                ">= 0.5 exists.\n",
                psi_closed_curvatures(kPhiKink).left);
  return agree && kink;
}

// ---- C2: infimum form vs supremum form over the same grid ------------------
bool c2() {
  double worst = 0, at = 0;
  for (int i = 1; i <= 50; ++i) {
    double phi = 0.1 * i;
    double d = std::abs(psi_inf_form(phi) - psi_sup_form(phi));
    if (d > worst) worst = d, at = phi;
  }
  bool ok = worst <= 1e-5;
  report(2, ok, fmt("duality: worst |inf-form - sup-form| = %.3e at phi=%.1f (tol 1e-5)",
                    worst, at));
  return ok;
}

// ---- C3: discretized ledger value against the closed form ------------------
bool c3() {
  double closed = psi_closed(1.0);
  double coarse = psi_L_eta(1.0, 2, 0.1);
  double fine = psi_L_eta(1.0, 3, 0.05);
  double dc = std::abs(coarse - closed), df = std::abs(fine - closed);
  bool band = dc <= 0.5;
  bool closer = df < dc;
  report(3, band && closer,
         fmt("discretization: Psi_{2,0.1}(1) = %.6f vs closed %.6f "
             "(|diff| %.4f, stated band 0.5) %s; refinement Psi_{3,0.05}(1) = "
             "%.6f (|diff| %.4f, strictly closer) %s",
             coarse, closed, dc, band ? "ok" : "VIOLATED", fine, df,
             closer ? "ok" : "VIOLATED"));
  if (!band)
    std::printf("        note: every admissible profile at L=2 already forces "
                "Psi_L >= (1+sqrt(phi/L))^2 = %.6f via the empty-prefix "
                "constraint, for every eta; the finite-depth ledger bounds the "
                "threshold from the safe side and cannot lie within 0.5 of "
                "%.6f. The eta->0 reduction gives %.6f.\n",
                psi_L_reduced(1.0, 2), closed, psi_L_reduced(1.0, 2));
  return band && closer;
}

// ---- C4: escape probability oracle -----------------------------------------
bool c4() {
  QR3Result r = estimate_q_r3(1000000, {8, 32, 128}, 20260819);
  bool qok = std::abs(r.q - 0.659) <= 0.01;
  bool rok = std::abs(r.r3 - 0.2527) <= 0.005;
  bool tok = r.elapsed_sec < 300.0;
  report(4, qok && rok && tok,
         fmt("escape oracle: q = %.5f +/- %.5f (target 0.659 +/- 0.01), "
             "r3 = %.5f +/- %.5f (target 0.2527 +/- 0.005), 10^6 trials in "
             "%.0f s (< 300 s)",
             r.q, r.se_q, r.r3, r.se_r3, r.elapsed_sec));
  return qok && rok && tok;
}

// ---- C5: sampled GFF increments vs effective resistance --------------------
bool c5() {
  TorusSpec spec = TorusSpec::from_h(8, 3);
  Graph g = build_torus(spec);
  GffSystem sys(g, {0});
  Rng prng(5, experiment_id("acc-gff-pairs"), 0);
  std::vector<std::pair<vid, vid>> pairs;
  while (pairs.size() < 20) {
    auto u = static_cast<vid>(prng.below(static_cast<std::uint64_t>(g.nv)));
    auto v = static_cast<vid>(prng.below(static_cast<std::uint64_t>(g.nv)));
    if (u == v || u == 0 || v == 0) continue;
    pairs.emplace_back(u, v);
  }
  const std::int64_t N = 10000;
  std::vector<double> sum(pairs.size(), 0.0), sum2(pairs.size(), 0.0);
  Rng srng(5, experiment_id("acc-gff-samples"), 0);
  for (std::int64_t i = 0; i < N; ++i) {
    GFFSample s = sys.sample(srng);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      double d = s.eta[pairs[k].first] - s.eta[pairs[k].second];
      sum[k] += d * d;
      sum2[k] += d * d * d * d;
    }
  }
  double worst_z = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    double mean = sum[k] / N;
    double var = std::max(0.0, (sum2[k] - N * mean * mean) / (N - 1.0));
    double se = std::sqrt(var / N);
    double exact = sys.increment_var(pairs[k].first, pairs[k].second);
    worst_z = std::max(worst_z, std::abs(mean - exact) / se);
  }
  // single free edge: increment variance must be exactly 1
  Graph k2 = build_complete(2);
  GffSystem s2(k2, {0});
  Rng krng(5, experiment_id("acc-gff-k2"), 0);
  double vs = 0, vs2 = 0;
  for (std::int64_t i = 0; i < N; ++i) {
    double x = s2.sample(krng).eta[1];
    vs += x * x;
    vs2 += x * x * x * x;
  }
  double vmean = vs / N;
  double vse = std::sqrt(std::max(0.0, (vs2 - N * vmean * vmean) / (N - 1.0)) / N);
  double vz = std::abs(vmean - 1.0) / vse;
  bool ok = worst_z <= 3.0 && vz <= 3.0;
  report(5, ok,
         fmt("free-field increments: worst |sampled - R_eff| = %.2f SE over 20 "
             "pairs on the 8x8x3 torus at 10^4 samples (limit 3 SE); "
             "single-edge variance %.4f = 1 within %.2f SE (limit 3 SE)",
             worst_z, vmean, vz));
  return ok;
}

// ---- C6: Thomson, Rayleigh, conditioned-Green identities --------------------
bool c6() {
  // Thomson: minimal flow energy equals the effective resistance
  Graph g8 = build_torus2(8);
  vid t = static_cast<vid>(4 * 8 + 4);
  PotentialSystem sys(g8, {t});
  std::vector<double> rho(g8.nv, 0.0);
  rho[0] = 1.0;
  rho[t] = -1.0;
  double energy = min_energy_flow(sys, rho).energy;
  double reff = effective_resistance(g8, 0, t);
  double thomson = std::abs(energy - reff);

  // Rayleigh: resistance can only grow under edge deletion
  Graph g6 = build_torus2(6);
  double base = effective_resistance(g6, 0, static_cast<vid>(3 * 6 + 3));
  auto edges = edge_list(g6);
  Rng rng(7, experiment_id("acc-rayleigh"), 0);
  double worst_drop = 0;
  for (int i = 0; i < 20; ++i) {
    auto [u, v] = edges[rng.below(edges.size())];
    double del = effective_resistance(g6.without_edge(u, v), 0,
                                      static_cast<vid>(3 * 6 + 3));
    worst_drop = std::min(worst_drop, del - base);
  }

  // conditioning on the exit point does not change the diagonal Green value
  Graph box = build_box2(6, 6);
  std::vector<char> is_b(box.nv, 0);
  for (vid b : box2_boundary(6, 6)) is_b[b] = 1;
  std::vector<vid> interior;
  for (vid v = 0; v < box.nv; ++v)
    if (!is_b[v]) interior.push_back(v);
  StoppedGreen sg(box, interior);
  double worst_green = 0;
  for (vid x : {static_cast<vid>(7), static_cast<vid>(14), static_cast<vid>(21),
                static_cast<vid>(28)})
    // exit vertices with an interior neighbor (corners have zero harmonic
    // measure and the conditioned chain is undefined there)
    for (vid w : {static_cast<vid>(1), static_cast<vid>(33)}) {
      double gxx = sg.green(x, x);
      worst_green = std::max(worst_green,
                             std::abs(sg.conditioned_green_formula(x, x, w) - gxx));
      worst_green = std::max(worst_green,
                             std::abs(sg.conditioned_green_direct(x, x, w) - gxx));
    }

  bool ok = thomson <= 1e-9 && worst_drop >= -1e-12 && worst_green <= 1e-10;
  report(6, ok,
         fmt("potential theory: |flow energy - R_eff| = %.2e (tol 1e-9); "
             "Rayleigh worst drop %.2e over 20 deletions (tol -1e-12); "
             "conditioned-Green diagonal residual %.2e (tol 1e-10)",
             thomson, worst_drop, worst_green));
  return ok;
}

// ---- C7: max-field cover functional vs Monte Carlo cover -------------------
bool c7() {
  std::string line = "cover functional: ";
  bool range_ok = true;
  int trend = 0;
  for (std::uint64_t seed : {201, 202, 203}) {
    double ratio[2];
    int idx = 0;
    for (int n : {16, 24}) {
      TorusSpec spec = TorusSpec::from_h(n, 3);
      Graph g = build_torus(spec);
      GffSystem sys(g, {0});
      Rng grng(seed, experiment_id("acc-ding-gff"), static_cast<std::uint64_t>(n));
      DingEstimate d = ding_cover_estimate(sys, 1000, grng);
      double csum = 0;
      for (int tr = 0; tr < 1000; ++tr) {
        Rng rng(seed, experiment_id("acc-ding-cover"),
                (static_cast<std::uint64_t>(n) << 32) | static_cast<std::uint64_t>(tr));
        csum += static_cast<double>(run_until_cover_graph(g, 0, rng, false).steps);
      }
      ratio[idx] = d.estimate / (csum / 1000.0);
      range_ok = range_ok && ratio[idx] >= 0.5 && ratio[idx] <= 2.0;
      ++idx;
    }
    if (std::abs(ratio[1] - 1.0) < std::abs(ratio[0] - 1.0)) ++trend;
    line += fmt("seed %llu: r16=%.3f r24=%.3f; ",
                static_cast<unsigned long long>(seed), ratio[0], ratio[1]);
  }
  bool ok = range_ok && trend >= 2;
  report(7, ok,
         line + fmt("all in [0.5,2.0] %s; closer-to-1 at n=24 in %d/3 batches "
                    "(need >= 2)",
                    range_ok ? "ok" : "VIOLATED", trend));
  return ok;
}

// ---- C8: the exact cancellation identity ------------------------------------
bool c8() {
  Rng rng(77, experiment_id("acc-alpha"), 0);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    double q = 0.1 + 0.8 * rng.u01();
    double rp = 0.5 + 4.0 * rng.u01();
    double z = 0.05 + 0.95 * rng.u01();
    double s = 0.2 + 3.0 * rng.u01();
    double a = 0.3 + 3.0 * rng.u01();
    double n = 10.0 + 990.0 * rng.u01();
    AlphaIdentity id = alpha_identity(q, rp, z, s, a, n);
    worst = std::max(worst, id.residual / std::max(1.0, std::abs(id.lhs)));
  }
  bool ok = worst <= 1e-12;
  report(8, ok, fmt("count identity: worst relative residual %.3e over 100 "
                    "random draws (tol 1e-12)",
                    worst));
  return ok;
}

// ---- C9: tilted lower-tail estimator against the closed-form rate ----------
bool c9() {
  const double p = 0.02, kappa = 1.0, z = 0.3, w = 1.0, nbar = 2500;
  LdpResult r = ldp_estimate(p, kappa, z, w, nbar, 4000, 301, true);
  double limit = rate_I_limit(kappa, z, w);  // -(w - sqrt(kappa) z)^2 = -0.49
  double fin = rate_I_finite(p, kappa, z, w);
  double chern = std::exp(fin * p * nbar);
  bool rate_ok = std::abs(r.rate - limit) <= 0.2 * std::abs(limit);
  bool chern_ok = r.p_hat - 3.0 * r.se <= chern;
  bool ok = rate_ok && chern_ok && !r.undersampled;
  report(9, ok,
         fmt("lower tail at p=0.02, p*nbar=50: measured rate %.4f vs limit "
             "%.2f (within %.1f%%, limit 20%%); p_hat %.3e vs Chernoff %.3e "
             "(never above by > 3 SE: %s); hits %lld/4000",
             r.rate, limit, 100.0 * std::abs(r.rate - limit) / std::abs(limit),
             r.p_hat, chern, chern_ok ? "ok" : "VIOLATED",
             static_cast<long long>(r.hits)));
  return ok;
}

// ---- C10: exact chain sandwich + witness soundness --------------------------
bool c10() {
  Graph g = build_cycle(6);
  ExactTVResult ex = exact_tv_curve(g, 300);
  double tcov = exact_cover_time(g, 0, true);
  bool sandwich = 0.5 * tcov <= static_cast<double>(ex.t_mix) &&
                  static_cast<double>(ex.t_mix) <= 3.0 * tcov;
  double worst = -1e9;
  for (std::int64_t t = 0; t <= 60; t += 5) {
    WitnessBound wb = witness_tv_lower(g, t, on_count_statistic(), 500, 10);
    worst = std::max(worst, wb.bound - (ex.curve.tv[t] + 3.0 * wb.se));
  }
  bool sound = worst <= 0.0;
  report(10, sandwich && sound,
         fmt("lamp chain on the 6-cycle: exact t_mix %lld vs cover oracle "
             "%.0f (sandwich [%.0f, %.0f]) %s; witness bound below exact curve "
             "+ 3 SE at t=0..60 (worst excess %.3e) %s",
             static_cast<long long>(ex.t_mix), tcov, 0.5 * tcov, 3.0 * tcov,
             sandwich ? "ok" : "VIOLATED", worst, sound ? "ok" : "VIOLATED"));
  return sandwich && sound;
}

// ---- C11: excursion-count concentration at n=128 ----------------------------
bool c11() {
  const int n = 128;
  const double rp = 24, R = 36;  // widest usable annulus: best measured
                                 // concentration among candidates fitting n=128
  const double ln_n = std::log(static_cast<double>(n));
  const auto steps = static_cast<std::int64_t>(
      std::llround((4.0 / kPi) * n * n * ln_n * ln_n));
  const double nbar = typical_counts(1.0, n, R, rp, 1.0, 1.0).nbar_c;
  const int T = 200;
  double sum = 0, sum2 = 0;
  int within = 0;
  for (int t = 0; t < T; ++t) {
    auto res = count_excursions_2d(n, rp, R, steps, false, 100,
                                   static_cast<std::uint64_t>(t));
    double c = static_cast<double>(res.count);
    sum += c;
    sum2 += c * c;
    if (std::abs(c - nbar) <= 0.15 * nbar) ++within;
  }
  double mean = sum / T;
  double sd = std::sqrt(std::max(0.0, (sum2 - T * mean * mean) / (T - 1.0)));
  double frac = static_cast<double>(within) / T;
  bool ok = frac >= 0.95;
  report(11, ok,
         fmt("excursion concentration (R'=%.0f, R=%.0f): %d/%d trials within "
             "15%% of nbar=%.1f (need >= 95%%); measured mean %.1f, relative "
             "SD %.1f%%",
             rp, R, within, T, nbar, mean, 100.0 * sd / mean));
  if (!ok)
    std::printf("        note: a 15%%/95%% band needs relative SD <= 7.7%%, "
                "but every annulus fitting a 128-torus keeps per-excursion "
                "duration variability above 11%% SD at this time scale, plus "
                "a finite-size mean deficit of several percent; the criterion "
                "is geometrically unattainable at n=128 (best candidate "
                "reported).\n");
  return ok;
}

// ---- C12: interpolation trend of the scan bracket ---------------------------
bool c12() {
  int decreasing = 0;
  std::string line = "scan trend at n=48: ";
  for (std::uint64_t seed : {401, 402, 403}) {
    ScanConfig cfg;
    cfg.n_list = {48};
    cfg.a_list = {0.5, 1.5, 3.0};
    cfg.s_grid = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0};
    cfg.witness_trials = 64;
    cfg.cert_pairs = 48;
    cfg.seed = seed;
    ScanResult sr = cutoff_scan(cfg);
    bool complete = true;
    for (const auto& s : sr.summaries) complete = complete && s.complete;
    bool mono = complete &&
                sr.summaries[0].normalized >= sr.summaries[1].normalized &&
                sr.summaries[1].normalized >= sr.summaries[2].normalized;
    if (mono) ++decreasing;
    line += fmt("seed %llu: norm = {%.3f, %.3f, %.3f}%s; ",
                static_cast<unsigned long long>(seed),
                sr.summaries[0].normalized, sr.summaries[1].normalized,
                sr.summaries[2].normalized, complete ? "" : " (incomplete)");
  }
  bool ok = decreasing >= 2;
  report(12, ok,
         line + fmt("weakly decreasing in a in %d/3 batches (need >= 2)",
                    decreasing));
  if (!ok)
    std::printf("        note: at n=48 the normalized bracket midpoint "
                "increases toward the 1/2 envelope from below instead of "
                "decreasing onto it: the witness statistic loses its gap and "
                "the certificate crosses well before the predicted threshold "
                "at small aspect, and both finite-size effects shrink as the "
                "aspect grows. The asymptotic ordering is not visible at this "
                "size; stable across witness trials (48..256), region radii "
                "(2..12), and seeds.\n");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  bool (*crit[])(void) = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12};
  int fails = 0;
  if (argc > 1) {
    int k = std::atoi(argv[1]);
    if (k < 1 || k > 12) {
      std::fprintf(stderr, "usage: %s [1..12]\n", argv[0]);
      return 2;
    }
    return crit[k - 1]() ? 0 : 1;
  }
  for (auto* c : crit)
    if (!c()) ++fails;
  std::printf("%d/12 criteria passed\n", 12 - fails);
  return fails;
}
