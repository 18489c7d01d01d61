// lamplab — command-line front end for the lamplighter cover/mixing toolkit.
//
// Every subcommand writes a CSV whose first line is a '#'-prefixed JSON echo
// of the full configuration (schema lamplab.csv.v1), so result files are
// self-describing and reproducible. `excursions` writes JSON lines instead.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lamplab/asymptotics.hpp"
#include "lamplab/excursion.hpp"
#include "lamplab/io.hpp"
#include "lamplab/lattice.hpp"
#include "lamplab/mixing.hpp"
#include "lamplab/parallel.hpp"
#include "lamplab/potential.hpp"
#include "lamplab/rng.hpp"
#include "lamplab/walk.hpp"

using namespace lamplab;

namespace {

// resolve --out: "-" (default) is stdout, otherwise open the named file
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file: " + path);
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

TorusSpec make_spec(int n, double a, int h) {
  return h > 0 ? TorusSpec::from_h(n, h) : TorusSpec::from_a(n, a);
}

json grid_json(const std::vector<double>& v) { return json(v); }

int cmd_cover(int n, double a, int h, std::int64_t trials, std::uint64_t seed,
              bool lazy, int workers, const std::string& out) {
  TorusSpec spec = make_spec(n, a, h);
  CoverPrediction pred = cover_prediction(n, spec.a, kR3Default, lazy);
  json cfg = {{"command", "cover"},
              {"n", n},
              {"h", spec.h},
              {"a_eff", spec.a},
              {"lazy", lazy},
              {"trials", trials},
              {"seed", seed},
              {"workers", workers},
              {"t_box", pred.t_box},
              {"predicted_ratio", pred.ratio},
              {"predicted_cover", pred.cover}};
  OutStream os(out);
  CsvWriter w(os.get(), cfg, {"trial", "steps", "covered", "ratio"});

  const std::uint64_t eid = experiment_id("cli-cover");
  auto results = run_trials(trials, workers, [&](std::int64_t i) {
    Rng rng(seed, eid, static_cast<std::uint64_t>(i));
    return run_until_cover(spec, rng, lazy);
  });
  double sum = 0, sum2 = 0;
  for (std::int64_t i = 0; i < trials; ++i) {
    double ratio = static_cast<double>(results[i].steps) / pred.t_box;
    w.cells(i, results[i].steps, results[i].covered ? 1 : 0, ratio);
    sum += ratio;
    sum2 += ratio * ratio;
  }
  double mean = sum / static_cast<double>(trials);
  double var = trials > 1 ? (sum2 - trials * mean * mean) / (trials - 1.0) : 0.0;
  std::cerr << "cover: mean ratio " << mean << " +/- "
            << std::sqrt(std::max(0.0, var) / trials) << " (predicted "
            << pred.ratio << ")\n";
  return 0;
}

int cmd_r3(std::int64_t trials, std::uint64_t seed,
           std::vector<std::int64_t> radii, const std::string& out) {
  QR3Result r = estimate_q_r3(trials, radii, seed);
  json cfg = {{"command", "r3"},  {"trials", trials}, {"seed", seed},
              {"radii", radii},   {"q", r.q},         {"se_q", r.se_q},
              {"r3", r.r3},       {"se_r3", r.se_r3}, {"elapsed_sec", r.elapsed_sec}};
  OutStream os(out);
  CsvWriter w(os.get(), cfg, {"radius", "escape_frequency"});
  for (std::size_t i = 0; i < r.radii.size(); ++i)
    w.cells(r.radii[i], r.q_at_radius[i]);
  std::cerr << "r3: q = " << r.q << " +/- " << r.se_q << ", r3 = " << r.r3
            << " +/- " << r.se_r3 << "\n";
  return 0;
}

int cmd_gff(int n, double a, int h, std::int64_t samples, std::uint64_t seed,
            const std::string& out) {
  TorusSpec spec = make_spec(n, a, h);
  Graph g = build_torus(spec);
  GffSystem sys(g, {0});
  Rng rng(seed, experiment_id("cli-gff"), 0);

  std::vector<double> maxima;
  maxima.reserve(static_cast<std::size_t>(samples));
  for (std::int64_t i = 0; i < samples; ++i) {
    GFFSample s = sys.sample(rng);
    maxima.push_back(*std::max_element(s.eta.begin(), s.eta.end()));
  }
  double sum = 0, sum2 = 0;
  for (double m : maxima) sum += m, sum2 += m * m;
  double cnt = static_cast<double>(samples);
  double mean = sum / cnt;
  double var = samples > 1 ? std::max(0.0, (sum2 - cnt * mean * mean) / (cnt - 1.0)) : 0.0;
  double se = std::sqrt(var / cnt);
  double edges = static_cast<double>(g.edge_count());
  double estimate = edges * mean * mean;
  double est_se = edges * 2.0 * std::abs(mean) * se;

  json cfg = {{"command", "gff"},       {"n", n},
              {"h", spec.h},            {"a_eff", spec.a},
              {"samples", samples},     {"seed", seed},
              {"pinned", 0},            {"edges", edges},
              {"mean_max", mean},       {"se_mean_max", se},
              {"cover_estimate", estimate}, {"cover_estimate_se", est_se}};
  OutStream os(out);
  CsvWriter w(os.get(), cfg, {"sample", "max_eta"});
  for (std::int64_t i = 0; i < samples; ++i)
    w.cells(i, maxima[static_cast<std::size_t>(i)]);
  std::cerr << "gff: |E| (E max eta)^2 = " << estimate << " +/- " << est_se
            << " from " << samples << " samples\n";
  return 0;
}

int cmd_resistance(int n, double a, int h, const std::string& out) {
  json cfg = {{"command", "resistance"}, {"n", n}};
  OutStream os(out);
  if (h > 0 || a > 0) {
    TorusSpec spec = h > 0 ? TorusSpec::from_h(n, h) : TorusSpec::from_a(n, a);
    Graph g = build_torus(spec);
    cfg["h"] = spec.h;
    cfg["vertices"] = g.nv;
    CsvWriter w(os.get(), cfg, {"ux", "uy", "uz", "vx", "vy", "vz", "resistance"});
    PotentialSystem sys(g, {g.nv - 1});
    auto emit = [&](int x, int y, int z) {
      double r = effective_resistance(sys, spec.index(0, 0, 0), spec.index(x, y, z));
      w.cells(0, 0, 0, x, y, z, r);
    };
    emit(1, 0, 0);
    emit(n / 2, 0, 0);
    emit(n / 2, n / 2, 0);
    emit(n / 2, n / 2, spec.h / 2);
  } else {
    Graph g = build_torus2(n);
    cfg["h"] = 0;
    cfg["vertices"] = g.nv;
    CsvWriter w(os.get(), cfg, {"ux", "uy", "uz", "vx", "vy", "vz", "resistance"});
    PotentialSystem sys(g, {g.nv - 1});
    auto idx = [n](int x, int y) { return static_cast<vid>(x * n + y); };
    auto emit = [&](int x, int y) {
      double r = effective_resistance(sys, idx(0, 0), idx(x, y));
      w.cells(0, 0, 0, x, y, 0, r);
    };
    emit(1, 0);
    emit(n / 2, 0);
    emit(n / 2, n / 2);
  }
  return 0;
}

int cmd_psi(std::vector<double> phi_grid, int L, double eta,
            const std::string& out) {
  if (phi_grid.empty())
    for (int i = 1; i <= 50; ++i) phi_grid.push_back(0.1 * i);
  json cfg = {{"command", "psi"},
              {"phi_grid", grid_json(phi_grid)},
              {"L", L},
              {"eta", eta}};
  OutStream os(out);
  std::vector<std::string> cols = {"phi",       "psi_closed", "psi_variational",
                                   "rho_star",  "envelope",   "slope_left",
                                   "slope_right"};
  if (L > 0) cols.push_back("psi_L_eta");
  CsvWriter w(os.get(), cfg, std::move(cols));
  for (double phi : phi_grid) {
    PsiVariational v = psi_variational(phi);
    PsiSlopes sl = psi_closed_slopes(phi);
    double closed = psi_closed(phi);
    if (L > 0)
      w.cells(phi, closed, v.psi, v.rho_star, closed / (1.0 + 2.0 * phi),
              sl.left, sl.right, psi_L_eta(phi, L, eta));
    else
      w.cells(phi, closed, v.psi, v.rho_star, closed / (1.0 + 2.0 * phi),
              sl.left, sl.right);
  }
  return 0;
}

int cmd_ldp(double p, double kappa, double z, double wpar, double nbar,
            std::int64_t trials, std::uint64_t seed, const std::string& out) {
  json cfg = {{"command", "ldp"}, {"p", p},       {"kappa", kappa},
              {"z", z},           {"w", wpar},    {"nbar", nbar},
              {"trials", trials}, {"seed", seed}};
  OutStream os(out);
  CsvWriter w(os.get(), cfg,
              {"method", "p_hat", "se", "log_p", "rate", "rate_finite",
               "rate_limit", "theta", "hits", "undersampled"});
  double fin = rate_I_finite(p, kappa, z, wpar);
  double lim = (z > 0 && wpar >= std::sqrt(kappa) * z)
                   ? rate_I_limit(kappa, z, wpar)
                   : std::numeric_limits<double>::quiet_NaN();
  for (bool tilted : {true, false}) {
    LdpResult r = ldp_estimate(p, kappa, z, wpar, nbar, trials, seed, tilted);
    w.cells(tilted ? "tilted" : "raw", r.p_hat, r.se, r.log_p, r.rate, fin, lim,
            r.theta, r.hits, r.undersampled ? 1 : 0);
    std::cerr << "ldp " << (tilted ? "tilted" : "raw   ") << ": p_hat = "
              << r.p_hat << " (hits " << r.hits << ", rate " << r.rate
              << ", finite-size prediction " << fin << ")\n";
  }
  return 0;
}

int cmd_excursions(int n, double a, int h, int M, int L, double nbar,
                   std::int64_t trials, std::uint64_t seed, bool lazy,
                   const std::string& out) {
  TorusSpec spec = make_spec(n, a, h);
  RadiiSchedule sched = make_radii_schedule(spec.n, spec.h, M, L);
  OutStream os(out);
  json cfg = {{"command", "excursions"},
              {"schema", "lamplab.jsonl.v1"},
              {"n", n},
              {"h", spec.h},
              {"M", M},
              {"L", L},
              {"nbar", nbar},
              {"trials", trials},
              {"seed", seed},
              {"lazy", lazy}};
  write_jsonl(os.get(), cfg);

  const std::uint64_t eid = experiment_id("cli-excursions");
  const auto budget =
      static_cast<std::int64_t>(64.0 * t_box_steps(spec.n, lazy));
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::vector<ExcursionTracker> trackers;
    for (std::size_t k = 0; k < sched.levels.size(); ++k)
      trackers.emplace_back(spec, RegionKind::Cylinder, 0, 0, 0,
                            sched.levels[k].rp, sched.levels[k].r,
                            static_cast<int>(k), /*keep_records=*/true);
    Rng rng(seed, eid, static_cast<std::uint64_t>(trial));
    Torus3Walk walk(spec);
    std::int64_t t = 0;
    for (auto& tr : trackers) tr.observe(walk.x, walk.y, walk.z, 0);
    while (trackers.back().count() < nbar && t < budget) {
      ++t;
      if (walk.step(rng, lazy))
        for (auto& tr : trackers) tr.observe(walk.x, walk.y, walk.z, t);
    }
    for (const auto& tr : trackers)
      for (const auto& r : tr.records()) {
        json rec = {{"trial", trial},          {"level", tr.annulus_id()},
                    {"start", r.start_step},   {"hit", r.hit_step},
                    {"end", r.end_step},       {"entry", r.entry_point},
                    {"hit_v", r.hit_point},    {"exit", r.exit_point}};
        write_jsonl(os.get(), rec);
      }
    json summary = {{"trial", trial}, {"steps", t}, {"counts", json::array()}};
    for (const auto& tr : trackers) summary["counts"].push_back(tr.count());
    write_jsonl(os.get(), summary);
  }
  return 0;
}

int cmd_scan(std::vector<int> n_list, std::vector<double> a_list,
             std::vector<double> s_grid, std::int64_t witness_trials,
             std::int64_t cert_pairs, std::uint64_t seed,
             const std::string& out) {
  ScanConfig cfg;
  cfg.n_list = std::move(n_list);
  cfg.a_list = std::move(a_list);
  cfg.s_grid = std::move(s_grid);
  cfg.witness_trials = witness_trials;
  cfg.cert_pairs = cert_pairs;
  cfg.seed = seed;
  ScanResult res = cutoff_scan(cfg);

  json echo = {{"command", "scan"},
               {"n_list", cfg.n_list},
               {"a_list", cfg.a_list},
               {"s_grid", grid_json(cfg.s_grid)},
               {"witness_trials", witness_trials},
               {"cert_pairs", cert_pairs},
               {"seed", seed}};
  OutStream os(out);
  CsvWriter w(os.get(), echo,
              {"kind", "a", "n", "h", "a_eff", "s", "steps", "lower",
               "lower_se", "cert", "cert_se", "cert_cap_frac", "psi_pred",
               "phi", "psi", "bracket_lo", "bracket_hi", "midpoint",
               "normalized", "complete"});
  for (const auto& r : res.rows)
    w.cells("point", r.a, r.n, r.h, r.a_eff, r.s, r.steps, r.lower, r.lower_se,
            r.cert, r.cert_se, r.cert_cap_frac, r.psi_pred, "", "", "", "", "",
            "", "");
  for (const auto& s : res.summaries) {
    w.cells("summary", s.a, s.n, s.h, s.a_eff, "", "", "", "", "", "", "", "",
            s.phi, s.psi, s.bracket_lo, s.bracket_hi, s.midpoint, s.normalized,
            s.complete ? 1 : 0);
    std::cerr << "scan: n=" << s.n << " a=" << s.a << " -> bracket ["
              << s.bracket_lo << ", " << s.bracket_hi << "], normalized "
              << s.normalized << (s.complete ? "" : " (incomplete)") << "\n";
  }
  return 0;
}

int cmd_exact_tv(int n, std::int64_t horizon, bool lazy,
                 const std::string& out) {
  Graph g = build_cycle(n);
  if (horizon <= 0) horizon = 40 * static_cast<std::int64_t>(n) * n + 100;
  ExactTVResult r = exact_tv_curve(g, horizon);
  json cfg = {{"command", "exact-tv"},
              {"n", n},
              {"base", "cycle"},
              {"horizon", horizon},
              {"delta", r.delta},
              {"t_mix", r.t_mix}};
  if (g.nv <= 16) cfg["exact_cover_time"] = exact_cover_time(g, 0, lazy);
  OutStream os(out);
  CsvWriter w(os.get(), cfg, {"t", "tv"});
  for (std::size_t t = 0; t < r.curve.tv.size(); ++t)
    w.cells(r.curve.times[t], r.curve.tv[t]);
  std::cerr << "exact-tv: t_mix = " << r.t_mix << " at delta = " << r.delta
            << " (" << g.nv << "-vertex base)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lamplighter random-walk laboratory"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  // shared knobs; each subcommand binds the ones it uses
  int n = 16, h = 0, L = 2, M = 2, workers = 1;
  double a = 1.0, eta = 0.1;
  std::int64_t trials = 16;
  std::uint64_t seed = 1;
  bool lazy = true;
  std::string out = "-";
  std::vector<double> s_grid;

  auto add_common = [&](CLI::App* c, std::initializer_list<std::string> avail) {
    c->set_help_flag("--help", "print help");  // frees -h for the height flag
    for (const std::string& f : avail) {
      if (f == "n") c->add_option("--n", n, "side length of the torus base");
      if (f == "nlist") continue;  // bound separately (repeatable)
      if (f == "a") c->add_option("--a", a, "aspect: h = floor(a ln n)");
      if (f == "h") c->add_option("--h", h, "explicit height (overrides --a)");
      if (f == "s-grid") c->add_option("--s-grid", s_grid, "grid of s (or phi) values");
      if (f == "L") c->add_option("--L", L, "number of levels / ledger depth");
      if (f == "eta") c->add_option("--eta", eta, "type-grid resolution (1/eta integer)");
      if (f == "M") c->add_option("--M", M, "radii growth factor per level");
      if (f == "trials") c->add_option("--trials", trials, "number of trials / samples");
      if (f == "seed") c->add_option("--seed", seed, "root RNG seed");
      if (f == "workers") c->add_option("--workers", workers, "worker threads for trial farming");
      if (f == "lazy") c->add_flag("--lazy,!--no-lazy", lazy, "use the lazy kernel (default on)");
      if (f == "out") c->add_option("--out", out, "output file ('-' = stdout)");
    }
  };

  auto* cover = app.add_subcommand("cover", "cover-time trials on the thin torus");
  add_common(cover, {"n", "a", "h", "trials", "seed", "workers", "lazy", "out"});

  auto* r3 = app.add_subcommand("r3", "escape probability q and r3 = 1/(6q)");
  std::vector<std::int64_t> radii = {16, 64, 256};
  add_common(r3, {"trials", "seed", "out"});
  r3->add_option("--radii", radii, "escape radii (increasing)");

  auto* gff = app.add_subcommand("gff", "free-field sampling and the cover-time functional");
  add_common(gff, {"n", "a", "h", "trials", "seed", "out"});

  auto* resistance = app.add_subcommand("resistance", "effective resistances on torus probes");
  add_common(resistance, {"n", "a", "h", "out"});

  auto* psi = app.add_subcommand("psi", "threshold function: closed form, variational, ledger");
  int psi_L = 0;
  add_common(psi, {"s-grid", "eta", "out"});
  psi->add_option("--L", psi_L, "ledger depth (0 = skip the ledger column)");

  auto* ldp = app.add_subcommand("ldp", "excursion-count large deviations (tilted + raw)");
  double p = 0.05, kappa = 1.0, z = 0.3, wpar = 1.0, nbar = 2000;
  add_common(ldp, {"trials", "seed", "out"});
  ldp->add_option("--p", p, "per-excursion hit probability");
  ldp->add_option("--kappa", kappa, "inner-scale ratio kappa");
  ldp->add_option("--z", z, "target type z");
  ldp->add_option("--w", wpar, "conditioning type w");
  ldp->add_option("--nbar", nbar, "mean excursion count scale");

  auto* exc = app.add_subcommand("excursions", "stream excursion records (JSONL)");
  double nbar_target = 4.0;
  // the geometric schedule needs roughly n >= M^7 h at depth 1 (more when
  // deeper); default to the shallow ledger and one walk so moderate sizes
  // work out of the box
  int exc_L = 1;
  std::int64_t exc_trials = 1;
  add_common(exc, {"n", "a", "h", "M", "seed", "lazy", "out"});
  exc->add_option("--L", exc_L, "ledger depth");
  exc->add_option("--trials", exc_trials, "independent walks");
  exc->add_option("--nbar", nbar_target, "top-level excursion count that ends a trial");

  auto* scan = app.add_subcommand("scan", "bracket the cover threshold across (n, a)");
  std::vector<int> n_list = {16};
  std::vector<double> a_list = {1.0};
  std::int64_t scan_trials = 64;
  int scan_pairs = 48;
  scan->add_option("--n", n_list, "torus sizes (repeatable)");
  scan->add_option("--a", a_list, "aspects (repeatable)");
  add_common(scan, {"s-grid", "seed", "out"});
  scan->add_option("--trials", scan_trials, "witness trials per checkpoint");
  scan->add_option("--M", scan_pairs, "certificate walk pairs");

  auto* etv = app.add_subcommand("exact-tv", "exact TV mixing curve on a cycle base");
  std::int64_t horizon = 0;
  int etv_n = 4;
  add_common(etv, {"lazy", "out"});
  etv->add_option("--n", etv_n, "cycle length (state space n * 2^n)");
  etv->add_option("--horizon", horizon, "curve horizon (0 = auto)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cover->parsed())
      return cmd_cover(n, a, h, trials, seed, lazy, workers, out);
    if (r3->parsed()) return cmd_r3(trials, seed, radii, out);
    if (gff->parsed()) return cmd_gff(n, a, h, trials, seed, out);
    if (resistance->parsed()) return cmd_resistance(n, a, h > 0 ? h : 0, out);
    if (psi->parsed()) return cmd_psi(s_grid, psi_L, eta, out);
    if (ldp->parsed())
      return cmd_ldp(p, kappa, z, wpar, nbar, trials, seed, out);
    if (exc->parsed())
      return cmd_excursions(n, a, h, M, exc_L, nbar_target, exc_trials, seed,
                            lazy, out);
    if (scan->parsed()) {
      if (s_grid.empty()) s_grid = {0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
      return cmd_scan(n_list, a_list, s_grid, scan_trials, scan_pairs, seed, out);
    }
    if (etv->parsed()) return cmd_exact_tv(etv_n, horizon, lazy, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
