#pragma once
// Closed-form constants and rate functions for the thin-torus lamplighter:
// the mixing-threshold profile Psi(phi) in its closed, variational, dual and
// finite-(L,eta) discretized forms; the excursion-count large-deviation
// machinery (cumulant generating function, finite-p and limiting rate
// functions, tilted-measure estimator); and the small closed-form constants
// (hit probability per ball excursion, scale-coupling probabilities, cover
// time prediction).
//
// Everything here is deterministic numerics except ldp_estimate, which takes
// an explicit stream.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lamplab/rng.hpp"

namespace lamplab {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kPhiKink = 1.0 + kSqrt2;   // branch point of Psi
inline constexpr double kPi = 3.1415926535897932385;
inline constexpr double kC3 = 3.0 / (2.0 * kPi);   // Z^3 Green decay constant

// default escape probability / resistance constants for Z^3, used when the
// caller has no fresh Monte Carlo estimate; the estimator cross-checks them
inline constexpr double kQDefault = 0.6595;
inline constexpr double kR3Default = 1.0 / (6.0 * kQDefault);

// 2D-projection cover-time budget (3/2)(4/pi) n^2 (ln n)^2, in non-lazy
// steps; the lazy chain needs twice as many
inline double t_box_steps(double n, bool lazy) {
  double ln_n = std::log(n);
  return (lazy ? 2.0 : 1.0) * 1.5 * (4.0 / kPi) * n * n * ln_n * ln_n;
}

// Psi(phi): squared threshold location in cover-time units.
//   (1 + (1-1/sqrt2) phi)^2   for phi <= 1+sqrt2,
//   (1 + 2 phi)/2             beyond.
// The two branches touch tangentially at phi = 1+sqrt2 (value 3/2+sqrt2);
// the transition shows up in the second derivative, not the first.
inline double psi_closed(double phi) {
  if (phi < 0) throw std::invalid_argument("psi_closed: phi must be >= 0");
  const double c = 1.0 - 1.0 / kSqrt2;
  if (phi <= kPhiKink) {
    double t = 1.0 + c * phi;
    return t * t;
  }
  return 0.5 * (1.0 + 2.0 * phi);
}

struct PsiSlopes {
  double left = 0, right = 0;
};

// exact one-sided derivatives of psi_closed
inline PsiSlopes psi_closed_slopes(double phi) {
  const double c = 1.0 - 1.0 / kSqrt2;
  auto left_branch = [&](double p) { return 2.0 * c * (1.0 + c * p); };
  PsiSlopes s;
  s.left = (phi <= kPhiKink) ? left_branch(phi) : 1.0;
  s.right = (phi < kPhiKink) ? left_branch(phi) : 1.0;
  return s;
}

// one-sided second derivatives (the transition is second order)
inline PsiSlopes psi_closed_curvatures(double phi) {
  const double c = 1.0 - 1.0 / kSqrt2;
  PsiSlopes s;
  s.left = (phi <= kPhiKink) ? 2.0 * c * c : 0.0;
  s.right = (phi < kPhiKink) ? 2.0 * c * c : 0.0;
  return s;
}

// ---------------------------------------------------------------------------
// Variational form: Psi = t*^2 with t* = sup_{rho in [0,1]} h(rho) + 1 - rho,
// h(rho) = sqrt(rho (phi + rho/2)). h is strictly concave, so golden-section
// search converges to the global optimum; the optimizer is rho* =
// (sqrt2 - 1) phi, clamped to 1 past the branch point.
// ---------------------------------------------------------------------------
struct PsiVariational {
  double psi = 0, t_star = 0, rho_star = 0;
};

inline PsiVariational psi_variational(double phi, double tol = 1e-12) {
  auto f = [phi](double rho) {
    return std::sqrt(rho * (phi + 0.5 * rho)) + 1.0 - rho;
  };
  double a = 0.0, b = 1.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  PsiVariational out;
  out.rho_star = 0.5 * (a + b);
  out.t_star = f(out.rho_star);
  out.psi = out.t_star * out.t_star;
  return out;
}

// ---------------------------------------------------------------------------
// The two exponents driving the threshold problem, at time parameter s:
//   b_rho(z)     = 1 - rho - s (1-z)^2 / (1-rho)      (b_1 = -inf off z=1)
//   alpha_rho(z) = s z^2 / (rho/2 + phi)
// ---------------------------------------------------------------------------
struct BAlpha {
  double b = 0, alpha = 0;
};

inline double alpha_exponent(double rho, double z, double s, double phi) {
  return s * z * z / (0.5 * rho + phi);
}

inline BAlpha b_alpha(double rho, double z, double s, double phi) {
  if (rho < 0 || rho > 1) throw std::invalid_argument("b_alpha: rho outside [0,1]");
  BAlpha out;
  out.alpha = alpha_exponent(rho, z, s, phi);
  if (rho == 1.0)
    out.b = (z == 1.0) ? 0.0 : -std::numeric_limits<double>::infinity();
  else
    out.b = 1.0 - rho - s * (1.0 - z) * (1.0 - z) / (1.0 - rho);
  return out;
}

// smoothing identity: inf_{z <= w} { alpha_0(z) + 2 s (w-z)^2 / rho } equals
// alpha_rho(w), with the infimum at z* = 2 phi w / (rho + 2 phi)
inline double alpha_smoothed_bruteforce(double rho, double w, double s, double phi,
                                        int grid = 200001) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    double z = w * static_cast<double>(i) / (grid - 1);
    double v = s * z * z / phi + 2.0 * s * (w - z) * (w - z) / rho;
    best = std::min(best, v);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Dual characterizations of Psi. The infimum form asks for the least s >= 1
// such that b_rho(z) >= 0 forces alpha_rho(z) >= rho; the supremum form for
// the greatest s >= 1 admitting a witness pair with b_rho(z) >= 0 and
// alpha_rho(z) <= rho. They agree with psi_closed.
// ---------------------------------------------------------------------------
namespace detail {
// largest violation of the implication at a given s: max over rho of
// rho - alpha_rho(z_min), where z_min is the smallest z with b_rho(z) >= 0
inline double implication_violation(double s, double phi, int grid) {
  double sq = std::sqrt(s);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid; ++i) {
    double rho = static_cast<double>(i) / grid;
    double zmin = (rho == 1.0) ? 1.0 : std::max(0.0, 1.0 - (1.0 - rho) / sq);
    if (zmin > 1.0) continue;  // no admissible z at this rho
    worst = std::max(worst, rho - alpha_exponent(rho, zmin, s, phi));
  }
  return worst;
}
}  // namespace detail

inline double psi_inf_form(double phi, double tol = 1e-9, int grid = 20000) {
  double lo = 1.0, hi = 1.0;
  if (detail::implication_violation(lo, phi, grid) <= 0) return lo;
  while (detail::implication_violation(hi, phi, grid) > 0) hi *= 2.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (detail::implication_violation(mid, phi, grid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double psi_sup_form(double phi, double tol = 1e-9, int grid = 20000) {
  // for each rho the witness survives while sqrt(s) <= 1 - rho + h(rho);
  // take the best rho by scan plus local ternary refinement
  auto edge = [phi](double rho) {
    return 1.0 - rho + std::sqrt(rho * (phi + 0.5 * rho));
  };
  double best = 1.0, best_rho = 0.0;
  for (int i = 0; i <= grid; ++i) {
    double rho = static_cast<double>(i) / grid;
    if (double e = edge(rho); e > best) {
      best = e;
      best_rho = rho;
    }
  }
  double a = std::max(0.0, best_rho - 2.0 / grid);
  double b = std::min(1.0, best_rho + 2.0 / grid);
  while (b - a > tol) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (edge(m1) < edge(m2))
      a = m1;
    else
      b = m2;
  }
  double e = std::max(1.0, edge(0.5 * (a + b)));
  return e * e;
}

// ---------------------------------------------------------------------------
// Finite-resolution threshold Psi_{L,eta}: the least s >= 1 such that every
// admissible grid profile z = (z_0,...,z_{L-1}, 1) satisfies the ledger
// inequality gamma_m(z) >= eta for all m = 0..L, where
//   gamma_m(z) = alpha_0((z_0 - 4 eta)_+) - m eta - 1/L
//                - sum_{k=1}^m [ 1/L - 2 s L ((z_k - z_{k-1} - 2 eta)_+)^2 ]
// and a profile is admissible when sqrt(s) <= (1 - k/L)/(1 - z_k) for every
// k < L with z_k < 1. Monotone in s, so bisection applies. The grid is
// {0, 1/K, ..., 1} with K = round(1/eta).
// ---------------------------------------------------------------------------
struct PsiGridCell {
  std::vector<double> profile;  // z_0..z_L, the binding profile at the last
  double gamma = 0;             // infeasible s probed (diagnostic)
  int m = 0;
};

inline double psi_L_eta(double phi, int L, double eta, double tol = 1e-4,
                        PsiGridCell* binding = nullptr) {
  if (L < 1) throw std::invalid_argument("psi_L_eta: L must be >= 1");
  if (!(eta > 0 && eta < 0.5)) throw std::invalid_argument("psi_L_eta: eta outside (0, 0.5)");
  const int K = static_cast<int>(std::lround(1.0 / eta));
  if (std::abs(K * eta - 1.0) > 1e-9)
    throw std::invalid_argument("psi_L_eta: 1/eta must be an integer");
  if (std::pow(static_cast<double>(K + 1), static_cast<double>(L)) > 1e7)
    throw std::invalid_argument(
        "psi_L_eta: profile grid has ~" +
        std::to_string(std::pow(static_cast<double>(K + 1), static_cast<double>(L))) +
        " cells, above the 1e7 enumeration cap");
  std::vector<double> gridv(K + 1);
  for (int i = 0; i <= K; ++i) gridv[i] = static_cast<double>(i) / K;
  const double eta_eff = 1.0 / K;

  std::vector<double> z(L + 1, 0.0);
  z[L] = 1.0;

  auto feasible = [&](double s, PsiGridCell* cell) {
    const double sq = std::sqrt(s);
    std::vector<int> idx(L, 0);
    while (true) {
      for (int k = 0; k < L; ++k) z[k] = gridv[idx[k]];
      bool adm = true;
      for (int k = 0; k < L && adm; ++k) {
        if (z[k] >= 1.0) continue;
        double rho = static_cast<double>(k) / L;
        if (sq > (1.0 - rho) / (1.0 - z[k]) + 1e-15) adm = false;
      }
      if (adm) {
        double z0c = std::max(z[0] - 4.0 * eta_eff, 0.0);
        double gamma = s * z0c * z0c / phi - 1.0 / L;
        for (int m = 0; m <= L; ++m) {
          if (m > 0) {
            double inc = std::max(z[m] - z[m - 1] - 2.0 * eta_eff, 0.0);
            gamma -= eta_eff + 1.0 / L - 2.0 * s * L * inc * inc;
          }
          if (gamma < eta_eff) {
            if (cell) {
              cell->profile = z;
              cell->gamma = gamma;
              cell->m = m;
            }
            return false;
          }
        }
      }
      // next profile
      int k = 0;
      while (k < L && ++idx[k] > K) idx[k++] = 0;
      if (k == L) break;
    }
    return true;
  };

  double lo = 1.0, hi = 1.0;
  if (feasible(lo, nullptr)) return lo;
  while (!feasible(hi, nullptr)) hi *= 2.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid, nullptr) ? hi : lo) = mid;
  }
  if (binding) feasible(lo, binding);
  return 0.5 * (lo + hi);
}

// Structural reduction of the same threshold to constant-increment profiles:
// least t >= 1 with (t - (1-rho) d - rho D)^2 >= phi rho (1 - 2 D^2) + phi/L
// for all d, D in [0,1] and rho in {1/L, ..., 1}. Returns t^2 for comparison
// against psi_L_eta as eta -> 0.
inline double psi_L_reduced(double phi, int L, double tol = 1e-7) {
  auto ok = [&](double t) {
    // m = 0: the D term drops out and the worst d is 1
    if ((t - 1.0) * (t - 1.0) < phi / L - 1e-12) return false;
    for (int m = 1; m <= L; ++m) {
      double rho = static_cast<double>(m) / L;
      const int G = 400;
      for (int i = 0; i <= G; ++i)
        for (int j = 0; j <= G; ++j) {
          double d = static_cast<double>(i) / G, D = static_cast<double>(j) / G;
          double lhs = t - (1.0 - rho) * d - rho * D;
          if (lhs * lhs < phi * rho * (1.0 - 2.0 * D * D) + phi / L - 1e-12)
            return false;
        }
    }
    return true;
  };
  double lo = 1.0, hi = 1.0;
  if (ok(lo)) return 1.0;
  while (!ok(hi)) hi *= 2.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  double t = 0.5 * (lo + hi);
  return t * t;
}

// ---------------------------------------------------------------------------
// Excursion-count LDP machinery. A scale coupling contributes
//   Z = sum_{i=1}^{round(w^2 nbar)} J_i (1 + Y_i),  J ~ Bern(p), Y ~ Geom(p'),
// with cumulant transform (of e^{-theta Z} per summand)
//   Lambda_{p,p'}(theta) = ln(1 - p + p p' / (e^theta - 1 + p')).
// ---------------------------------------------------------------------------
inline double mgf_lambda(double p, double pp, double theta) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("mgf_lambda: p outside (0,1)");
  if (!(pp > 0 && pp <= 1)) throw std::invalid_argument("mgf_lambda: p' outside (0,1]");
  if (theta < 0) throw std::invalid_argument("mgf_lambda: theta must be >= 0");
  return std::log(1.0 - p + p * pp / (std::expm1(theta) + pp));
}

inline double mgf_lambda_deriv(double p, double pp, double theta) {
  double D = std::expm1(theta) + pp;
  double inner = 1.0 - p + p * pp / D;
  return -p * pp * std::exp(theta) / (D * D * inner);
}

// limiting rate: lim_{p->0} I_{p,kappa p}(z,w) = -(w - sqrt(kappa) z)^2
inline double rate_I_limit(double kappa, double z, double w) {
  if (!(z > 0) || w < std::sqrt(kappa) * z)
    throw std::invalid_argument("rate_I_limit: need w >= sqrt(kappa) z > 0");
  double g = w - std::sqrt(kappa) * z;
  return -g * g;
}

// finite-p rate: I_{p,kappa p}(z,w) = (1/p) inf_{theta>=0} z^2 theta + w^2 Lambda
inline double rate_I_finite(double p, double kappa, double z, double w,
                            double* theta_opt = nullptr) {
  double pp = kappa * p;
  auto fprime = [&](double th) {
    return z * z + w * w * mgf_lambda_deriv(p, pp, th);
  };
  if (fprime(0.0) >= 0) {
    if (theta_opt) *theta_opt = 0.0;
    return 0.0;
  }
  double lo = 0.0, hi = 1.0;
  while (fprime(hi) < 0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (fprime(mid) < 0 ? lo : hi) = mid;
  }
  double th = 0.5 * (lo + hi);
  if (theta_opt) *theta_opt = th;
  return (z * z * th + w * w * mgf_lambda(p, pp, th)) / p;
}

// tilt parameter: the theta with Lambda'_{p,kappa p}(theta_p) = -(z/w)^2;
// theta_p / p -> sqrt(kappa) w/z - kappa as p -> 0
inline double theta_p_solve(double p, double kappa, double z, double w) {
  double pp = kappa * p;
  double target = -(z / w) * (z / w);
  auto g = [&](double th) { return mgf_lambda_deriv(p, pp, th) - target; };
  if (g(0.0) >= 0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (g(hi) < 0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Monte Carlo estimate of P[Z <= z^2 nbar]. Default mode samples under the
// exponentially tilted law at theta_p and reweights (importance sampling);
// raw mode counts plain frequencies and flags undersampling when no event is
// seen. Empirical rate is log P / (p nbar).
// ---------------------------------------------------------------------------
struct LdpResult {
  double p_hat = 0, se = 0;
  double log_p = 0, rate = 0, se_rate = 0;
  double theta = 0;
  std::int64_t hits = 0;
  bool undersampled = false;
};

inline LdpResult ldp_estimate(double p, double kappa, double z, double w,
                              double nbar, std::int64_t trials,
                              std::uint64_t seed, bool tilted = true) {
  if (trials <= 0) throw std::invalid_argument("ldp_estimate: trials must be > 0");
  const double pp = kappa * p;
  const auto m = static_cast<std::int64_t>(std::llround(w * w * nbar));
  const double thresh = z * z * nbar;
  const std::uint64_t eid = experiment_id(tilted ? "ldp-tilted" : "ldp-raw");

  LdpResult res;
  double theta = 0, lam = 0, p_hit = p, beta = 1.0 - pp;
  if (tilted) {
    theta = theta_p_solve(p, kappa, z, w);
    lam = mgf_lambda(p, pp, theta);
    double D = std::expm1(theta) + pp;
    double z0 = 1.0 - p + p * pp / D;
    p_hit = p * (pp / D) / z0;
    beta = (1.0 - pp) * std::exp(-theta);
  }
  res.theta = theta;

  double sum = 0, sum2 = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Rng rng(seed, eid, static_cast<std::uint64_t>(trial));
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < m; ++i) {
      if (rng.u01() < p_hit) {
        std::int64_t v = 1;
        if (beta > 0) {
          double u = rng.u01();
          while (u <= 0) u = rng.u01();
          v += static_cast<std::int64_t>(std::floor(std::log(u) / std::log(beta)));
        }
        total += v;
      }
    }
    double wgt = 0;
    if (static_cast<double>(total) <= thresh) {
      wgt = tilted ? std::exp(theta * static_cast<double>(total) +
                              static_cast<double>(m) * lam)
                   : 1.0;
      ++res.hits;
    }
    sum += wgt;
    sum2 += wgt * wgt;
  }
  double n = static_cast<double>(trials);
  res.p_hat = sum / n;
  // (sum2/n - mean^2)/(n-1) is the sample variance of the mean itself
  double var = std::max(0.0, (sum2 / n - res.p_hat * res.p_hat) / (n - 1.0));
  res.se = std::sqrt(var);
  res.undersampled = (!tilted && res.hits == 0);
  if (res.p_hat > 0) {
    res.log_p = std::log(res.p_hat);
    res.rate = res.log_p / (p * nbar);
    res.se_rate = res.se / res.p_hat / (p * nbar);
  } else {
    res.log_p = -std::numeric_limits<double>::infinity();
    res.rate = -std::numeric_limits<double>::infinity();
    res.se_rate = std::numeric_limits<double>::infinity();
  }
  return res;
}

// ---------------------------------------------------------------------------
// Small closed forms.
// ---------------------------------------------------------------------------

// per-excursion probability that a ball excursion pins the trap vertex:
// Delta = c3 q / r'
inline double hitting_delta(double q, double r_prime) {
  if (!(q > 0 && q < 1) || !(r_prime > 0))
    throw std::invalid_argument("hitting_delta: need q in (0,1), r' > 0");
  return kC3 * q / r_prime;
}

// typical excursion counts at time parameter s
struct TypicalCounts {
  double nbar_c = 0;  // cylinder excursions: 2 s (ln n)^2 / ln(R/R')
  double nbar_b = 0;  // ball excursions:     4 s r' ln n / a
  double f_bc = 0;    // ratio nbar_b / nbar_c
};

inline TypicalCounts typical_counts(double s, double n, double R, double Rp,
                                    double r_prime, double a) {
  if (!(R > Rp && Rp > 0)) throw std::invalid_argument("typical_counts: need R > R' > 0");
  TypicalCounts out;
  double ln_n = std::log(n);
  out.nbar_c = 2.0 * s * ln_n * ln_n / std::log(R / Rp);
  out.nbar_b = 4.0 * s * r_prime * ln_n / a;
  out.f_bc = out.nbar_b / out.nbar_c;
  return out;
}

// the exact cancellation Delta z^2 nbar_B = alpha(z) ln n (both sides returned)
struct AlphaIdentity {
  double lhs = 0, rhs = 0, residual = 0;
};

inline AlphaIdentity alpha_identity(double q, double r_prime, double z, double s,
                                    double a, double n) {
  AlphaIdentity out;
  double ln_n = std::log(n);
  double nbar_b = 4.0 * s * r_prime * ln_n / a;
  out.lhs = hitting_delta(q, r_prime) * z * z * nbar_b;
  double r3 = 1.0 / (6.0 * q);
  double phi = kPi * r3 * a;
  out.rhs = (s * z * z / phi) * ln_n;
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

// scale-coupling success probabilities between cylinder levels k < j of the
// standard schedule, plus the limit 2s/(rho_j - rho_k) they should approach
// after scaling by nbar_C / ln n
struct TwoDConstants {
  double p_kj = 0, p_jk = 0;
  double nbar_c = 0;
  double scaled_kj = 0, scaled_jk = 0;
  double limit = 0;
};

inline TwoDConstants two_d_constants(double n, int L, int M, double h, int k,
                                     int j, double s) {
  if (!(k >= 0 && k < j && j <= L))
    throw std::invalid_argument("two_d_constants: need 0 <= k < j <= L");
  auto rpp_of = [&](int lvl) {
    if (lvl == 0) return h;
    if (lvl < L) return std::pow(n, static_cast<double>(lvl) / L) * h;
    return n / std::pow(static_cast<double>(M), 5.0);
  };
  double Rk = M * static_cast<double>(M) * rpp_of(k), Rpk = M * rpp_of(k);
  double Rj = M * static_cast<double>(M) * rpp_of(j), Rpj = M * rpp_of(j);
  double denom = std::log(Rj) - std::log(Rpk);
  if (denom <= 0) throw std::invalid_argument("two_d_constants: degenerate level pair");
  TwoDConstants out;
  out.p_kj = (std::log(Rk) - std::log(Rpk)) / denom;
  out.p_jk = (std::log(Rj) - std::log(Rpj)) / denom;
  double ln_n = std::log(n);
  out.nbar_c = 2.0 * s * ln_n * ln_n / std::log(Rk / Rpk);
  out.scaled_kj = out.p_kj * out.nbar_c / ln_n;
  out.scaled_jk = out.p_jk * out.nbar_c / ln_n;
  out.limit = 2.0 * s / ((static_cast<double>(j) - k) / L);
  return out;
}

// cover-time prediction: t_cov ~ (1 + 2 phi) t_box with phi = pi r3 a and
// t_box = (3/2)(4/pi) n^2 (ln n)^2 in non-lazy steps (doubled when lazy)
struct CoverPrediction {
  double phi = 0;
  double t_box = 0;     // 2D-projection budget in the chosen convention
  double cover = 0;     // (1+2 phi) t_box
  double ratio = 0;     // cover / t_box = 1 + 2 phi
  double psi = 0;       // Psi(phi)
  double t_mix = 0;     // Psi(phi) t_box
};

inline CoverPrediction cover_prediction(double n, double a, double r3, bool lazy) {
  CoverPrediction out;
  out.phi = kPi * r3 * a;
  out.t_box = t_box_steps(n, lazy);
  out.ratio = 1.0 + 2.0 * out.phi;
  out.cover = out.ratio * out.t_box;
  out.psi = psi_closed(out.phi);
  out.t_mix = out.psi * out.t_box;
  return out;
}

}  // namespace lamplab
