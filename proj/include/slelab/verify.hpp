#pragma once

// Self-check suite: twelve numbered end-to-end criteria comparing the
// simulators against closed forms, quadrature oracles, cross-method estimates,
// and qualitative decay/uniqueness properties.  The `budget` knob scales the
// Monte Carlo sample counts (1.0 = full depth); deterministic checks ignore
// it.  Every criterion reports pass/fail plus a one-line numeric summary.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slelab/bessel.hpp"
#include "slelab/experiments.hpp"
#include "slelab/geometry.hpp"
#include "slelab/loewner.hpp"
#include "slelab/params.hpp"
#include "slelab/stats.hpp"

namespace slelab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct VerifyOptions {
  double budget = 1.0;  // fraction of the full sample counts
  std::uint64_t master_seed = 20260825;
  unsigned n_threads = 0;
};

namespace detail_verify {

inline std::uint64_t scaled(std::uint64_t full, double budget,
                            std::uint64_t floor_n) {
  const long long v = std::llround(static_cast<double>(full) * budget);
  if (v < static_cast<long long>(floor_n)) return floor_n;
  return static_cast<std::uint64_t>(v);
}

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

inline DrivingPath zero_driving(double dt, double t_end) {
  DrivingPath U;
  U.dt = dt;
  const auto cells = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  U.values.assign(cells + 1, 0.0);
  return U;
}

// --- 1: with zero driving the angle flow has the closed form
//        cos X_t = e^{-a t} cos X_0.
inline CriterionResult c1(const VerifyOptions&) {
  CriterionResult r{1, "closed-form-angle-flow", false, "", 0};
  const double dt = 1e-4, t_end = 5.0, tol = 1e-8;
  const DrivingPath U = zero_driving(dt, t_end);
  double worst = 0;
  for (double a : {0.5, 1.0})
    for (double x0 : {kPi / 3.0, kPi / 2.0, 0.75 * kPi}) {
      const AngleFlow af = boundary_angle_flow(U, a, x0, t_end);
      if (af.swallowed) {
        r.detail = "unexpected swallowing (a=" + fmt(a) + ", x0=" + fmt(x0) +
                   ")";
        return r;
      }
      for (std::size_t i = 0; i < af.t.size(); ++i) {
        const double want = std::exp(-a * af.t[i]) * std::cos(x0);
        worst = std::max(worst, std::fabs(std::cos(af.x[i]) - want));
      }
    }
  r.pass = worst <= tol;
  r.detail = "max deviation " + fmt(worst) + " (tol " + fmt(tol) + ")";
  return r;
}

// --- 2: Monte Carlo two-barrier exit probability vs the scale-function
//        oracle, including the beta = 1 closed form 1/3.
inline CriterionResult c2(const VerifyOptions& v) {
  CriterionResult r{2, "exit-prob-oracle", false, "", 0};
  const std::uint64_t n = scaled(100000, v.budget, 2000);
  const double x = kPi / 3.0, eps = kPi / 6.0, dt = 1e-4;
  const double closed = 1.0 / 3.0;
  const double quad = exit_prob_exact(1.0, x, eps);
  if (std::fabs(quad - closed) > 1e-12) {
    r.detail = "quadrature vs closed form mismatch: " + fmt(quad);
    return r;
  }
  bool ok = true;
  std::string d;
  for (double beta : {1.0, 0.75, 2.0}) {
    const double exact = (beta == 1.0) ? closed : exit_prob_exact(beta, x, eps);
    const McEstimate est =
        mc_exit_prob(beta, x, eps, n, dt, v.master_seed,
                     "accept-c2/beta=" + fmt(beta));
    const double tol = std::max(3.0 * est.stderr_mean, 0.01);
    const double err = std::fabs(est.mean - exact);
    ok = ok && err <= tol;
    d += "beta=" + fmt(beta) + ": |" + fmt(est.mean) + "-" + fmt(exact) +
         "|=" + fmt(err) + " tol " + fmt(tol) + "; ";
  }
  r.pass = ok;
  r.detail = d + "n=" + std::to_string(n);
  return r;
}

// --- 3: quadrature scale function vs closed forms for beta = 1, 2.
inline CriterionResult c3(const VerifyOptions&) {
  CriterionResult r{3, "scale-function-quadrature", false, "", 0};
  const double tol = 1e-10;
  double worst = 0;
  for (int i = 1; i <= 50; ++i) {
    const double x = 0.01 + (0.5 * kPi - 0.01) * i / 50.0;
    const double c = std::cos(x) / std::sin(x);
    worst = std::max(worst, std::fabs(exact_F(1.0, x) - c));
    worst = std::max(worst, std::fabs(exact_F(2.0, x) - (c + c * c * c / 3.0)));
  }
  r.pass = worst <= tol;
  r.detail = "max deviation " + fmt(worst) + " over 50 points (tol " +
             fmt(tol) + ")";
  return r;
}

// --- 4: tail of the running minimum of sin X: fitted log-log slope near
//        2 beta - 1 = 1 for beta = 1.
inline CriterionResult c4(const VerifyOptions& v) {
  CriterionResult r{4, "boundary-tail-exponent", false, "", 0};
  const std::uint64_t n = scaled(100000, v.budget, 4000);
  const std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125};
  const BesselTailResult res = bessel_exponent_experiment(
      1.0, kPi / 2.0, 1.0, eps, n, 1e-4, v.master_seed, "accept-c4", {},
      v.n_threads);
  if (!res.fit) {
    r.detail = "a tail frequency was zero; no fit";
    return r;
  }
  const double err = std::fabs(res.fit->slope - 1.0);
  r.pass = err <= 0.2;
  r.detail = "slope " + fmt(res.fit->slope) + " vs 1 (tol 0.2), n=" +
             std::to_string(n);
  return r;
}

// --- 5: importance-sampling consistency: P_{beta=1}{X at (1 ^ stop) > pi/2}
//        by direct simulation and by reweighted beta = 0 simulation.
inline CriterionResult c5(const VerifyOptions& v) {
  CriterionResult r{5, "reweighting-consistency", false, "", 0};
  const std::uint64_t n = scaled(100000, v.budget, 4000);
  const double x0 = kPi / 2.0, t0 = 1.0, stop = 0.3, dt = 1e-4;
  const auto f = [](const PathEnd& e) { return e.x_end > kPi / 2.0 ? 1.0 : 0.0; };
  const McEstimate direct = girsanov_reweight(1.0, 1.0, x0, t0, stop, n, dt,
                                              v.master_seed, "accept-c5-direct",
                                              f);
  const McEstimate rew = girsanov_reweight(0.0, 1.0, x0, t0, stop, n, dt,
                                           v.master_seed, "accept-c5-reweight",
                                           f);
  const double tol = 3.0 * std::hypot(direct.stderr_mean, rew.stderr_mean);
  const double err = std::fabs(direct.mean - rew.mean);
  r.pass = err <= tol;
  r.detail = "direct " + fmt(direct.mean) + " vs reweighted " + fmt(rew.mean) +
             ", |diff|=" + fmt(err) + " tol " + fmt(tol) + ", n=" +
             std::to_string(n);
  return r;
}

// --- 6: normalization of the stopped change-of-measure weight under the
//        driftless law: sample mean of M_T / M_0 near 1.
inline CriterionResult c6(const VerifyOptions& v) {
  CriterionResult r{6, "martingale-normalization", false, "", 0};
  const std::uint64_t n = scaled(100000, v.budget, 4000);
  const double x0 = kPi / 2.0, t0 = 1.0, stop = 0.3, dt = 1e-4;
  const auto one = [](const PathEnd&) { return 1.0; };
  bool ok = true;
  std::string d;
  for (double beta : {0.5, 1.0, 2.0}) {
    const McEstimate est = girsanov_reweight(0.0, beta, x0, t0, stop, n, dt,
                                             v.master_seed,
                                             "accept-c6/beta=" + fmt(beta),
                                             one);
    const double tol = 3.0 * est.stderr_mean;
    const double err = std::fabs(est.mean - 1.0);
    ok = ok && err <= tol;
    d += "beta=" + fmt(beta) + ": mean " + fmt(est.mean) + " tol " + fmt(tol) +
         "; ";
  }
  r.pass = ok;
  r.detail = d + "n=" + std::to_string(n);
  return r;
}

// --- 7: first times at dyadic radii sandwiched by the distortion bounds
//        (n - ln4)/(2a) <= rho_n <= n/(2a), with grid + 1% slack.
inline CriterionResult c7(const VerifyOptions& v) {
  CriterionResult r{7, "radius-time-sandwich", false, "", 0};
  const std::uint64_t m = scaled(200, v.budget, 20);
  const SleParams params = make_params(3.0, Variant::Radial);
  const double a = params.a;
  const double dt = 1e-4;
  const std::size_t stride = 10;
  const double horizon = (5.0 / (2.0 * a)) * 1.02 + 2.0 * dt;
  const double grid = dt * static_cast<double>(stride);

  std::vector<std::array<double, 5>> rho(m);
  std::vector<unsigned char> found(m, 1);
  parallel_for_samples(
      m,
      [&](std::uint64_t i) {
        Rng rng(v.master_seed, "accept-c7", i);
        const CoSimResult sim =
            co_simulate_driving(params, kPi / 2.0, horizon, dt, rng);
        TraceOptions topt;
        topt.stride = stride;
        topt.n_threads = 1;
        const TraceCurve curve = trace_curve(sim.U, a, topt);
        for (int nn = 1; nn <= 5; ++nn) {
          const auto t = first_radius_time(curve, nn);
          if (!t) {
            found[i] = 0;
            return;
          }
          rho[i][nn - 1] = *t;
        }
      },
      v.n_threads);

  int bad = 0;
  double worst_excess = 0;
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!found[i]) {
      ++bad;
      continue;
    }
    for (int nn = 1; nn <= 5; ++nn) {
      const double lo = (nn - std::log(4.0)) / (2.0 * a);
      const double up = nn / (2.0 * a);
      const double lo_slack = grid + 0.01 * std::fabs(lo);
      const double up_slack = grid + 0.01 * up;
      const double t = rho[i][nn - 1];
      if (t < lo - lo_slack || t > up + up_slack) {
        ++bad;
        worst_excess = std::max(
            worst_excess, std::max(lo - lo_slack - t, t - up - up_slack));
      }
    }
  }
  r.pass = bad == 0;
  r.detail = std::to_string(m) + " curves, violations " + std::to_string(bad) +
             (bad ? ", worst excess " + fmt(worst_excess) : std::string());
  return r;
}

// --- 8: crosscut-hitting frequency vs arc diameter: fitted slope near
//        alpha = 8/kappa - 1 for kappa in {8/3, 6}, all frequencies positive.
inline CriterionResult c8(const VerifyOptions& v) {
  CriterionResult r{8, "crosscut-hit-exponent", false, "", 0};
  const std::vector<double> radii{0.4, 0.2, 0.1, 0.05};
  bool ok = true;
  std::string d;
  for (double kappa : {8.0 / 3.0, 6.0}) {
    CurveBatchConfig cfg;
    cfg.kappa = kappa;
    cfg.variant = Variant::Radial;
    cfg.theta0 = kPi / 2.0;
    // At alpha = 2 the smallest mandated radius has hit probability ~1e-4,
    // so the nominal 2000-path budget expects well under one event there and
    // the slope estimate carries a standard error of ~1 -- no statistical
    // power.  The conformal estimator costs ~3 ms per path, so the steep leg
    // runs 200k paths (slope s.e. ~0.12) within the intended runtime; the
    // shallow leg keeps the nominal count, which already resolves its slope
    // to ~0.04.
    cfg.n_samples = kappa < 4.0 ? scaled(200000, v.budget, 4000)
                                : scaled(2000, v.budget, 200);
    cfg.master_seed = v.master_seed;
    cfg.experiment_id = "accept-c8/kappa=" + fmt(kappa);
    cfg.n_threads = v.n_threads;
    cfg.dt = 1e-4;
    const double alpha = 8.0 / kappa - 1.0;
    const CrosscutExponentResult res =
        crosscut_exponent_experiment(cfg, kPi, radii, 6);
    if (!res.fit) {
      ok = false;
      d += "kappa=" + fmt(kappa) + ": zero frequency, no fit; ";
      continue;
    }
    double c_star = 0;
    for (std::size_t q = 0; q < radii.size(); ++q)
      c_star = std::max(c_star,
                        res.freq[q].mean / std::pow(radii[q], alpha));
    const double err = std::fabs(res.fit->slope - alpha);
    const bool this_ok = err <= 0.4 && std::isfinite(c_star) && c_star > 0;
    ok = ok && this_ok;
    d += "kappa=" + fmt(kappa) + ": slope " + fmt(res.fit->slope) + " vs " +
         fmt(alpha) + " (tol 0.4), c=" + fmt(c_star) + "; ";
  }
  r.pass = ok;
  r.detail = d;
  return r;
}

// --- 9: truncated deep-return probabilities are nonincreasing in depth and
//        at least halve from n = 1 to n = 3.
inline CriterionResult c9(const VerifyOptions& v) {
  CriterionResult r{9, "deep-return-decay", false, "", 0};
  bool ok = true;
  std::string d;
  for (Variant var : {Variant::Radial, Variant::TwoSidedRadial}) {
    CurveBatchConfig cfg;
    cfg.kappa = 3.0;
    cfg.variant = var;
    cfg.theta0 = kPi / 2.0;
    cfg.n_samples = scaled(2000, v.budget, 200);
    cfg.master_seed = v.master_seed;
    cfg.experiment_id = std::string("accept-c9/") + variant_name(var);
    cfg.dt = 1e-3;
    cfg.trace_stride = 10;
    cfg.n_threads = v.n_threads;
    const ReturnProbResult res =
        return_prob_experiment(cfg, 1, {1, 2, 3}, 6);
    const auto& q = res.q;
    const double s01 = std::hypot(q[0].stderr_mean, q[1].stderr_mean);
    const double s12 = std::hypot(q[1].stderr_mean, q[2].stderr_mean);
    const bool mono = q[0].mean >= q[1].mean - 3.0 * s01 &&
                      q[1].mean >= q[2].mean - 3.0 * s12;
    const bool halved = q[0].mean > 0 && q[2].mean < 0.5 * q[0].mean;
    ok = ok && mono && halved;
    d += std::string(variant_name(var)) + ": q=[" + fmt(q[0].mean) + ", " +
         fmt(q[1].mean) + ", " + fmt(q[2].mean) + "]" +
         (mono ? "" : " not monotone") + (halved ? "" : " q3 >= q1/2") + "; ";
  }
  r.pass = ok;
  r.detail = d;
  return r;
}

// --- 10: harmonic length of boundary arcs on the zero-driving slit vs the
//         walk-on-spheres estimate, plus the exact full-disk case.
inline CriterionResult c10(const VerifyOptions& v) {
  CriterionResult r{10, "harmonic-length-cross-check", false, "", 0};
  // Full disk: no curve, length must equal the normalized arc span.
  {
    const DrivingPath U0 = zero_driving(1e-3, 1e-3);
    double worst = 0;
    for (double s : {0.25, 0.6}) {
      const HarmonicArc arc{0, 1.0, 1.0 + 2.0 * kPi * s};
      const HarmonicLengths hl = harmonic_lengths(U0, 0.5, 0.0, arc);
      worst = std::max(worst, std::fabs(hl.L - s));
    }
    if (worst > 1e-6) {
      r.detail = "full-disk case off by " + fmt(worst) + " (tol 1e-06)";
      return r;
    }
  }

  // Zero-driving slit, stopped when the tip first reaches radius e^{-2}.
  const double a = 0.5, dt = 2e-4;
  const double horizon = 2.0 / (2.0 * a) + 2.0 * dt;
  const DrivingPath U = zero_driving(dt, horizon);
  TraceOptions topt;
  topt.n_threads = v.n_threads;
  const TraceCurve fine = trace_curve(U, a, topt);
  const auto rho2 = first_radius_time(fine, 2);
  if (!rho2) {
    r.detail = "slit tip never reached e^{-2}";
    return r;
  }
  // Coarse copy of the (straight) slit for the walk-on-spheres walls.
  TraceCurve coarse;
  for (std::size_t i = 0; i < fine.t.size(); i += 40) {
    coarse.t.push_back(fine.t[i]);
    coarse.z.push_back(fine.z[i]);
  }
  if (coarse.t.back() != fine.t.back()) {
    coarse.t.push_back(fine.t.back());
    coarse.z.push_back(fine.z.back());
  }

  const std::uint64_t walks = scaled(10000, v.budget, 2000);
  bool ok = true;
  std::string d;
  int idx = 0;
  const std::array<std::pair<double, double>, 3> test_arcs{
      {{kPi / 2.0, kPi}, {kPi / 3.0, 5.0 * kPi / 3.0}, {0.4, 1.9}}};
  for (const auto& pr : test_arcs) {
    const HarmonicArc arc{0, pr.first, pr.second};
    const HarmonicLengths hl = harmonic_lengths(U, a, *rho2, arc);
    const McEstimate wos = brownian_harmonic_measure(
        coarse, *rho2, boundary_target(pr.first, pr.second), cplx{0, 0}, walks,
        2e-4, v.master_seed, "accept-c10/arc=" + std::to_string(idx));
    const double tol = 3.0 * wos.stderr_mean;
    const double err = std::fabs(hl.L - wos.mean);
    ok = ok && err <= tol;
    d += "arc" + std::to_string(idx) + ": L=" + fmt(hl.L) + " wos=" +
         fmt(wos.mean) + " tol " + fmt(tol) + "; ";
    ++idx;
  }
  r.pass = ok;
  r.detail = d + "walks=" + std::to_string(walks);
  return r;
}

// --- 11: reset-chain tail: simulation vs exact dynamic programming, and the
//         exact values decay with the step count.
inline CriterionResult c11(const VerifyOptions& v) {
  CriterionResult r{11, "reset-chain-oracle", false, "", 0};
  const std::uint64_t n_samples = scaled(100000, v.budget, 5000);
  bool ok = true;
  std::string d;
  std::vector<double> exact_vals;
  for (int n : {4, 8, 12}) {
    const std::vector<double> eps = geometric_eps(0.5, n);
    const MarkovTailResult res = markov_return_tail(
        eps, n, n_samples, v.master_seed,
        "accept-c11/n=" + std::to_string(n), v.n_threads);
    exact_vals.push_back(res.exact);
    const double tol = 3.0 * std::max(res.mc.stderr_mean, 1e-12);
    const double err = std::fabs(res.mc.mean - res.exact);
    ok = ok && err <= tol;
    d += "n=" + std::to_string(n) + ": dp " + fmt(res.exact) + " mc " +
         fmt(res.mc.mean) + "; ";
  }
  const bool decay =
      exact_vals[2] < exact_vals[1] && exact_vals[1] < exact_vals[0];
  ok = ok && decay;
  r.pass = ok;
  r.detail = d + (decay ? "decay ok" : "no decay");
  return r;
}

// --- 12: uniqueness of the access crosscut: whenever the trace stays inside
//         the larger disk between two depth times, removing exactly one
//         surviving arc disconnects the origin from that disk's rim.
inline CriterionResult c12(const VerifyOptions& v) {
  CriterionResult r{12, "access-crosscut-uniqueness", false, "", 0};
  const std::uint64_t target = scaled(100, v.budget, 10);
  const std::uint64_t curve_cap = 4 * target;
  const SleParams params = make_params(3.0, Variant::TwoSidedRadial);
  const double a = params.a;
  const double dt = 5e-4;
  const double horizon = 4.0 / (2.0 * a) + 2.0 * dt;
  const std::array<std::array<int, 3>, 3> configs{
      {{1, 2, 4}, {1, 2, 3}, {2, 3, 4}}};  // (j, k, n)

  std::uint64_t instances = 0, failures = 0, curves = 0;
  std::string first_fail;
  ArcComponentsOptions aopt;
  aopt.compute_star = false;
  aopt.flow.swallow_tol = 1e-6;

  for (std::uint64_t i = 0; i < curve_cap && instances < target; ++i) {
    ++curves;
    Rng rng(v.master_seed, "accept-c12", i);
    const CoSimResult sim =
        co_simulate_driving(params, kPi / 2.0, horizon, dt, rng);
    TraceOptions topt;
    topt.stride = 2;
    topt.n_threads = v.n_threads;
    const TraceCurve curve = trace_curve(sim.U, a, topt);
    for (const auto& cfgj : configs) {
      if (instances >= target) break;
      const int j = cfgj[0], k = cfgj[1], n = cfgj[2];
      const auto rk = first_radius_time(curve, k);
      const auto rn = first_radius_time(curve, n);
      if (!rk || !rn) continue;
      // Hypothesis: between those two times the trace stays inside D_j.
      const double rmax = detail::max_radius_window(curve, *rk, *rn);
      if (!(rmax < std::exp(static_cast<double>(-j)))) continue;
      ++instances;
      const CrosscutFamily fam =
          arc_components(sim.U, a, curve, n, k, 512, aopt);
      const int cnt = access_arc_count(curve, *rn, fam, j, aopt);
      if (cnt != 1) {
        ++failures;
        if (first_fail.empty())
          first_fail = " first fail: curve " + std::to_string(i) + " (j,k,n)=(" +
                       std::to_string(j) + "," + std::to_string(k) + "," +
                       std::to_string(n) + ") count " + std::to_string(cnt) +
                       " arcs " + std::to_string(fam.arcs.size());
      }
    }
  }
  const bool enough = instances >= std::max<std::uint64_t>(target / 2, 5);
  r.pass = failures == 0 && enough;
  r.detail = std::to_string(instances) + " configurations over " +
             std::to_string(curves) + " curves, failures " +
             std::to_string(failures) + first_fail +
             (enough ? "" : " (hypothesis starvation)");
  return r;
}

}  // namespace detail_verify

inline std::vector<CriterionResult> run_criteria(
    const VerifyOptions& opt, const std::vector<int>& ids = {}) {
  using Fn = CriterionResult (*)(const VerifyOptions&);
  static const std::array<Fn, 12> table{
      detail_verify::c1, detail_verify::c2,  detail_verify::c3,
      detail_verify::c4, detail_verify::c5,  detail_verify::c6,
      detail_verify::c7, detail_verify::c8,  detail_verify::c9,
      detail_verify::c10, detail_verify::c11, detail_verify::c12};
  std::vector<int> run_ids = ids;
  if (run_ids.empty())
    for (int i = 1; i <= 12; ++i) run_ids.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : run_ids) {
    if (id < 1 || id > 12)
      throw std::invalid_argument("run_criteria: criterion ids are 1..12");
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = table[static_cast<std::size_t>(id - 1)](opt);
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion-" + std::to_string(id);
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace slelab
