#pragma once

// Batch experiments over simulated curves and angle paths: truncated return
// probabilities at dyadic radii, crosscut hitting exponents, boundary-contact
// tails for the angle process, and the integer reset chain used as a discrete
// model of the return-time tail.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "slelab/bessel.hpp"
#include "slelab/geometry.hpp"
#include "slelab/loewner.hpp"
#include "slelab/params.hpp"
#include "slelab/parallel.hpp"
#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

struct ExponentFit {
  double slope = 0;
  double intercept = 0;  // ln C in y = C x^slope
  double residual = 0;   // rms of log residuals
  std::vector<std::pair<double, double>> points;  // (log x, log y)
};

// Least-squares power-law fit in log-log coordinates.
inline ExponentFit fit_exponent(const std::vector<double>& xs,
                                const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("fit_exponent: size mismatch");
  if (xs.size() < 2)
    throw std::invalid_argument("fit_exponent: need at least two points");
  const std::size_t m = xs.size();
  std::vector<double> lx(m), ly(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0))
      throw std::domain_error("fit_exponent: points must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx <= 0) throw std::invalid_argument("fit_exponent: x values coincide");
  ExponentFit f;
  for (std::size_t i = 0; i < m; ++i) f.points.emplace_back(lx[i], ly[i]);
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / static_cast<double>(m));
  return f;
}

// Shared knobs for curve-batch experiments.
struct CurveBatchConfig {
  double kappa = 3.0;
  Variant variant = Variant::Radial;
  double theta0 = 0.5 * kPi;
  std::uint64_t n_samples = 2000;
  std::uint64_t master_seed = 1;
  std::string experiment_id = "curves";
  double dt = 1e-3;
  std::size_t trace_stride = 5;
  unsigned n_threads = 0;
};

namespace detail {

// Largest |gamma| over the trace clipped to [t0, t1] (endpoints interpolated);
// the max of |z| along a straight segment is attained at an endpoint.
inline double max_radius_window(const TraceCurve& curve, double t0, double t1) {
  double best = 0;
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    const double t = curve.t[i];
    if (t >= t0 && t <= t1) best = std::max(best, std::abs(curve.z[i]));
  }
  const auto interp = [&](double tt) -> std::optional<double> {
    for (std::size_t i = 0; i + 1 < curve.t.size(); ++i)
      if (curve.t[i] <= tt && tt <= curve.t[i + 1]) {
        const double span = curve.t[i + 1] - curve.t[i];
        if (span <= 0) return std::abs(curve.z[i]);
        const double u = (tt - curve.t[i]) / span;
        return std::abs(curve.z[i] + u * (curve.z[i + 1] - curve.z[i]));
      }
    return std::nullopt;
  };
  if (auto r0 = interp(t0)) best = std::max(best, *r0);
  if (auto r1 = interp(t1)) best = std::max(best, *r1);
  return best;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Truncated return probabilities: after first reaching radius e^{-(n+k)}, how
// often does the curve climb back out to radius e^{-k} before reaching
// e^{-(n+k+m)}?  One curve batch serves all requested n (shared samples).
struct ReturnProbResult {
  std::vector<int> n_values;
  std::vector<McEstimate> q;
  int k = 0;
  int horizon_m = 0;
};

inline ReturnProbResult return_prob_experiment(const CurveBatchConfig& cfg,
                                               int k,
                                               const std::vector<int>& n_values,
                                               int horizon_m) {
  if (cfg.variant == Variant::Chordal)
    throw std::invalid_argument(
        "return_prob_experiment: chordal curves terminate at the boundary");
  if (k < 1) throw std::invalid_argument("return_prob_experiment: k >= 1");
  if (horizon_m < 2)
    throw std::invalid_argument("return_prob_experiment: horizon_m >= 2");
  if (n_values.empty() || cfg.n_samples == 0)
    throw std::invalid_argument("return_prob_experiment: empty request");
  int n_max = 0;
  for (int n : n_values) {
    if (n < 0) throw std::invalid_argument("return_prob_experiment: n >= 0");
    n_max = std::max(n_max, n);
  }
  const SleParams params = make_params(cfg.kappa, cfg.variant);
  // rho_{n+k+m} <= (n+k+m)/(2a) deterministically, so this horizon suffices.
  const double horizon =
      (static_cast<double>(n_max + k + horizon_m) / (2.0 * params.a)) +
      2.0 * cfg.dt;

  const std::size_t nn = n_values.size();
  std::vector<std::vector<unsigned char>> hit(
      nn, std::vector<unsigned char>(cfg.n_samples, 0));
  std::vector<unsigned char> valid(cfg.n_samples, 0);

  parallel_for_samples(
      cfg.n_samples,
      [&](std::uint64_t i) {
        Rng rng(cfg.master_seed, cfg.experiment_id, i);
        const CoSimResult sim =
            co_simulate_driving(params, cfg.theta0, horizon, cfg.dt, rng);
        // Radial driving paths survive marked-point absorption; two-sided
        // ones are truncated there and cannot cover the requested window.
        if (sim.absorbed && cfg.variant != Variant::Radial) return;
        TraceOptions topt;
        topt.stride = cfg.trace_stride;
        topt.n_threads = 1;
        const TraceCurve curve = trace_curve(sim.U, params.a, topt);
        valid[i] = 1;
        for (std::size_t q = 0; q < nn; ++q) {
          const int n = n_values[q];
          const auto t_in = first_radius_time(curve, n + k);
          if (!t_in) continue;
          const auto t_out = first_radius_time(curve, n + k + horizon_m);
          const double t1 = t_out ? *t_out : curve.t.back();
          const double rmax = detail::max_radius_window(curve, *t_in, t1);
          if (rmax >= std::exp(static_cast<double>(-k))) hit[q][i] = 1;
        }
      },
      cfg.n_threads);

  ReturnProbResult out;
  out.k = k;
  out.horizon_m = horizon_m;
  out.n_values = n_values;
  for (std::size_t q = 0; q < nn; ++q) {
    RunningStat s;
    for (std::uint64_t i = 0; i < cfg.n_samples; ++i)
      if (valid[i]) s.add(static_cast<double>(hit[q][i]));
    out.q.push_back(make_estimate(
        s, cfg.master_seed,
        cfg.experiment_id + "/n=" + std::to_string(n_values[q])));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Crosscut hitting exponent.  eta_r is the circular-arc crosscut of the unit
// disk around the boundary point w = e^{i*center_angle}: the circle of radius
// r/2 about w, clipped to the disk.  The curve grows from the point 1, so
// hitting eta_r means approaching w within ~r/2 -- frequency ~ r^alpha.
//
// Sampled trace polylines cannot decide this event: an excursion that dips
// within r/2 of the far boundary costs O(r^2) capacity, so it vanishes
// between trace samples at any feasible dt.  Instead each curve is scored by
// the boundary-derivative distance observable of the marked angle process X
// started at center_angle/2: two nearby boundary points separate under the
// flow like exp(-a int ds/sin^2 X), and the gap between w's image and the
// tip image is 2 sin X, so
//     dist(w, hull_t) ~ 2 sin X_t * exp(a int_0^t ds/sin^2 X_s)
// up to bounded conformal distortion (exact at t = 0, where both sides are
// 2).  The running minimum of the right side is tracked at the integrator's
// adaptive substep resolution, which refines precisely during the
// near-boundary episodes the capacity grid hides; under absorption it
// freezes at the sealing distance (engulfment) or dives past every
// threshold (direct contact).  One path batch serves every radius -- a curve
// hits radius r when the recorded minimum is at most r/4 -- so the
// per-radius hit sets are nested pathwise.
struct CrosscutExponentResult {
  std::vector<double> radii;
  std::vector<McEstimate> freq;
  std::optional<ExponentFit> fit;  // absent when some frequency is zero
};

inline CrosscutExponentResult crosscut_exponent_experiment(
    const CurveBatchConfig& cfg, double center_angle,
    const std::vector<double>& radii, int horizon_n) {
  if (cfg.variant != Variant::Radial)
    throw std::invalid_argument(
        "crosscut_exponent_experiment: radial variant only");
  if (radii.size() < 2)
    throw std::invalid_argument(
        "crosscut_exponent_experiment: need at least two radii");
  if (cfg.n_samples == 0)
    throw std::invalid_argument("crosscut_exponent_experiment: n_samples >= 1");
  if (horizon_n < 1)
    throw std::invalid_argument("crosscut_exponent_experiment: horizon_n >= 1");
  if (!(cfg.dt > 0))
    throw std::invalid_argument("crosscut_exponent_experiment: dt must be > 0");
  if (!(center_angle > 0 && center_angle < 2.0 * kPi))
    throw std::domain_error(
        "crosscut_exponent_experiment: center angle must lie in (0, 2*pi)");
  const cplx wc = std::polar(1.0, center_angle);
  for (double r : radii) {
    if (!(r > 0) || !(r <= 1.0))
      throw std::domain_error(
          "crosscut_exponent_experiment: diameter must lie in (0, 1]");
    if (!(std::abs(wc - cplx{1.0, 0.0}) > r))
      throw std::domain_error(
          "crosscut_exponent_experiment: crosscut too close to the start "
          "point 1");
  }
  const SleParams params = make_params(cfg.kappa, cfg.variant);
  // Deterministic capacity horizon matching the curve's first visit of
  // radius e^{-horizon_n} up to the usual distortion slack.
  const double horizon = static_cast<double>(horizon_n) / (2.0 * params.a);
  const double x0 = 0.5 * center_angle;

  std::vector<double> min_log_phi(cfg.n_samples, 0.0);

  parallel_for_samples(
      cfg.n_samples,
      [&](std::uint64_t i) {
        Rng rng(cfg.master_seed, cfg.experiment_id, i);
        const BesselOptions opt;
        double x = x0;
        double integral = 0;
        double mlp = std::log(std::sin(x0));
        const auto n_cells =
            static_cast<std::size_t>(std::ceil(horizon / cfg.dt - 1e-12));
        for (std::size_t j = 0; j < n_cells; ++j) {
          const double t0 = cfg.dt * static_cast<double>(j);
          const double cell = std::min(cfg.dt, horizon - t0);
          if (!detail::bessel_cell(x, cell, params.a, rng, opt, t0, nullptr,
                                   &integral, nullptr, &mlp, params.a))
            break;
        }
        min_log_phi[i] = mlp;
      },
      cfg.n_threads);

  CrosscutExponentResult out;
  out.radii = radii;
  bool all_positive = true;
  std::vector<double> means;
  for (double r : radii) {
    const double thresh = std::log(0.25 * r);
    RunningStat s;
    for (std::uint64_t i = 0; i < cfg.n_samples; ++i)
      s.add(min_log_phi[i] <= thresh ? 1.0 : 0.0);
    out.freq.push_back(make_estimate(
        s, cfg.master_seed, cfg.experiment_id + "/r=" + std::to_string(r)));
    means.push_back(out.freq.back().mean);
    if (!(out.freq.back().mean > 0)) all_positive = false;
  }
  if (all_positive) out.fit = fit_exponent(radii, means);
  return out;
}

// ---------------------------------------------------------------------------
// Boundary-contact tail of the angle process: P{min sin X <= eps sin x0 by
// t0} over a grid of eps, with all thresholds evaluated on a shared set of
// paths (the running minimum is recorded once per path).
struct BesselTailResult {
  std::vector<double> eps;
  std::vector<McEstimate> prob;
  std::optional<ExponentFit> fit;
};

inline BesselTailResult bessel_exponent_experiment(
    double beta, double x0, double t0, const std::vector<double>& eps_list,
    std::uint64_t n, double dt, std::uint64_t master_seed,
    const std::string& experiment_id = "min-sin-tail",
    const BesselOptions& opt = {}, unsigned n_threads = 0) {
  if (!(beta > 0.5))
    throw std::domain_error(
        "bessel_exponent_experiment: requires beta > 1/2 (boundary contact "
        "must be a tail event, not almost sure)");
  if (eps_list.size() < 3)
    throw std::invalid_argument(
        "bessel_exponent_experiment: need at least three eps values");
  for (double e : eps_list)
    if (!(e > 0) || !(e <= 1))
      throw std::domain_error("bessel_exponent_experiment: eps in (0, 1]");
  if (n == 0)
    throw std::invalid_argument("bessel_exponent_experiment: n >= 1");
  if (!(dt > 0) || !(t0 > 0))
    throw std::invalid_argument("bessel_exponent_experiment: bad dt or t0");
  if (!(x0 > 0 && x0 < kPi))
    throw std::domain_error("bessel_exponent_experiment: x0 in (0, pi)");

  std::vector<double> min_ratio(n, 1.0);
  parallel_for_samples(
      n,
      [&](std::uint64_t i) {
        Rng rng(master_seed, experiment_id, i);
        const double s0 = std::sin(x0);
        double xx = x0;
        double mn = s0;  // running min of sin X at sub-step resolution
        const auto n_cells =
            static_cast<std::size_t>(std::ceil(t0 / dt - 1e-12));
        for (std::size_t j = 0; j < n_cells; ++j) {
          const double tc = dt * static_cast<double>(j);
          const double cell = std::min(dt, t0 - tc);
          if (!detail::bessel_cell(xx, cell, beta, rng, opt, tc, nullptr,
                                   nullptr, &mn)) {
            mn = 0.0;
            break;
          }
        }
        min_ratio[i] = mn / s0;
      },
      n_threads);

  BesselTailResult out;
  out.eps = eps_list;
  bool all_positive = true;
  std::vector<double> means;
  for (double e : eps_list) {
    RunningStat s;
    for (std::uint64_t i = 0; i < n; ++i)
      s.add(min_ratio[i] <= e ? 1.0 : 0.0);
    out.prob.push_back(make_estimate(
        s, master_seed, experiment_id + "/eps=" + std::to_string(e)));
    means.push_back(out.prob.back().mean);
    if (!(out.prob.back().mean > 0)) all_positive = false;
  }
  if (all_positive) out.fit = fit_exponent(eps_list, means);
  return out;
}

// ---------------------------------------------------------------------------
// Integer reset chain: from state s the walker restarts at 0 with probability
// eps_s and otherwise moves to s+1.  Reports P{X_n < n/2 | X_0 = 0} both by
// exact forward dynamic programming and by simulation.
struct MarkovTailResult {
  double exact = 0;
  McEstimate mc;
};

inline std::vector<double> geometric_eps(double ratio, int n) {
  if (!(ratio >= 0) || !(ratio < 1))
    throw std::domain_error("geometric_eps: ratio must lie in [0, 1)");
  std::vector<double> eps(static_cast<std::size_t>(n));
  double v = ratio;
  for (int j = 0; j < n; ++j) {
    eps[static_cast<std::size_t>(j)] = v;
    v *= ratio;
  }
  return eps;
}

inline double markov_tail_exact(const std::vector<double>& eps_seq, int n) {
  if (n < 1) throw std::invalid_argument("markov_tail_exact: n >= 1");
  if (eps_seq.size() < static_cast<std::size_t>(n))
    throw std::invalid_argument("markov_tail_exact: eps_seq shorter than n");
  for (std::size_t j = 0; j < eps_seq.size(); ++j) {
    if (!(eps_seq[j] >= 0) || !(eps_seq[j] < 1))
      throw std::domain_error("markov_tail_exact: eps must lie in [0, 1)");
    if (j > 0 && eps_seq[j] > eps_seq[j - 1] + 1e-15)
      throw std::invalid_argument("markov_tail_exact: eps_seq must not increase");
  }
  std::vector<double> p(static_cast<std::size_t>(n) + 1, 0.0);
  p[0] = 1.0;
  for (int step = 0; step < n; ++step) {
    std::vector<double> q(p.size(), 0.0);
    for (int s = 0; s <= step; ++s) {
      const double mass = p[static_cast<std::size_t>(s)];
      if (mass == 0) continue;
      const double e = eps_seq[static_cast<std::size_t>(s)];
      q[0] += mass * e;
      q[static_cast<std::size_t>(s) + 1] += mass * (1.0 - e);
    }
    p = std::move(q);
  }
  double acc = 0;
  for (int s = 0; 2 * s < n; ++s) acc += p[static_cast<std::size_t>(s)];
  return acc;
}

inline MarkovTailResult markov_return_tail(const std::vector<double>& eps_seq,
                                           int n, std::uint64_t n_samples,
                                           std::uint64_t master_seed,
                                           const std::string& experiment_id =
                                               "markov-tail",
                                           unsigned n_threads = 0) {
  MarkovTailResult out;
  out.exact = markov_tail_exact(eps_seq, n);
  if (n_samples == 0)
    throw std::invalid_argument("markov_return_tail: n_samples >= 1");
  std::vector<unsigned char> low(n_samples, 0);
  parallel_for_samples(
      n_samples,
      [&](std::uint64_t i) {
        Rng rng(master_seed, experiment_id, i);
        int s = 0;
        for (int step = 0; step < n; ++step) {
          if (rng.uniform() < eps_seq[static_cast<std::size_t>(s)])
            s = 0;
          else
            ++s;
        }
        low[i] = (2 * s < n) ? 1 : 0;
      },
      n_threads);
  RunningStat st;
  for (std::uint64_t i = 0; i < n_samples; ++i)
    st.add(static_cast<double>(low[i]));
  out.mc = make_estimate(st, master_seed, experiment_id);
  return out;
}

}  // namespace slelab
