#pragma once

// Radial Bessel process on (0, pi):  dX_t = beta cot(X_t) dt + dB_t.
// The boundary {0, pi} is absorbing exactly when beta < 1/2.  This angle
// process drives all three SLE variants via X_t = theta_t - U_t with
// beta = a (radial), 1 - 2a (chordal), 2a (two-sided radial).

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "slelab/loewner.hpp"
#include "slelab/params.hpp"
#include "slelab/parallel.hpp"
#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

struct BesselOptions {
  double absorb_tol = 1e-6;   // sin X below this counts as absorbed
  double sin_substep = 0.05;  // halve steps below this sin level
  int max_halvings = 26;      // smallest substep is dt / 2^max_halvings
};

struct BesselPath {
  double dt = 0;
  double beta = 0;
  std::vector<double> t;
  std::vector<double> x;
  bool absorbed = false;
  double absorb_time = 0;
};

namespace detail {

// One grid cell of adaptive Euler-Maruyama.  Sub-steps halve near the
// boundary; a proposal that exits (0, pi) is rejected and retried at half the
// step (no reflection), so absorption comes from the unresolved drift sign
// only.  Returns false when absorbed inside the cell (time written to *t_abs).
// When min_sin is non-null it is lowered to the smallest sin X attained over
// the whole path, estimated by sampling the exact Brownian-bridge extremes of
// every accepted step; checking only grid points would overstate the minimum
// by O(sqrt(step)) and visibly distort small-threshold tail frequencies.
// When min_log_phi is non-null (requires int_inv_sin2), it is lowered to the
// running minimum of  log sin X + phi_weight * int 1/sin^2,  the logarithm of
// the boundary-derivative distance observable: for a marked boundary point,
// sin X * exp(a * int ds/sin^2 X) is comparable to the distance from that
// point to the curve, so its minimum records the closest approach even though
// near-boundary excursions are invisibly cheap in capacity time.
//
// When gir_s1 / gir_s2 are non-null they accumulate, per accepted sub-step
// from x over h, the sums  S1 += cot(x) (x' - x)  and  S2 += cot(x)^2 h.
// exp((b2-b1) S1 - (b2^2-b1^2) S2 / 2) is then the exact per-path likelihood
// ratio between the Euler chains with drifts b2 cot and b1 cot (Gaussian
// density ratio step by step), hence an exact martingale of the simulated
// chain -- as long as no proposal is rejected at the boundary, which cannot
// happen while the path stays a few step widths inside (0, pi).
inline bool bessel_cell(double& x, double dt, double beta, Rng& rng,
                        const BesselOptions& opt, double t_cell_start,
                        double* t_abs, double* int_inv_sin2,
                        double* min_sin = nullptr,
                        double* min_log_phi = nullptr, double phi_weight = 0,
                        double* gir_s1 = nullptr, double* gir_s2 = nullptr) {
  double remaining = dt;
  double s_elapsed = 0;
  const double h_min = dt * std::ldexp(1.0, -opt.max_halvings);
  while (remaining > 1e-18 * dt) {
    const double sx = std::sin(x);
    if (min_sin && sx < *min_sin) *min_sin = sx;
    if (sx < opt.absorb_tol) {
      if (t_abs) *t_abs = t_cell_start + s_elapsed;
      return false;
    }
    double h = remaining;
    if (sx < opt.sin_substep) {
      const double ratio = sx / opt.sin_substep;
      double target = dt * ratio * ratio;
      while (h > target && h > h_min) h *= 0.5;
    }
    const double c = std::cos(x) / sx;
    for (;;) {
      const double prop = x + beta * c * h + std::sqrt(h) * rng.normal();
      if (prop > 0.0 && prop < kPi) {
        if (int_inv_sin2) {
          const double sp = std::sin(prop);
          *int_inv_sin2 += 0.5 * h * (1.0 / (sx * sx) + 1.0 / (sp * sp));
          if (min_log_phi) {
            const double lp = std::log(sp) + phi_weight * *int_inv_sin2;
            if (lp < *min_log_phi) *min_log_phi = lp;
          }
        }
        if (gir_s1) *gir_s1 += c * (prop - x);
        if (gir_s2) *gir_s2 += c * c * h;
        if (min_sin) {
          // Bridge extremes of the accepted step (drift ignored within the
          // step).  sin has no interior minimum on (0, pi), so the smallest
          // sin over the step is attained at one of the two extremes; values
          // pushed past an endpoint of (0, pi) count as a boundary touch.
          const double d2 = (prop - x) * (prop - x);
          const double lo =
              0.5 * (x + prop -
                     std::sqrt(d2 - 2.0 * h * std::log(rng.uniform_pos())));
          const double hi =
              0.5 * (x + prop +
                     std::sqrt(d2 - 2.0 * h * std::log(rng.uniform_pos())));
          const double s_lo = std::sin(std::max(lo, 0.0));
          const double s_hi = std::sin(std::min(hi, kPi));
          if (s_lo < *min_sin) *min_sin = s_lo;
          if (s_hi < *min_sin) *min_sin = s_hi;
        }
        x = prop;
        break;
      }
      if (h <= h_min) {
        // Boundary reached at an unresolvable scale.
        x = (prop <= 0.0) ? 0.0 : kPi;
        if (t_abs) *t_abs = t_cell_start + s_elapsed + h;
        return false;
      }
      h *= 0.5;
    }
    remaining -= h;
    s_elapsed += h;
  }
  return true;
}

}  // namespace detail

// Simulate one path on the uniform grid up to the horizon (or absorption).
inline BesselPath simulate_bessel(double beta, double x0, double horizon,
                                  double dt, Rng& rng,
                                  const BesselOptions& opt = {}) {
  if (!(dt > 0)) throw std::invalid_argument("simulate_bessel: dt must be > 0");
  if (horizon < 0)
    throw std::invalid_argument("simulate_bessel: horizon must be >= 0");
  if (!(x0 > 0 && x0 < kPi))
    throw std::domain_error("simulate_bessel: x0 must lie in (0, pi)");
  BesselPath p;
  p.dt = dt;
  p.beta = beta;
  const auto n_cells = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));
  p.t.reserve(n_cells + 1);
  p.x.reserve(n_cells + 1);
  p.t.push_back(0);
  p.x.push_back(x0);
  double x = x0;
  for (std::size_t j = 0; j < n_cells; ++j) {
    const double t0 = dt * static_cast<double>(j);
    const double cell = std::min(dt, horizon - t0);
    double t_abs = 0;
    if (!detail::bessel_cell(x, cell, beta, rng, opt, t0, &t_abs, nullptr)) {
      p.absorbed = true;
      p.absorb_time = t_abs;
      p.t.push_back(t_abs);
      p.x.push_back(x);
      return p;
    }
    p.t.push_back(t0 + cell);
    p.x.push_back(x);
  }
  return p;
}

// Scale function F_beta(x) = Int_x^{pi/2} (sin t)^(-2 beta) dt, beta > 1/2.
// Closed forms for testing: F_1(x) = cot x, F_2(x) = cot x + cot^3(x)/3.
inline double exact_F(double beta, double x) {
  if (!(beta > 0.5))
    throw std::domain_error("exact_F: beta must be > 1/2");
  if (!(x > 0) || x > 0.5 * kPi + 1e-12)
    throw std::domain_error("exact_F: x must lie in (0, pi/2]");
  if (x >= 0.5 * kPi) return 0.0;
  const auto f = [beta](double t) { return std::pow(std::sin(t), -2.0 * beta); };
  double err = 0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, x, 0.5 * kPi, 15, 1e-15, &err);
}

// P{X hits eps before pi/2 | X_0 = x} = F(x)/F(eps) for eps <= x <= pi/2.
inline double exit_prob_exact(double beta, double x, double eps) {
  if (!(eps > 0) || !(eps < 0.5 * kPi))
    throw std::domain_error("exit_prob_exact: eps must lie in (0, pi/2)");
  if (x < eps)
    throw std::domain_error("exit_prob_exact: need eps <= x <= pi/2");
  if (x > 0.5 * kPi + 1e-12)
    throw std::domain_error("exit_prob_exact: need eps <= x <= pi/2");
  return exact_F(beta, x) / exact_F(beta, eps);
}

// Monte Carlo version of the two-barrier exit probability.  Barrier checks
// run at cell resolution (with boundary sub-stepping inside the cells), so the
// estimate carries the usual discrete-monitoring bias, shrinking with dt.
inline McEstimate mc_exit_prob(double beta, double x, double eps,
                               std::uint64_t n, double dt,
                               std::uint64_t master_seed,
                               const std::string& experiment_id = "exit-prob",
                               const BesselOptions& opt = {}) {
  if (n == 0) throw std::invalid_argument("mc_exit_prob: n must be >= 1");
  if (!(dt > 0)) throw std::invalid_argument("mc_exit_prob: dt must be > 0");
  if (!(eps > 0) || !(eps < x) || !(x < 0.5 * kPi))
    throw std::domain_error("mc_exit_prob: need 0 < eps < x < pi/2");
  const double t_cap = 1e4;  // effectively never binds
  std::vector<unsigned char> hit(n, 0);
  parallel_for_samples(n, [&](std::uint64_t i) {
    Rng rng(master_seed, experiment_id, i);
    double xx = x;
    for (double t = 0; t < t_cap; t += dt) {
      double t_abs = 0;
      const bool alive =
          detail::bessel_cell(xx, dt, beta, rng, opt, t, &t_abs, nullptr);
      if (!alive || xx <= eps) {  // 0-side absorption counts as an eps hit
        hit[i] = 1;
        return;
      }
      if (xx >= 0.5 * kPi) return;
    }
  });
  RunningStat s;
  for (std::uint64_t i = 0; i < n; ++i) s.add(static_cast<double>(hit[i]));
  return make_estimate(s, master_seed, experiment_id);
}

// P{ min_{t <= t0} sin X_t <= eps sin X_0 }, estimated from n paths.
inline McEstimate min_sin_tail(double beta, double x0, double t0, double eps,
                               std::uint64_t n, double dt,
                               std::uint64_t master_seed,
                               const std::string& experiment_id = "min-sin",
                               const BesselOptions& opt = {}) {
  if (n == 0) throw std::invalid_argument("min_sin_tail: n must be >= 1");
  if (!(dt > 0)) throw std::invalid_argument("min_sin_tail: dt must be > 0");
  if (!(t0 > 0)) throw std::invalid_argument("min_sin_tail: t0 must be > 0");
  if (!(x0 > 0 && x0 < kPi))
    throw std::domain_error("min_sin_tail: x0 must lie in (0, pi)");
  if (!(beta > 0.5))
    throw std::domain_error(
        "min_sin_tail: requires beta > 1/2 (boundary contact must be a tail "
        "event, not almost sure)");
  if (!(eps > 0) || !(eps <= 1))
    throw std::domain_error("min_sin_tail: eps must lie in (0, 1]");
  const double level = eps * std::sin(x0);
  std::vector<unsigned char> hit(n, 0);
  parallel_for_samples(n, [&](std::uint64_t i) {
    Rng rng(master_seed, experiment_id, i);
    if (std::sin(x0) <= level) {  // eps = 1: trivially true at t = 0
      hit[i] = 1;
      return;
    }
    double xx = x0;
    double mn = std::sin(x0);
    const auto n_cells = static_cast<std::size_t>(std::ceil(t0 / dt - 1e-12));
    for (std::size_t j = 0; j < n_cells; ++j) {
      const double tc = dt * static_cast<double>(j);
      const double cell = std::min(dt, t0 - tc);
      if (!detail::bessel_cell(xx, cell, beta, rng, opt, tc, nullptr, nullptr,
                               &mn) ||
          mn <= level) {
        hit[i] = 1;
        return;
      }
    }
  });
  RunningStat s;
  for (std::uint64_t i = 0; i < n; ++i) s.add(static_cast<double>(hit[i]));
  return make_estimate(s, master_seed, experiment_id);
}

// M_t(beta) = (sin X_t)^beta exp(beta^2 t / 2)
//             exp( (1-beta) beta / 2 * Int_0^t ds / sin^2 X_s ),
// evaluated at the final stored sample; the integral uses the trapezoid rule
// on the stored grid.  Local martingale under the driftless (beta = 0) law.
inline double martingale_weight(const BesselPath& path, double beta) {
  if (path.t.size() != path.x.size() || path.t.empty())
    throw std::invalid_argument("martingale_weight: malformed path");
  double integral = 0;
  for (std::size_t i = 0; i + 1 < path.t.size(); ++i) {
    const double s0 = std::sin(path.x[i]);
    const double s1 = std::sin(path.x[i + 1]);
    if (s0 <= 0 || s1 <= 0)
      throw std::domain_error("martingale_weight: path touches the boundary");
    integral += 0.5 * (path.t[i + 1] - path.t[i]) *
                (1.0 / (s0 * s0) + 1.0 / (s1 * s1));
  }
  const double t_end = path.t.back();
  const double sx = std::sin(path.x.back());
  if (sx <= 0)
    throw std::domain_error("martingale_weight: path touches the boundary");
  return std::pow(sx, beta) *
         std::exp(0.5 * beta * beta * t_end +
                  0.5 * (1.0 - beta) * beta * integral);
}

// Summary handed to Girsanov functionals.
struct PathEnd {
  double x_end = 0;
  double t_end = 0;
  bool stopped_at_eps = false;  // sin-level stop fired before t0
};

// Estimate E_{beta2}[ f ] by simulating under beta1 and reweighting with the
// exact likelihood ratio between the two simulated chains,
//   log w = (beta2 - beta1) S1 - (beta2^2 - beta1^2) S2 / 2,
// where S1, S2 are the per-step Girsanov sums accumulated by the integrator
// (per-step Gaussian density ratio of the two Euler transitions).  w is an
// exact martingale of the simulated chain, so E[w] = 1 holds at every dt and
// stopping rule, and w matches the continuum change-of-drift weight to the
// same order as the discretization itself.  Paths stop at
// T = t0 ^ tau_eps, tau_eps = first grid time with sin X <= eps_stop (keeps
// w bounded away from the boundary blow-up).
template <class F>
inline McEstimate girsanov_reweight(double beta1, double beta2, double x0,
                                    double t0, double eps_stop, std::uint64_t n,
                                    double dt, std::uint64_t master_seed,
                                    const std::string& experiment_id,
                                    F&& functional,
                                    const BesselOptions& opt = {}) {
  if (n == 0) throw std::invalid_argument("girsanov_reweight: n must be >= 1");
  if (!(dt > 0)) throw std::invalid_argument("girsanov_reweight: dt must be > 0");
  if (!(t0 > 0)) throw std::invalid_argument("girsanov_reweight: t0 must be > 0");
  if (!(x0 > 0 && x0 < kPi))
    throw std::domain_error("girsanov_reweight: x0 must lie in (0, pi)");
  if (!(eps_stop > 0) || !(eps_stop < std::sin(x0)))
    throw std::domain_error("girsanov_reweight: need 0 < eps_stop < sin(x0)");

  std::vector<double> vals(n, 0.0);
  parallel_for_samples(n, [&](std::uint64_t i) {
    Rng rng(master_seed, experiment_id, i);
    double xx = x0;
    double s1 = 0, s2 = 0;
    double t_stop = t0;
    bool stopped_eps = false;
    const auto n_cells = static_cast<std::size_t>(std::ceil(t0 / dt - 1e-12));
    for (std::size_t j = 0; j < n_cells; ++j) {
      const double tc = dt * static_cast<double>(j);
      const double cell = std::min(dt, t0 - tc);
      const bool alive =
          detail::bessel_cell(xx, cell, beta1, rng, opt, tc, nullptr, nullptr,
                              nullptr, nullptr, 0, &s1, &s2);
      if (!alive || std::sin(xx) <= eps_stop) {
        t_stop = tc + cell;
        stopped_eps = true;
        break;
      }
    }
    const double logw = (beta2 - beta1) * s1 -
                        0.5 * (beta2 * beta2 - beta1 * beta1) * s2;
    PathEnd end{xx, t_stop, stopped_eps};
    vals[i] = std::exp(logw) * functional(end);
  });
  RunningStat s;
  for (double v : vals) s.add(v);
  return make_estimate(s, master_seed, experiment_id);
}

// Joint simulation of (X, U, theta) on the grid:
//   dX = beta cot X dt + dB,   dU = (a - beta) cot X dt - dB,
//   dtheta = a cot X dt,
// using one shared increment per (sub-)step so X = theta - U holds exactly on
// the grid.  X is the angle of a marked boundary point; it absorbs at {0, pi}
// when that point is swallowed.  For chordal and two-sided paths the curve
// itself terminates there, so U is truncated at the last completed grid time
// and flagged.  For the radial variant the swallowing of the marked point
// does not end the curve, and since a - beta = 0 makes U an exact Brownian
// motion, U keeps evolving to the full horizon; theta and x are frozen at
// their absorption values from then on.
struct CoSimResult {
  DrivingPath U;
  std::vector<double> theta;
  std::vector<double> x;
  bool absorbed = false;
  double absorb_time = 0;
};

inline CoSimResult co_simulate_driving(const SleParams& params, double theta0,
                                       double horizon, double dt, Rng& rng,
                                       const BesselOptions& opt = {}) {
  if (!(dt > 0))
    throw std::invalid_argument("co_simulate_driving: dt must be > 0");
  if (!(horizon > 0))
    throw std::invalid_argument("co_simulate_driving: horizon must be > 0");
  if (!(theta0 > 0 && theta0 < kPi))
    throw std::domain_error("co_simulate_driving: theta0 must lie in (0, pi)");

  const double a = params.a;
  const double beta = params.beta;
  const auto n_cells = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));

  CoSimResult r;
  r.U.dt = dt;
  r.U.values.reserve(n_cells + 1);
  r.theta.reserve(n_cells + 1);
  r.x.reserve(n_cells + 1);
  double u = 0, th = theta0, x = theta0;
  r.U.values.push_back(u);
  r.theta.push_back(th);
  r.x.push_back(x);

  const double h_min = dt * std::ldexp(1.0, -opt.max_halvings);
  bool alive = true;
  for (std::size_t j = 0; j < n_cells; ++j) {
    if (!alive) {
      u -= std::sqrt(dt) * rng.normal();
      r.U.values.push_back(u);
      r.theta.push_back(th);
      r.x.push_back(x);
      continue;
    }
    double remaining = dt;
    double s_elapsed = 0;
    while (remaining > 1e-18 * dt) {
      const double sx = std::sin(x);
      if (sx < opt.absorb_tol) {
        r.absorbed = true;
        r.absorb_time = dt * static_cast<double>(j) + s_elapsed;
        alive = false;
        break;
      }
      double h = remaining;
      if (sx < opt.sin_substep) {
        const double ratio = sx / opt.sin_substep;
        const double target = dt * ratio * ratio;
        while (h > target && h > h_min) h *= 0.5;
      }
      const double c = std::cos(x) / sx;
      bool stepped = false;
      for (;;) {
        const double db = std::sqrt(h) * rng.normal();
        const double prop = x + beta * c * h + db;
        if (prop > 0.0 && prop < kPi) {
          x = prop;
          u += (a - beta) * c * h - db;
          th += a * c * h;
          stepped = true;
          break;
        }
        if (h <= h_min) {
          r.absorbed = true;
          r.absorb_time = dt * static_cast<double>(j) + s_elapsed + h;
          x = (prop <= 0.0) ? 0.0 : kPi;
          alive = false;
          break;
        }
        h *= 0.5;
      }
      if (!stepped) break;
      remaining -= h;
      s_elapsed += h;
    }
    if (!alive) {
      if (params.variant != Variant::Radial) return r;  // curve ends here
      // The radial curve outlives the marked point; finish the cell with one
      // aggregated Brownian increment (dU = -dB is exact when beta = a).
      u -= std::sqrt(remaining) * rng.normal();
    }
    r.U.values.push_back(u);
    r.theta.push_back(th);
    r.x.push_back(x);
  }
  return r;
}

}  // namespace slelab
