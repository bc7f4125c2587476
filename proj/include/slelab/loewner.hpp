#pragma once

// Radial Loewner evolution in the unit disk, capacity-parametrized so that
// g_t'(0) = exp(2at):
//
//   d/dt g_t(z) = 2a g_t(z) (w_t + g_t(z)) / (w_t - g_t(z)),  w_t = e^{2i U_t},
//
// with the boundary (angular) form for z = e^{2ix}:
//
//   d/dt h_t = a cot(h_t - U_t),   |g_t'(e^{2ix})| = exp(-a Int ds / sin^2).
//
// The driving function is piecewise linear on a uniform grid.  Integration is
// RK4 on grid cells with adaptive sub-stepping near the moving singularity
// w_t; the curve is recovered by running the field backwards from a point
// planted just inside the tip image.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "slelab/parallel.hpp"
#include "slelab/params.hpp"

namespace slelab {

using cplx = std::complex<double>;

struct DrivingPath {
  double dt = 0;
  std::vector<double> values;  // U at grid times 0, dt, 2dt, ...

  std::size_t cells() const { return values.empty() ? 0 : values.size() - 1; }
  double t_end() const { return dt * static_cast<double>(cells()); }

  void validate() const {
    if (!(dt > 0)) throw std::invalid_argument("DrivingPath: dt must be > 0");
    if (values.empty())
      throw std::invalid_argument("DrivingPath: needs at least one value");
    if (values.front() != 0.0)
      throw std::invalid_argument("DrivingPath: U_0 must be 0");
    for (double v : values)
      if (!std::isfinite(v))
        throw std::invalid_argument("DrivingPath: non-finite value");
  }

  // Piecewise-linear interpolation of U.
  double at(double t) const {
    if (t <= 0) return values.front();
    const double s = t / dt;
    const auto j = static_cast<std::size_t>(s);
    if (j >= cells()) return values.back();
    const double frac = s - static_cast<double>(j);
    return values[j] + frac * (values[j + 1] - values[j]);
  }
};

struct FlowOptions {
  double swallow_tol = 1e-6;   // singularity distance / sin(X) threshold
  double safety = 0.05;        // sub-step fraction of the singular timescale
  double h_floor = 1e-13;      // smallest sub-step
  long max_substeps = 200000;  // per grid cell; overflow counts as swallowed
};

struct FlowResult {
  bool swallowed = false;
  cplx z{0, 0};            // final point when alive
  double swallow_time = 0; // meaningful when swallowed
};

namespace detail {

// Precomputed w = e^{2iU} at cell endpoints and midpoints: the full-cell RK4
// fast path then needs no trig at all.
struct DrivingCache {
  const DrivingPath& U;
  std::vector<cplx> w;      // at grid points
  std::vector<cplx> w_mid;  // at cell midpoints

  explicit DrivingCache(const DrivingPath& u) : U(u) {
    w.resize(u.values.size());
    for (std::size_t j = 0; j < u.values.size(); ++j)
      w[j] = std::polar(1.0, 2.0 * u.values[j]);
    w_mid.resize(u.cells());
    for (std::size_t j = 0; j < u.cells(); ++j)
      w_mid[j] = std::polar(1.0, u.values[j] + u.values[j + 1]);
  }

  cplx at(double t) const { return std::polar(1.0, 2.0 * U.at(t)); }
};

inline cplx radial_rhs(double a, cplx z, cplx w) {
  return 2.0 * a * z * (w + z) / (w - z);
}

// One RK4 step of the interior equation; sgn = +1 forward, -1 backward in time.
inline cplx rk4_interior(double a, double sgn, cplx z, double h, cplx w0,
                         cplx wm, cplx w1) {
  const cplx k1 = sgn * radial_rhs(a, z, w0);
  const cplx k2 = sgn * radial_rhs(a, z + 0.5 * h * k1, wm);
  const cplx k3 = sgn * radial_rhs(a, z + 0.5 * h * k2, wm);
  const cplx k4 = sgn * radial_rhs(a, z + h * k3, w1);
  return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Sub-step size near the singularity: safety * d^2 / a, shrunk further when
// the singularity itself moves fast within the cell (|d(2U)/dt| = slope2).
inline double singular_step(double d, double a, double slope2,
                            const FlowOptions& opt) {
  const double a_eff = a * (1.0 + std::fabs(slope2) * d / (4.0 * a));
  return std::max(opt.h_floor, opt.safety * d * d / a_eff);
}

}  // namespace detail

// Flow an interior point z0 (|z0| < 1) forward to time t_end under g_t.
inline FlowResult forward_flow_point(const DrivingPath& U, double a, cplx z0,
                                     double t_end,
                                     const FlowOptions& opt = {}) {
  U.validate();
  if (!(a > 0)) throw std::invalid_argument("forward_flow_point: a must be > 0");
  if (std::abs(z0) >= 1.0)
    throw std::domain_error("forward_flow_point: |z0| must be < 1");
  if (t_end < 0 || t_end > U.t_end() + 1e-12)
    throw std::out_of_range("forward_flow_point: t_end outside driving horizon");

  detail::DrivingCache cache(U);
  const double dt = U.dt;
  cplx z = z0;
  double t = 0;
  const std::size_t ncells =
      std::min(U.cells(), static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12)));
  for (std::size_t j = 0; j < ncells; ++j) {
    const double cell_end = std::min(t_end, dt * static_cast<double>(j + 1));
    const double slope2 = 2.0 * (U.values[j + 1] - U.values[j]) / dt;
    // Fast path: whole cell in one RK4 step when far from the singularity
    // (only for full cells, where the cached endpoint/midpoint values apply).
    double d = std::abs(cache.w[j] - z);
    const double span = cell_end - t;
    const bool full_cell = cell_end == dt * static_cast<double>(j + 1);
    if (full_cell && detail::singular_step(d, a, slope2, opt) >= span) {
      z = detail::rk4_interior(a, +1.0, z, span, cache.w[j], cache.w_mid[j],
                               cache.w[j + 1]);
      t = cell_end;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        return {true, z, t};
      continue;
    }
    long iter = 0;
    while (t < cell_end - 1e-15 * std::max(1.0, t)) {
      const cplx w_now = cache.at(t);
      d = std::abs(w_now - z);
      if (d < opt.swallow_tol) return {true, z, t};
      double h = std::min(cell_end - t, detail::singular_step(d, a, slope2, opt));
      z = detail::rk4_interior(a, +1.0, z, h, w_now, cache.at(t + 0.5 * h),
                               cache.at(t + h));
      t += h;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        return {true, z, t};
      if (++iter > opt.max_substeps) return {true, z, t};
    }
    t = cell_end;
  }
  return {false, z, 0};
}

// Boundary angular flow h_t started from x0, with the log-derivative
// accumulator logderiv = -a Int_0^t ds / sin^2(h_s - U_s), so that
// |g_t'(e^{2i x0})| = exp(logderiv).
struct AngleFlow {
  bool swallowed = false;
  double swallow_time = 0;
  std::vector<double> t;      // sample times (grid times, then t_end)
  std::vector<double> theta;  // h_t at sample times
  std::vector<double> x;      // h_t - U_t
  double logderiv = 0;        // at the final sample
};

inline AngleFlow boundary_angle_flow(const DrivingPath& U, double a, double x0,
                                     double t_end,
                                     const FlowOptions& opt = {}) {
  U.validate();
  if (!(a > 0))
    throw std::invalid_argument("boundary_angle_flow: a must be > 0");
  if (t_end < 0 || t_end > U.t_end() + 1e-12)
    throw std::out_of_range(
        "boundary_angle_flow: t_end outside driving horizon");
  const double X0 = x0 - U.values.front();
  // Values of sin below ~1e-15 are indistinguishable from the singular points
  // 0 and pi at double precision (sin(pi) itself rounds to 1.2e-16).
  if (!(std::sin(X0) > 1e-15))
    throw std::domain_error(
        "boundary_angle_flow: x0 - U_0 must lie in (0, pi) mod 2pi");

  const double dt = U.dt;
  AngleFlow out;
  out.t.push_back(0);
  out.theta.push_back(x0);
  out.x.push_back(X0);

  double th = x0;      // h_t
  double ld = 0;       // logderiv
  double t = 0;
  const auto push = [&](double tt) {
    out.t.push_back(tt);
    out.theta.push_back(th);
    out.x.push_back(th - U.at(tt));
  };

  // RK4 on (theta, logderiv) with U linearly interpolated inside the cell.
  const auto rk4 = [&](double t0, double h, double u0, double slope) {
    const auto f = [&](double tt, double x) {
      const double X = x - (u0 + slope * (tt - t0));
      const double s = std::sin(X);
      return std::pair<double, double>{a * std::cos(X) / s, -a / (s * s)};
    };
    const auto [k1, l1] = f(t0, th);
    const auto [k2, l2] = f(t0 + 0.5 * h, th + 0.5 * h * k1);
    const auto [k3, l3] = f(t0 + 0.5 * h, th + 0.5 * h * k2);
    const auto [k4, l4] = f(t0 + h, th + h * k3);
    th += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    ld += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  };

  const std::size_t ncells = std::min(
      U.cells(), static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12)));
  for (std::size_t j = 0; j < ncells; ++j) {
    const double cell_end = std::min(t_end, dt * static_cast<double>(j + 1));
    const double u0 = U.values[j];
    const double slope = (U.values[j + 1] - U.values[j]) / dt;
    const double t0cell = dt * static_cast<double>(j);
    long iter = 0;
    while (t < cell_end - 1e-15 * std::max(1.0, t)) {
      // While alive X = theta - U stays in (0, pi); sin(X) <= 0 after a step
      // means the singularity was crossed and the point is swallowed.
      const double s = std::sin(th - (u0 + slope * (t - t0cell)));
      if (s < opt.swallow_tol) {
        out.swallowed = true;
        out.swallow_time = t;
        out.logderiv = ld;
        return out;
      }
      double h = std::min(cell_end - t,
                          detail::singular_step(s, a, 2.0 * slope, opt));
      rk4(t, h, u0 + slope * (t - t0cell), slope);
      t += h;
      if (++iter > opt.max_substeps) {
        out.swallowed = true;
        out.swallow_time = t;
        out.logderiv = ld;
        return out;
      }
    }
    t = cell_end;
    push(t);
  }
  out.logderiv = ld;
  return out;
}

/// Derivative of the uniformizing map at the origin: g_t'(0) = exp(2at).
inline double deriv_at_zero(double a, double t) {
  if (!(a > 0)) throw std::invalid_argument("deriv_at_zero: a must be > 0");
  if (t < 0) throw std::domain_error("deriv_at_zero: t must be >= 0");
  return std::exp(2.0 * a * t);
}

struct TraceCurve {
  std::vector<double> t;
  std::vector<cplx> z;
  std::vector<std::uint8_t> failed;  // per-point backward-flow failure flag
  double tip_delta = 1e-6;
};

struct TraceOptions {
  std::size_t stride = 1;    // trace every stride-th grid time
  double tip_delta = 1e-6;   // backward flow starts at (1-delta) e^{2iU_t}
  FlowOptions flow{};
  unsigned n_threads = 0;    // 0 = hardware default
};

// gamma(t) = lim g_t^{-1}((1-delta) e^{2iU_t}), computed by integrating the
// reversed field from s=0 (time t) down to s=t (time 0).  O(N) per point.
inline TraceCurve trace_curve(const DrivingPath& U, double a,
                              const TraceOptions& opt = {}) {
  U.validate();
  if (!(a > 0)) throw std::invalid_argument("trace_curve: a must be > 0");
  if (opt.stride == 0) throw std::invalid_argument("trace_curve: stride == 0");
  if (!(opt.tip_delta > 0 && opt.tip_delta < 1e-2))
    throw std::invalid_argument("trace_curve: tip_delta out of range");

  detail::DrivingCache cache(U);
  const double dt = U.dt;
  const std::size_t ncells = U.cells();

  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j <= ncells; j += opt.stride) idx.push_back(j);
  if (idx.back() != ncells) idx.push_back(ncells);

  TraceCurve out;
  out.tip_delta = opt.tip_delta;
  out.t.resize(idx.size());
  out.z.resize(idx.size());
  out.failed.assign(idx.size(), 0);

  parallel_for_samples(
      idx.size(),
      [&](std::uint64_t q) {
        const std::size_t j = idx[q];
        const double tj = dt * static_cast<double>(j);
        cplx z = (1.0 - opt.tip_delta) * cache.w[j];
        cplx z_ok = z;  // last finite value, reported on blow-up
        // March s over cells m = 0..j-1; time argument is tj - s.
        for (std::size_t m = 0; m < j && !out.failed[q]; ++m) {
          const std::size_t cell = j - 1 - m;  // original cell index
          const double slope2 =
              2.0 * (U.values[cell + 1] - U.values[cell]) / dt;
          const double s0 = dt * static_cast<double>(m);
          const double s1 = dt * static_cast<double>(m + 1);
          double d = std::abs(cache.w[j - m] - z);
          if (detail::singular_step(d, a, slope2, opt.flow) >= dt) {
            z = detail::rk4_interior(a, -1.0, z, dt, cache.w[j - m],
                                     cache.w_mid[cell], cache.w[cell]);
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
              out.failed[q] = 1;
            else
              z_ok = z;
            continue;
          }
          double s = s0;
          long iter = 0;
          while (s < s1 - 1e-15 * std::max(1.0, s)) {
            const cplx w_now = cache.at(tj - s);
            d = std::abs(w_now - z);
            double h = std::min(
                s1 - s, detail::singular_step(d, a, slope2, opt.flow));
            z = detail::rk4_interior(a, -1.0, z, h, w_now,
                                     cache.at(tj - s - 0.5 * h),
                                     cache.at(tj - s - h));
            s += h;
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
              out.failed[q] = 1;
              break;
            }
            z_ok = z;
            if (++iter > opt.flow.max_substeps) {
              out.failed[q] = 1;
              break;
            }
          }
        }
        out.t[q] = tj;
        out.z[q] = z_ok;
      },
      opt.n_threads);
  return out;
}

// First time the traced curve reaches the closed disk of radius e^{-n}.
// Crossing times interpolate linearly in log|gamma| between the bracketing
// samples; a segment whose interior dips inside (both endpoints outside) uses
// the closest-approach parameter.
inline std::optional<double> first_radius_time(const TraceCurve& curve,
                                               int n) {
  if (n < 1) throw std::invalid_argument("first_radius_time: n must be >= 1");
  if (curve.t.size() != curve.z.size() || curve.t.empty())
    throw std::invalid_argument("first_radius_time: malformed curve");
  const double r = std::exp(static_cast<double>(-n));
  if (std::abs(curve.z.front()) <= r) return curve.t.front();
  for (std::size_t i = 0; i + 1 < curve.z.size(); ++i) {
    const cplx p = curve.z[i], q = curve.z[i + 1];
    const double rp = std::abs(p), rq = std::abs(q);
    if (rq <= r) {
      const double lr = std::log(r);
      const double lp = std::log(rp), lq = std::log(rq);
      const double frac = (lp - lr) / std::max(lp - lq, 1e-300);
      return curve.t[i] + (curve.t[i + 1] - curve.t[i]) *
                              std::clamp(frac, 0.0, 1.0);
    }
    // Interior dip: closest approach of the segment to the origin.
    const cplx dz = q - p;
    const double len2 = std::norm(dz);
    if (len2 > 0) {
      const double u = std::clamp(
          -(p.real() * dz.real() + p.imag() * dz.imag()) / len2, 0.0, 1.0);
      if (std::abs(p + u * dz) <= r)
        return curve.t[i] + (curve.t[i + 1] - curve.t[i]) * u;
    }
  }
  return std::nullopt;
}

}  // namespace slelab
