#pragma once

// Crosscut geometry for the traced curve: arcs of the circles |z| = e^{-k}
// surviving in the unexplored domain, the family bounding the component of
// the origin, harmonic-length proxies via the forward flow, and a
// walk-on-spheres oracle for harmonic measure.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "slelab/loewner.hpp"
#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

// Open arc of the circle of radius e^{-k}; angles in radians, span < 2pi.
struct CircleArc {
  int k = 1;
  double theta_lo = 0;
  double theta_hi = 0;

  double radius() const { return std::exp(static_cast<double>(-k)); }
  double span() const { return theta_hi - theta_lo; }

  void validate() const {
    if (k < 1) throw std::invalid_argument("CircleArc: k must be >= 1");
    const double s = span();
    if (!(s > 0) || !(s < 2.0 * kPi))
      throw std::invalid_argument("CircleArc: span must lie in (0, 2pi)");
  }
};

struct CrosscutFamily {
  int n = 0;
  int k = 0;
  std::vector<CircleArc> arcs;
  std::optional<std::size_t> star_index;  // distinguished arc, when defined
};

struct HarmonicLengths {
  double L = 0;      // harmonic length of the arc
  double Lstar = 0;  // smaller of the two tip-side gaps
};

namespace detail {

inline double wrap_2pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0 ? a + 2.0 * kPi : a;
}

// Is angle t inside [lo, lo + span] on the circle?
inline bool angle_in(double t, double lo, double span) {
  return wrap_2pi(t - lo) <= span;
}

inline double dist_point_segment(cplx z, cplx p, cplx q) {
  const cplx d = q - p;
  const double len2 = std::norm(d);
  if (len2 <= 0) return std::abs(z - p);
  const double u = std::clamp(
      ((z - p).real() * d.real() + (z - p).imag() * d.imag()) / len2, 0.0, 1.0);
  return std::abs(z - (p + u * d));
}

// Parameters u in [0,1] where segment p->q crosses the circle of radius r.
inline int segment_circle_params(cplx p, cplx q, double r, double u_out[2]) {
  const cplx d = q - p;
  const double A = std::norm(d);
  if (A <= 0) return 0;
  const double B = 2.0 * (p.real() * d.real() + p.imag() * d.imag());
  const double C = std::norm(p) - r * r;
  const double disc = B * B - 4.0 * A * C;
  if (disc < 0) return 0;
  const double sq = std::sqrt(disc);
  int m = 0;
  for (const double u : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)})
    if (u >= 0.0 && u <= 1.0) u_out[m++] = u;
  return m;
}

}  // namespace detail

// Polyline of the traced curve clipped at time t (with an interpolated final
// vertex when t falls between samples).
inline std::vector<cplx> clip_polyline(const TraceCurve& curve, double t) {
  if (curve.t.empty() || curve.t.size() != curve.z.size())
    throw std::invalid_argument("clip_polyline: malformed curve");
  std::vector<cplx> out;
  out.reserve(curve.t.size());
  out.push_back(curve.z.front());
  for (std::size_t i = 1; i < curve.t.size(); ++i) {
    if (curve.t[i] <= t) {
      out.push_back(curve.z[i]);
      continue;
    }
    const double span = curve.t[i] - curve.t[i - 1];
    if (span > 0 && t > curve.t[i - 1]) {
      const double u = (t - curve.t[i - 1]) / span;
      out.push_back(curve.z[i - 1] + u * (curve.z[i] - curve.z[i - 1]));
    }
    break;
  }
  return out;
}

// First time (interpolated along segments) at which the trace crosses the
// arc, restricted to trace times >= t_start; absent if it never does.
inline std::optional<double> crosscut_hit(const TraceCurve& curve,
                                          const CircleArc& arc,
                                          double t_start = 0) {
  arc.validate();
  if (curve.t.size() != curve.z.size() || curve.t.size() < 2)
    throw std::invalid_argument("crosscut_hit: malformed curve");
  const double r = arc.radius();
  const double span = arc.span();
  for (std::size_t i = 0; i + 1 < curve.z.size(); ++i) {
    if (curve.t[i + 1] < t_start) continue;
    double us[2];
    const int m =
        detail::segment_circle_params(curve.z[i], curve.z[i + 1], r, us);
    double best = std::numeric_limits<double>::infinity();
    for (int q = 0; q < m; ++q) {
      const cplx zc = curve.z[i] + us[q] * (curve.z[i + 1] - curve.z[i]);
      if (!detail::angle_in(std::arg(zc), arc.theta_lo, span)) continue;
      const double tc =
          curve.t[i] + us[q] * (curve.t[i + 1] - curve.t[i]);
      if (tc >= t_start) best = std::min(best, tc);
    }
    if (best < std::numeric_limits<double>::infinity()) return best;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Occupancy grid + flood fill.

struct OccGrid {
  double R = 1;   // half-extent of the square
  double h = 0;   // cell size
  int nx = 0;     // cells per side
  std::vector<std::uint8_t> blocked;
  std::vector<std::uint8_t> reach;

  int index_of(cplx z) const {
    const int ix = static_cast<int>(std::floor((z.real() + R) / h));
    const int iy = static_cast<int>(std::floor((z.imag() + R) / h));
    if (ix < 0 || iy < 0 || ix >= nx || iy >= nx) return -1;
    return iy * nx + ix;
  }
  cplx center(int idx) const {
    const int ix = idx % nx, iy = idx / nx;
    return {-R + (ix + 0.5) * h, -R + (iy + 0.5) * h};
  }
};

namespace detail {

inline OccGrid make_grid(double R, double h,
                         const std::vector<cplx>& polyline, double wall_r) {
  OccGrid g;
  g.R = R;
  g.h = h;
  g.nx = static_cast<int>(std::ceil(2.0 * R / h));
  g.blocked.assign(static_cast<std::size_t>(g.nx) * g.nx, 0);
  // Outside the disk of radius R.
  for (int iy = 0; iy < g.nx; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      const cplx c{-R + (ix + 0.5) * h, -R + (iy + 0.5) * h};
      if (std::abs(c) >= R) g.blocked[iy * g.nx + ix] = 1;
    }
  // Rasterize the curve as a wall.
  const double pad = wall_r + 0.71 * h;
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const cplx p = polyline[i], q = polyline[i + 1];
    const double x0 = std::min(p.real(), q.real()) - pad;
    const double x1 = std::max(p.real(), q.real()) + pad;
    const double y0 = std::min(p.imag(), q.imag()) - pad;
    const double y1 = std::max(p.imag(), q.imag()) + pad;
    const int ix0 = std::max(0, static_cast<int>(std::floor((x0 + R) / h)));
    const int ix1 =
        std::min(g.nx - 1, static_cast<int>(std::floor((x1 + R) / h)));
    const int iy0 = std::max(0, static_cast<int>(std::floor((y0 + R) / h)));
    const int iy1 =
        std::min(g.nx - 1, static_cast<int>(std::floor((y1 + R) / h)));
    for (int iy = iy0; iy <= iy1; ++iy)
      for (int ix = ix0; ix <= ix1; ++ix) {
        const cplx c{-R + (ix + 0.5) * h, -R + (iy + 0.5) * h};
        if (dist_point_segment(c, p, q) <= wall_r)
          g.blocked[iy * g.nx + ix] = 1;
      }
  }
  return g;
}

// Extra wall along a circular arc (used to block candidate crosscuts).
inline void block_arc(OccGrid& g, double radius, double lo, double span,
                      double wall_r) {
  const double dtheta = 0.5 * g.h / radius;
  const int steps = static_cast<int>(std::ceil(span / dtheta)) + 1;
  for (int s = 0; s <= steps; ++s) {
    const double th = lo + span * s / steps;
    const cplx c = std::polar(radius, th);
    const int r_cells = static_cast<int>(std::ceil((wall_r + g.h) / g.h));
    const int cx = static_cast<int>(std::floor((c.real() + g.R) / g.h));
    const int cy = static_cast<int>(std::floor((c.imag() + g.R) / g.h));
    for (int iy = cy - r_cells; iy <= cy + r_cells; ++iy)
      for (int ix = cx - r_cells; ix <= cx + r_cells; ++ix) {
        if (ix < 0 || iy < 0 || ix >= g.nx || iy >= g.nx) continue;
        const cplx cc{-g.R + (ix + 0.5) * g.h, -g.R + (iy + 0.5) * g.h};
        if (std::abs(cc - c) <= wall_r) g.blocked[iy * g.nx + ix] = 1;
      }
  }
}

// 4-connected flood fill from the cell containing seed.
inline void flood(OccGrid& g, cplx seed) {
  g.reach.assign(g.blocked.size(), 0);
  const int start = g.index_of(seed);
  if (start < 0 || g.blocked[start]) return;
  std::queue<int> q;
  q.push(start);
  g.reach[start] = 1;
  while (!q.empty()) {
    const int cur = q.front();
    q.pop();
    const int ix = cur % g.nx, iy = cur / g.nx;
    const int nb[4] = {cur - 1, cur + 1, cur - g.nx, cur + g.nx};
    const bool ok[4] = {ix > 0, ix < g.nx - 1, iy > 0, iy < g.nx - 1};
    for (int d = 0; d < 4; ++d)
      if (ok[d] && !g.blocked[nb[d]] && !g.reach[nb[d]]) {
        g.reach[nb[d]] = 1;
        q.push(nb[d]);
      }
  }
}

// Does the 0-component reach the outer ring of the grid disk?
inline bool reaches_rim(const OccGrid& g, double rim_radius) {
  for (std::size_t i = 0; i < g.reach.size(); ++i)
    if (g.reach[i] && std::abs(g.center(static_cast<int>(i))) >= rim_radius)
      return true;
  return false;
}

}  // namespace detail

struct ArcComponentsOptions {
  int cells_per_radius = 256;   // flood-fill resolution inside |z| < e^{-k}
  int star_cells_per_radius = 128;  // resolution of the full-disk grid
  double wall_factor = 0.75;    // wall half-width, in cells
  bool compute_star = true;
  FlowOptions flow{};
};

// The family of circle arcs of |z| = e^{-k} that survive in the unexplored
// domain at the first time the trace reaches |z| = e^{-n} and that bound the
// component of the origin.  Survival of a sampled circle point means its
// forward flow is alive at that time.  star_index is the arc whose removal
// disconnects 0 from the boundary ring of the unit disk, when exactly one
// such arc exists.
inline CrosscutFamily arc_components(const DrivingPath& U, double a,
                                     const TraceCurve& curve, int n, int k,
                                     int angular_resolution,
                                     const ArcComponentsOptions& opt = {}) {
  if (angular_resolution < 8)
    throw std::invalid_argument("arc_components: angular_resolution < 8");
  if (k < 1 || n <= k)
    throw std::invalid_argument("arc_components: need 1 <= k < n");
  const auto rho_n = first_radius_time(curve, n);
  if (!rho_n)
    throw std::domain_error("arc_components: curve never reaches e^{-n}");

  const double R = std::exp(static_cast<double>(-k));
  const int res = angular_resolution;

  // Survival of sampled circle points under the forward flow.
  std::vector<std::uint8_t> alive(res, 0);
  std::vector<std::size_t> order(res);
  for (int i = 0; i < res; ++i) order[i] = i;
  parallel_for_samples(res, [&](std::uint64_t i) {
    const double th = 2.0 * kPi * static_cast<double>(i) / res;
    const FlowResult fr =
        forward_flow_point(U, a, std::polar(R, th), *rho_n, opt.flow);
    alive[i] = fr.swallowed ? 0 : 1;
  });

  // Maximal circular runs of consecutive surviving samples.
  struct Run {
    int first = 0, len = 0;
  };
  std::vector<Run> runs;
  int total_alive = 0;
  for (int i = 0; i < res; ++i) total_alive += alive[i];
  const double step = 2.0 * kPi / res;
  CrosscutFamily fam;
  fam.n = n;
  fam.k = k;
  if (total_alive == res) {
    // Degenerate: no sampled point swallowed; report one near-full arc.
    fam.arcs.push_back(CircleArc{k, 0.0, 2.0 * kPi - step});
  } else if (total_alive > 0) {
    int i0 = 0;
    while (alive[i0]) i0 = (i0 + 1) % res;  // start at a dead sample
    int i = i0;
    do {
      if (alive[i]) {
        Run r;
        r.first = i;
        while (alive[i]) {
          ++r.len;
          i = (i + 1) % res;
        }
        runs.push_back(r);
      } else {
        i = (i + 1) % res;
      }
    } while (i != i0);
    for (const Run& r : runs) {
      if (r.len < 2) continue;  // below resolution: discard
      const double lo = r.first * step - 0.5 * step;
      const double hi = (r.first + r.len - 1) * step + 0.5 * step;
      fam.arcs.push_back(CircleArc{k, lo, hi});
    }
  }

  // Keep only arcs adjacent (from inside) to the flood-fill component of the
  // origin in |z| < e^{-k}.
  const std::vector<cplx> poly = clip_polyline(curve, *rho_n);
  {
    const double h = R / opt.cells_per_radius;
    OccGrid g = detail::make_grid(R, h, poly, opt.wall_factor * h);
    detail::flood(g, cplx{0, 0});
    std::vector<CircleArc> kept;
    for (const CircleArc& arc : fam.arcs) {
      const double r_test = R - 2.5 * h;
      const int nprobe =
          std::max(4, static_cast<int>(std::ceil(arc.span() / (h / R))));
      bool touches = false;
      for (int s = 0; s <= nprobe && !touches; ++s) {
        const double th = arc.theta_lo + arc.span() * s / nprobe;
        const int idx = g.index_of(std::polar(r_test, th));
        if (idx >= 0 && g.reach[idx]) touches = true;
      }
      if (touches) kept.push_back(arc);
    }
    fam.arcs = std::move(kept);
  }

  if (opt.compute_star && !fam.arcs.empty()) {
    const double hg =
        std::min(1.0 / opt.star_cells_per_radius, R / opt.star_cells_per_radius);
    OccGrid base = detail::make_grid(1.0, hg, poly, opt.wall_factor * hg);
    detail::flood(base, cplx{0, 0});
    const double rim = 1.0 - 3.0 * hg;
    if (detail::reaches_rim(base, rim)) {
      std::optional<std::size_t> star;
      int n_disconnecting = 0;
      for (std::size_t ai = 0; ai < fam.arcs.size(); ++ai) {
        OccGrid g = base;  // reuse walls, add the arc
        // Reported arcs stop at the surviving samples, so a sub-resolution
        // gap separates each end from the curve; extend by one sample step
        // when blocking, closing the wall onto the curve as a true crosscut.
        detail::block_arc(g, R, fam.arcs[ai].theta_lo - step,
                          fam.arcs[ai].span() + 2.0 * step,
                          opt.wall_factor * hg);
        detail::flood(g, cplx{0, 0});
        if (!detail::reaches_rim(g, rim)) {
          ++n_disconnecting;
          star = ai;
        }
      }
      if (n_disconnecting == 1) fam.star_index = star;
    }
  }
  return fam;
}

// Number of arcs in the family whose individual removal disconnects the
// origin from the circle |z| = e^{-j} (j < k) inside the unexplored domain.
// The uniqueness statement for the access crosscut predicts exactly one.
// `closure_angle` pads each blocked arc so its wall reaches the curve across
// the sub-resolution gap left by sampling; it should be at least the angular
// sample step used to build the family.
inline int access_arc_count(const TraceCurve& curve, double rho_n,
                            const CrosscutFamily& fam, int j,
                            const ArcComponentsOptions& opt = {},
                            double closure_angle = 2.0 * kPi / 256.0) {
  if (j < 1 || j >= fam.k)
    throw std::invalid_argument("access_arc_count: need 1 <= j < k");
  if (!(closure_angle >= 0))
    throw std::invalid_argument("access_arc_count: closure_angle must be >= 0");
  const double Rj = std::exp(static_cast<double>(-j));
  const double Rk = std::exp(static_cast<double>(-fam.k));
  const double h = Rk / opt.star_cells_per_radius;
  const std::vector<cplx> poly = clip_polyline(curve, rho_n);
  OccGrid base = detail::make_grid(Rj, h, poly, opt.wall_factor * h);
  const double rim = Rj - 3.0 * h;
  int count = 0;
  for (const CircleArc& arc : fam.arcs) {
    OccGrid g = base;
    detail::block_arc(g, Rk, arc.theta_lo - closure_angle,
                      arc.span() + 2.0 * closure_angle, opt.wall_factor * h);
    detail::flood(g, cplx{0, 0});
    if (!detail::reaches_rim(g, rim)) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Harmonic lengths via the forward flow.

struct HarmonicArc {
  int k = 0;  // 0 means an arc of the unit circle itself
  double theta_lo = 0;
  double theta_hi = 0;
};

// Flow the arc endpoints (and midpoint, to resolve orientation) to time t and
// read off the three angular gaps cut by the endpoint images and the tip
// image e^{2iU_t}:  L is the gap subtended by the arc, Lstar the smaller of
// the two gaps adjacent to the tip.
inline HarmonicLengths harmonic_lengths(const DrivingPath& U, double a,
                                        double t, const HarmonicArc& arc,
                                        const FlowOptions& opt = {}) {
  if (arc.k < 0) throw std::invalid_argument("harmonic_lengths: k must be >= 0");
  const double span = arc.theta_hi - arc.theta_lo;
  if (!(span > 0) || !(span < 2.0 * kPi))
    throw std::invalid_argument("harmonic_lengths: bad arc span");

  const auto image_angle = [&](double th) -> double {
    if (arc.k == 0) {
      const AngleFlow af = boundary_angle_flow(U, a, 0.5 * th, t, opt);
      if (af.swallowed)
        throw std::domain_error("harmonic_lengths: arc point swallowed");
      return 2.0 * af.theta.back();
    }
    const double R = std::exp(static_cast<double>(-arc.k));
    const FlowResult fr =
        forward_flow_point(U, a, std::polar(R, th), t, opt);
    if (fr.swallowed)
      throw std::domain_error("harmonic_lengths: arc point swallowed");
    return std::arg(fr.z);
  };

  const double phi1 = detail::wrap_2pi(image_angle(arc.theta_lo));
  const double phi2 = detail::wrap_2pi(image_angle(arc.theta_hi));
  const double phim =
      detail::wrap_2pi(image_angle(arc.theta_lo + 0.5 * span));
  const double tip = detail::wrap_2pi(2.0 * U.at(t));

  // ccw gap from phi1 to phi2 or the complement, whichever holds phim.
  const double g12 = detail::wrap_2pi(phi2 - phi1);
  double L, lo_end, hi_end;  // L-gap runs ccw lo_end -> hi_end
  if (detail::wrap_2pi(phim - phi1) <= g12) {
    L = g12;
    lo_end = phi1;
    hi_end = phi2;
  } else {
    L = 2.0 * kPi - g12;
    lo_end = phi2;
    hi_end = phi1;
  }
  const double gap_a = detail::wrap_2pi(tip - hi_end);   // hi_end -> tip
  const double gap_b = detail::wrap_2pi(lo_end - tip);   // tip -> lo_end
  HarmonicLengths out;
  out.L = L / (2.0 * kPi);
  out.Lstar = std::min(gap_a, gap_b) / (2.0 * kPi);
  return out;
}

// ---------------------------------------------------------------------------
// Walk-on-spheres oracle.

struct WalkTarget {
  enum class Kind { BoundaryArc, Crosscut } kind = Kind::BoundaryArc;
  double theta_lo = 0;  // boundary arc of the unit circle
  double theta_hi = 0;
  CircleArc arc{};      // crosscut target
};

inline WalkTarget boundary_target(double lo, double hi) {
  WalkTarget t;
  t.kind = WalkTarget::Kind::BoundaryArc;
  t.theta_lo = lo;
  t.theta_hi = hi;
  return t;
}

inline WalkTarget crosscut_target(const CircleArc& arc) {
  WalkTarget t;
  t.kind = WalkTarget::Kind::Crosscut;
  t.arc = arc;
  return t;
}

// Probability that Brownian motion from z0 exits the slit domain (disk minus
// the curve up to time t) on the target: for a boundary arc, through that arc
// of the unit circle; for a crosscut, on the far side of the arc (crossing
// parity), which matches the gap convention of harmonic_lengths.
inline McEstimate brownian_harmonic_measure(
    const TraceCurve& curve, double t, const WalkTarget& target, cplx z0,
    std::uint64_t n_walks, double step, std::uint64_t master_seed,
    const std::string& experiment_id = "wos") {
  if (n_walks == 0)
    throw std::invalid_argument("brownian_harmonic_measure: n_walks >= 1");
  if (!(step > 0) || step > 1e-1)
    throw std::invalid_argument("brownian_harmonic_measure: bad step");
  const std::vector<cplx> poly = clip_polyline(curve, t);
  const auto dist_poly = [&](cplx z) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < poly.size(); ++i)
      d = std::min(d, detail::dist_point_segment(z, poly[i], poly[i + 1]));
    return d;
  };
  const auto dist_domain = [&](cplx z) {
    return std::min(1.0 - std::abs(z), dist_poly(z));
  };
  if (!(dist_domain(z0) > 2.0 * step))
    throw std::domain_error(
        "brownian_harmonic_measure: z0 too close to the boundary");

  const bool is_arc = target.kind == WalkTarget::Kind::Crosscut;
  double arc_r = 0, arc_lo = 0, arc_span = 0;
  if (is_arc) {
    target.arc.validate();
    arc_r = target.arc.radius();
    arc_lo = target.arc.theta_lo;
    arc_span = target.arc.span();
  } else if (!(target.theta_hi > target.theta_lo)) {
    throw std::invalid_argument("brownian_harmonic_measure: bad boundary arc");
  }

  std::vector<unsigned char> success(n_walks, 0);
  parallel_for_samples(n_walks, [&](std::uint64_t i) {
    Rng rng(master_seed, experiment_id, i);
    cplx z = z0;
    bool behind = false;
    for (long iter = 0; iter < 100000; ++iter) {
      const double d = dist_domain(z);
      if (d <= step) {
        if (is_arc) {
          success[i] = behind ? 1 : 0;
        } else {
          const bool on_circle = (1.0 - std::abs(z)) <= dist_poly(z);
          success[i] =
              (on_circle &&
               detail::angle_in(std::arg(z), target.theta_lo,
                                target.theta_hi - target.theta_lo))
                  ? 1
                  : 0;
        }
        return;
      }
      const cplx znew = z + std::polar(d, 2.0 * kPi * rng.uniform());
      if (is_arc) {
        double us[2];
        const int m = detail::segment_circle_params(z, znew, arc_r, us);
        for (int q = 0; q < m; ++q) {
          const cplx zc = z + us[q] * (znew - z);
          if (detail::angle_in(std::arg(zc), arc_lo, arc_span))
            behind = !behind;
        }
      }
      z = znew;
    }
    success[i] = 0;  // walk budget exhausted: count as a miss
  });
  RunningStat s;
  for (auto v : success) s.add(static_cast<double>(v));
  return make_estimate(s, master_seed, experiment_id);
}

}  // namespace slelab
