#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <slelab/geometry.hpp>
#include <slelab/loewner.hpp>
#include <slelab/params.hpp>

using namespace slelab;

namespace {

DrivingPath zero_driving(double dt, double t_end) {
  DrivingPath U;
  U.dt = dt;
  U.values.assign(static_cast<std::size_t>(std::llround(t_end / dt)) + 1, 0.0);
  return U;
}

TraceCurve line_curve(std::vector<double> t, std::vector<cplx> z) {
  TraceCurve c;
  c.t = std::move(t);
  c.z = std::move(z);
  return c;
}

// Harmonic measure of the boundary arc (lo, hi) of the unit circle seen from
// z, via the Moebius map w -> (w - z) / (1 - conj(z) w): the measure is the
// normalized length of the image arc, picked out by the midpoint image.
double disk_arc_hm(cplx z, double lo, double hi) {
  const auto image = [&](double th) {
    const cplx w = std::polar(1.0, th);
    return detail::wrap_2pi(std::arg((w - z) / (1.0 - std::conj(z) * w)));
  };
  const double p1 = image(lo);
  const double p2 = image(hi);
  const double pm = image(0.5 * (lo + hi));
  const double g12 = detail::wrap_2pi(p2 - p1);
  const double L =
      detail::wrap_2pi(pm - p1) <= g12 ? g12 : 2.0 * kPi - g12;
  return L / (2.0 * kPi);
}

}  // namespace

TEST_CASE("circle arc validation") {
  CircleArc arc{2, 0.1, 0.5};
  arc.validate();
  CHECK(arc.radius() == Catch::Approx(std::exp(-2.0)));
  CHECK(arc.span() == Catch::Approx(0.4));
  CHECK_THROWS_AS((CircleArc{0, 0.1, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CircleArc{1, 0.5, 0.5}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((CircleArc{1, 0.0, 7.0}.validate()), std::invalid_argument);
}

TEST_CASE("polyline clipping") {
  const TraceCurve c =
      line_curve({0.0, 1.0, 2.0}, {cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}});
  const auto half = clip_polyline(c, 0.5);
  REQUIRE(half.size() == 2);
  CHECK(std::abs(half[1] - cplx{0.5, 0.5}) < 1e-15);
  const auto exact = clip_polyline(c, 1.0);
  REQUIRE(exact.size() == 2);
  CHECK(exact[1] == cplx{0, 1});
  CHECK(clip_polyline(c, 10.0).size() == 3);
  CHECK(clip_polyline(c, 0.0).size() == 1);
  TraceCurve bad;
  CHECK_THROWS_AS(clip_polyline(bad, 1.0), std::invalid_argument);
}

TEST_CASE("crosscut hit times on synthetic polylines") {
  const double r = std::exp(-1.0);
  const TraceCurve in = line_curve({0.0, 1.0}, {cplx{1, 0}, cplx{0.2, 0}});
  const CircleArc front{1, -0.5, 0.5};
  const auto hit = crosscut_hit(in, front);
  REQUIRE(hit.has_value());
  CHECK(*hit == Catch::Approx((1.0 - r) / 0.8).margin(1e-12));

  // An arc on the far side of the circle is never touched.
  const CircleArc back{1, kPi - 0.5, kPi + 0.5};
  CHECK_FALSE(crosscut_hit(in, back).has_value());

  // Restarting past the first crossing finds the second one.
  const TraceCurve twice =
      line_curve({0.0, 1.0, 2.0}, {cplx{1, 0}, cplx{0.2, 0}, cplx{1, 0}});
  const auto second = crosscut_hit(twice, front, 1.0);
  REQUIRE(second.has_value());
  CHECK(*second == Catch::Approx(1.0 + (r - 0.2) / 0.8).margin(1e-12));

  const TraceCurve point = line_curve({0.0}, {cplx{1, 0}});
  CHECK_THROWS_AS(crosscut_hit(point, front), std::invalid_argument);
}

TEST_CASE("occupancy grid flood fill") {
  const std::vector<cplx> empty;
  OccGrid g = detail::make_grid(1.0, 0.02, empty, 0.015);
  detail::flood(g, cplx{0, 0});
  CHECK(detail::reaches_rim(g, 0.9));
  detail::block_arc(g, 0.5, 0.0, 2.0 * kPi, 0.03);
  detail::flood(g, cplx{0, 0});
  CHECK_FALSE(detail::reaches_rim(g, 0.9));
}

TEST_CASE("arc family of the straight slit") {
  const double a = 0.5;
  const DrivingPath U = zero_driving(5e-4, 1.0);
  TraceOptions topt;
  topt.stride = 4;
  const TraceCurve curve = trace_curve(U, a, topt);

  const CrosscutFamily fam = arc_components(U, a, curve, 2, 1, 64);
  REQUIRE(fam.n == 2);
  REQUIRE(fam.k == 1);
  REQUIRE(fam.arcs.size() == 1);
  // The slit removes only the angle-0 point of the circle: one near-full arc.
  const double step = 2.0 * kPi / 64;
  CHECK(fam.arcs[0].span() > 2.0 * kPi - 4.0 * step);
  CHECK(fam.arcs[0].span() < 2.0 * kPi);
  REQUIRE(fam.star_index.has_value());
  CHECK(*fam.star_index == 0);

  // Doubling the angular resolution changes nothing structural.
  const CrosscutFamily fine = arc_components(U, a, curve, 2, 1, 128);
  REQUIRE(fine.arcs.size() == 1);
  REQUIRE(fine.star_index.has_value());
  CHECK(std::fabs(fine.arcs[0].span() - fam.arcs[0].span()) < 2.0 * step);

  // Total angular extent never exceeds the full circle.
  double total = 0;
  for (const CircleArc& arc : fam.arcs) total += arc.span();
  CHECK(total <= 2.0 * kPi);

  CHECK_THROWS_AS(arc_components(U, a, curve, 2, 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(arc_components(U, a, curve, 1, 1, 64), std::invalid_argument);
  CHECK_THROWS_AS(arc_components(U, a, curve, 2, 0, 64), std::invalid_argument);

  // A short curve never reaches e^{-2}.
  const DrivingPath Ushort = zero_driving(1e-3, 0.05);
  const TraceCurve shallow = trace_curve(Ushort, a, topt);
  CHECK_THROWS_AS(arc_components(Ushort, a, shallow, 2, 1, 64),
                  std::domain_error);
}

TEST_CASE("access arc count for the straight slit") {
  const double a = 0.5;
  const DrivingPath U = zero_driving(5e-4, 1.8);
  TraceOptions topt;
  topt.stride = 4;
  const TraceCurve curve = trace_curve(U, a, topt);
  const auto rho3 = first_radius_time(curve, 3);
  REQUIRE(rho3.has_value());

  ArcComponentsOptions aopt;
  aopt.compute_star = false;
  const CrosscutFamily fam = arc_components(U, a, curve, 3, 2, 64, aopt);
  REQUIRE(fam.arcs.size() == 1);
  const double closure = 2.0 * kPi / 64;  // match the sampling step above
  CHECK(access_arc_count(curve, *rho3, fam, 1, aopt, closure) == 1);

  // A small arc away from the slit does not separate the origin.
  CrosscutFamily decoy;
  decoy.n = 3;
  decoy.k = 2;
  decoy.arcs.push_back(CircleArc{2, kPi / 2.0 - 0.15, kPi / 2.0 + 0.15});
  CHECK(access_arc_count(curve, *rho3, decoy, 1) == 0);

  CHECK_THROWS_AS(access_arc_count(curve, *rho3, fam, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(access_arc_count(curve, *rho3, fam, 0),
                  std::invalid_argument);
}

TEST_CASE("harmonic lengths in the unexplored full disk") {
  const DrivingPath U = zero_driving(0.5, 1.0);
  for (double s : {0.25, 0.6}) {
    const HarmonicArc arc{0, 0.3, 0.3 + 2.0 * kPi * s};
    const HarmonicLengths hl = harmonic_lengths(U, 0.5, 0.0, arc);
    CHECK(hl.L == Catch::Approx(s).margin(1e-12));
    // Tip sits at angle 0; the nearer tip-side gap is the 0.3 offset.
    CHECK(hl.Lstar == Catch::Approx(0.3 / (2.0 * kPi)).margin(1e-12));
    CHECK(hl.Lstar <= 0.5 * (1.0 - hl.L) + 1e-12);
  }
  CHECK_THROWS_AS(harmonic_lengths(U, 0.5, 0.0, HarmonicArc{-1, 0.1, 0.2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(harmonic_lengths(U, 0.5, 0.0, HarmonicArc{0, 0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("harmonic lengths of arcs symmetric about the slit") {
  const double a = 0.5;
  const DrivingPath U = zero_driving(5e-4, 1.0);
  // Boundary arc mirrored across the real axis: both tip-side gaps agree.
  const HarmonicArc sym{0, kPi - 0.5, kPi + 0.5};
  const HarmonicLengths hl = harmonic_lengths(U, a, 0.5, sym);
  CHECK(hl.L > 0.0);
  CHECK(hl.L < 1.0);
  CHECK(hl.Lstar == Catch::Approx(0.5 * (1.0 - hl.L)).margin(1e-9));

  // Interior arc on a circle the slit has not yet reached.
  const HarmonicArc inner{1, kPi - 0.7, kPi + 0.7};
  const HarmonicLengths in = harmonic_lengths(U, a, 0.1, inner);
  CHECK(in.L > 0.0);
  CHECK(in.L < 1.0);
  CHECK(in.Lstar == Catch::Approx(0.5 * (1.0 - in.L)).margin(1e-9));
}

TEST_CASE("walk-on-spheres matches the disk closed form") {
  // A one-point "curve" leaves the domain a clean unit disk.
  const TraceCurve none = line_curve({0.0}, {cplx{-0.9, 0}});
  const double lo = 0.5, hi = 1.7;
  CHECK(disk_arc_hm(cplx{0, 0}, lo, hi) ==
        Catch::Approx((hi - lo) / (2.0 * kPi)).margin(1e-12));
  const cplx z0{0.3, 0.2};
  const double exact = disk_arc_hm(z0, lo, hi);
  const McEstimate est = brownian_harmonic_measure(
      none, 0.0, boundary_target(lo, hi), z0, 3000, 0.005, 424242, "t-wos");
  CHECK(std::fabs(est.mean - exact) <= 4.0 * est.stderr_mean + 0.01);
}

TEST_CASE("walk-on-spheres crossing parity") {
  const TraceCurve none = line_curve({0.0}, {cplx{-0.9, 0}});
  const CircleArc nearly_all{1, 0.005, 2.0 * kPi - 0.005};
  // From the center every exit crosses the circle an odd number of times.
  const McEstimate inside = brownian_harmonic_measure(
      none, 0.0, crosscut_target(nearly_all), cplx{0, 0}, 1000, 0.005, 7,
      "t-wos-in");
  CHECK(inside.mean >= 0.98);
  // From outside the circle the crossing count at death is even.
  const McEstimate outside = brownian_harmonic_measure(
      none, 0.0, crosscut_target(nearly_all), cplx{-0.7, 0}, 1000, 0.005, 8,
      "t-wos-out");
  CHECK(outside.mean <= 0.02);
}

TEST_CASE("walk-on-spheres against the flow for the slit") {
  const double a = 0.5;
  const DrivingPath U = zero_driving(5e-4, 1.0);
  TraceOptions topt;
  topt.stride = 4;
  const TraceCurve curve = trace_curve(U, a, topt);

  const double lo = kPi / 2.0, hi = kPi;
  const HarmonicLengths hl = harmonic_lengths(U, a, 0.5, HarmonicArc{0, lo, hi});

  // Thin the polyline: the slit is straight, so this loses nothing.
  TraceCurve coarse;
  for (std::size_t i = 0; i < curve.t.size(); i += 5) {
    coarse.t.push_back(curve.t[i]);
    coarse.z.push_back(curve.z[i]);
  }
  coarse.t.push_back(curve.t.back());
  coarse.z.push_back(curve.z.back());

  const McEstimate est = brownian_harmonic_measure(
      coarse, 0.5, boundary_target(lo, hi), cplx{0, 0}, 2000, 0.002, 99,
      "t-wos-slit");
  CHECK(std::fabs(est.mean - hl.L) <= 4.0 * est.stderr_mean + 0.015);
}

TEST_CASE("walk-on-spheres argument validation") {
  const TraceCurve none = line_curve({0.0}, {cplx{-0.9, 0}});
  CHECK_THROWS_AS(brownian_harmonic_measure(none, 0.0, boundary_target(0, 1),
                                            cplx{0, 0}, 0, 0.005, 1, "t"),
                  std::invalid_argument);
  CHECK_THROWS_AS(brownian_harmonic_measure(none, 0.0, boundary_target(0, 1),
                                            cplx{0, 0}, 10, 0.5, 1, "t"),
                  std::invalid_argument);
  CHECK_THROWS_AS(brownian_harmonic_measure(none, 0.0, boundary_target(1, 0),
                                            cplx{0, 0}, 10, 0.005, 1, "t"),
                  std::invalid_argument);
  CHECK_THROWS_AS(brownian_harmonic_measure(none, 0.0, boundary_target(0, 1),
                                            cplx{0.999, 0}, 10, 0.005, 1, "t"),
                  std::domain_error);
}
