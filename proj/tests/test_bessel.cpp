#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <slelab/bessel.hpp>
#include <slelab/params.hpp>
#include <slelab/rng.hpp>

using namespace slelab;

TEST_CASE("scale-function quadrature against closed forms") {
  CHECK(exact_F(1.0, kPi / 4.0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(exact_F(2.0, kPi / 4.0) == Catch::Approx(4.0 / 3.0).margin(1e-12));
  CHECK(exact_F(0.8, kPi / 2.0) == 0.0);
  for (double x = 0.05; x < 0.5 * kPi; x += 0.07) {
    const double c = std::cos(x) / std::sin(x);
    CHECK(std::fabs(exact_F(1.0, x) - c) < 1e-10);
    CHECK(std::fabs(exact_F(2.0, x) - (c + c * c * c / 3.0)) < 1e-10);
  }
  CHECK_THROWS_AS(exact_F(0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(exact_F(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(exact_F(1.0, 2.0), std::domain_error);
}

TEST_CASE("exact exit probability and its monotonicity") {
  CHECK(exit_prob_exact(1.0, kPi / 3.0, kPi / 6.0) ==
        Catch::Approx(1.0 / 3.0).margin(1e-12));
  CHECK(exit_prob_exact(1.0, kPi / 6.0, kPi / 6.0) == Catch::Approx(1.0));
  CHECK(exit_prob_exact(1.0, kPi / 2.0, kPi / 6.0) ==
        Catch::Approx(0.0).margin(1e-15));
  // Strictly decreasing in x, strictly increasing in eps.
  double prev = 1.0;
  for (double x = 0.6; x < 1.5; x += 0.2) {
    const double p = exit_prob_exact(0.9, x, 0.5);
    CHECK(p < prev);
    prev = p;
  }
  prev = 0.0;
  for (double e = 0.2; e < 1.0; e += 0.2) {
    const double p = exit_prob_exact(0.9, 1.1, e);
    CHECK(p > prev);
    prev = p;
  }
  CHECK_THROWS_AS(exit_prob_exact(1.0, 0.4, 0.5), std::domain_error);
}

TEST_CASE("simulate_bessel basics") {
  Rng rng(5, "sim", 0);
  const BesselPath p0 = simulate_bessel(1.0, 1.0, 0.0, 1e-3, rng);
  REQUIRE(p0.t.size() == 1);
  CHECK(p0.x.front() == Catch::Approx(1.0));
  CHECK_FALSE(p0.absorbed);

  // Determinism.
  Rng r1(9, "sim", 3), r2(9, "sim", 3);
  const BesselPath a = simulate_bessel(1.5, 0.8, 1.0, 1e-3, r1);
  const BesselPath b = simulate_bessel(1.5, 0.8, 1.0, 1e-3, r2);
  REQUIRE(a.x.size() == b.x.size());
  for (std::size_t i = 0; i < a.x.size(); ++i) REQUIRE(a.x[i] == b.x[i]);

  CHECK_THROWS_AS(simulate_bessel(1.0, 0.0, 1.0, 1e-3, rng),
                  std::domain_error);
  CHECK_THROWS_AS(simulate_bessel(1.0, 1.0, 1.0, 0.0, rng),
                  std::invalid_argument);
}

TEST_CASE("no absorption at beta = 2 from the center") {
  int absorbed = 0;
  for (int i = 0; i < 200; ++i) {
    Rng rng(11, "no-absorb", static_cast<std::uint64_t>(i));
    const BesselPath p = simulate_bessel(2.0, kPi / 2.0, 1.0, 1e-3, rng);
    absorbed += p.absorbed ? 1 : 0;
  }
  CHECK(absorbed == 0);
}

TEST_CASE("chordal-range drift absorbs") {
  // beta = 1/3 < 1/2: paths hit the boundary almost surely.
  int absorbed = 0;
  for (int i = 0; i < 20; ++i) {
    Rng rng(13, "absorb", static_cast<std::uint64_t>(i));
    const BesselPath p = simulate_bessel(1.0 / 3.0, kPi / 2.0, 30.0, 1e-3, rng);
    if (p.absorbed) {
      ++absorbed;
      CHECK(p.absorb_time <= 30.0);
      CHECK(p.t.back() == Catch::Approx(p.absorb_time));
    }
  }
  CHECK(absorbed >= 15);
}

TEST_CASE("driftless increments are centered") {
  RunningStat s;
  for (int i = 0; i < 400; ++i) {
    Rng rng(17, "centered", static_cast<std::uint64_t>(i));
    const BesselPath p = simulate_bessel(0.0, kPi / 2.0, 0.1, 1e-3, rng);
    REQUIRE_FALSE(p.absorbed);
    s.add(p.x.back() - kPi / 2.0);
  }
  CHECK(std::fabs(s.mean()) <= 3.0 * s.stderr_mean() + 1e-12);
}

TEST_CASE("mc exit probability against the exact oracle") {
  const McEstimate est =
      mc_exit_prob(1.0, kPi / 3.0, kPi / 6.0, 40000, 2e-4, 101, "t-exit");
  const double tol = std::max(4.0 * est.stderr_mean, 0.015);
  CHECK(std::fabs(est.mean - 1.0 / 3.0) <= tol);
  CHECK(est.n == 40000);

  // Single sample is reproducible.
  const McEstimate s1 = mc_exit_prob(1.0, 1.0, 0.5, 1, 1e-3, 3, "t-exit-one");
  const McEstimate s2 = mc_exit_prob(1.0, 1.0, 0.5, 1, 1e-3, 3, "t-exit-one");
  CHECK(s1.mean == s2.mean);
  CHECK((s1.mean == 0.0 || s1.mean == 1.0));

  CHECK_THROWS_AS(mc_exit_prob(1.0, 1.0, 0.5, 0, 1e-3, 1, "t"),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_exit_prob(1.0, 0.5, 0.6, 10, 1e-3, 1, "t"),
                  std::domain_error);
}

TEST_CASE("discretization error decreases from dt to dt/4") {
  const double exact = 1.0 / 3.0;
  const McEstimate coarse =
      mc_exit_prob(1.0, kPi / 3.0, kPi / 6.0, 40000, 8e-3, 909, "t-dt-coarse");
  const McEstimate fine =
      mc_exit_prob(1.0, kPi / 3.0, kPi / 6.0, 40000, 2e-3, 909, "t-dt-fine");
  CHECK(std::fabs(fine.mean - exact) < std::fabs(coarse.mean - exact));
}

TEST_CASE("min-sin tail conventions") {
  // eps = 1: the minimum at t = 0 already equals sin x0.
  const McEstimate one = min_sin_tail(1.0, 1.0, 0.5, 1.0, 50, 1e-3, 1, "t-ms");
  CHECK(one.mean == Catch::Approx(1.0));
  CHECK_THROWS_AS(min_sin_tail(1.0, 1.0, 0.5, 0.0, 10, 1e-3, 1, "t"),
                  std::domain_error);
  CHECK_THROWS_AS(min_sin_tail(1.0, 1.0, 0.5, 1.5, 10, 1e-3, 1, "t"),
                  std::domain_error);
  CHECK_THROWS_AS(min_sin_tail(0.4, 1.0, 0.5, 0.5, 10, 1e-3, 1, "t"),
                  std::domain_error);
  CHECK_THROWS_AS(min_sin_tail(1.0, 1.0, 0.5, 0.5, 0, 1e-3, 1, "t"),
                  std::invalid_argument);
  // Monotone in eps: a larger eps can only include more paths.
  const McEstimate lo = min_sin_tail(1.0, kPi / 2.0, 0.5, 0.2, 2000, 1e-3, 2,
                                     "t-ms-grid");
  const McEstimate hi = min_sin_tail(1.0, kPi / 2.0, 0.5, 0.4, 2000, 1e-3, 2,
                                     "t-ms-grid");
  CHECK(lo.mean <= hi.mean);
}

TEST_CASE("min-sin tail against a PDE oracle") {
  // P{min_{t<=1} sin X_t <= eps} for beta = 1 from pi/2 solves a backward
  // heat problem with drift; a Crank-Nicolson solve at two resolutions gives
  // the values below to ~1e-7.  This pins down the bridge-extreme estimator:
  // grid-only monitoring would sit several percent low at these thresholds.
  struct Case {
    double eps, p;
  };
  for (const Case c : {Case{0.25, 0.1282489}, Case{0.0625, 0.0229794}}) {
    const McEstimate e =
        min_sin_tail(1.0, kPi / 2.0, 1.0, c.eps, 4000, 1e-3, 6, "t-ms-pde");
    const double tol = 4.0 * e.stderr_mean + 0.005;
    INFO("eps " << c.eps << " mc " << e.mean << " oracle " << c.p);
    CHECK(std::fabs(e.mean - c.p) <= tol);
  }
}

TEST_CASE("martingale weight closed forms") {
  BesselPath p;
  p.dt = 0.5;
  p.beta = 0.0;
  p.t = {0.0};
  p.x = {1.1};
  CHECK(martingale_weight(p, 2.0) ==
        Catch::Approx(std::pow(std::sin(1.1), 2.0)));
  // beta = 0 trivializes every factor.
  p.t = {0.0, 0.5, 1.0};
  p.x = {1.1, 0.9, 1.4};
  CHECK(martingale_weight(p, 0.0) == Catch::Approx(1.0));
  // Constant path at pi/2: M_t = exp(beta t / 2).
  p.x = {kPi / 2.0, kPi / 2.0, kPi / 2.0};
  for (double beta : {0.5, 1.0, 2.0})
    CHECK(martingale_weight(p, beta) ==
          Catch::Approx(std::exp(0.5 * beta * 1.0)).margin(1e-12));
  // Boundary-touching path is rejected.
  p.x = {kPi / 2.0, 0.0, kPi / 2.0};
  CHECK_THROWS_AS(martingale_weight(p, 1.0), std::domain_error);
}

TEST_CASE("reweighting with equal drifts is plain Monte Carlo") {
  const auto f = [](const PathEnd& e) { return e.x_end > 1.2 ? 1.0 : 0.0; };
  const McEstimate w = girsanov_reweight(1.0, 1.0, kPi / 2.0, 0.4, 0.3, 500,
                                         1e-3, 77, "t-g-equal", f);
  // Weights are exactly one, so the estimate is a bare frequency.
  CHECK(w.mean * 500.0 == Catch::Approx(std::round(w.mean * 500.0)));
  const auto one = [](const PathEnd&) { return 1.0; };
  const McEstimate u = girsanov_reweight(0.7, 0.7, kPi / 2.0, 0.4, 0.3, 200,
                                         1e-3, 78, "t-g-one", one);
  CHECK(u.mean == Catch::Approx(1.0).margin(1e-15));
  CHECK(u.stderr_mean == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("reweighted estimate matches direct simulation") {
  const auto f = [](const PathEnd& e) { return e.x_end > kPi / 2.0 ? 1.0 : 0.0; };
  const McEstimate direct = girsanov_reweight(
      1.0, 1.0, kPi / 2.0, 1.0, 0.3, 8000, 1e-3, 303, "t-g-direct", f);
  const McEstimate rew = girsanov_reweight(
      0.0, 1.0, kPi / 2.0, 1.0, 0.3, 8000, 1e-3, 303, "t-g-rew", f);
  const double tol =
      4.0 * std::hypot(direct.stderr_mean, rew.stderr_mean) + 0.01;
  CHECK(std::fabs(direct.mean - rew.mean) <= tol);
}

TEST_CASE("stopped martingale normalizes to one") {
  const auto one = [](const PathEnd&) { return 1.0; };
  for (double beta : {0.5, 1.0, 2.0}) {
    const McEstimate est = girsanov_reweight(
        0.0, beta, kPi / 2.0, 1.0, 0.3, 8000, 1e-3, 404,
        "t-g-norm-" + std::to_string(beta), one);
    CHECK(std::fabs(est.mean - 1.0) <= 4.0 * est.stderr_mean + 0.01);
  }
}

TEST_CASE("reweighting argument validation") {
  const auto one = [](const PathEnd&) { return 1.0; };
  CHECK_THROWS_AS(girsanov_reweight(0.0, 1.0, kPi / 2.0, 1.0, 0.0, 10, 1e-3, 1,
                                    "t", one),
                  std::domain_error);
  CHECK_THROWS_AS(girsanov_reweight(0.0, 1.0, kPi / 2.0, 1.0, 1.5, 10, 1e-3, 1,
                                    "t", one),
                  std::domain_error);
  CHECK_THROWS_AS(girsanov_reweight(0.0, 1.0, kPi / 2.0, 1.0, 0.3, 0, 1e-3, 1,
                                    "t", one),
                  std::invalid_argument);
}

TEST_CASE("co-simulation keeps the grid identity exactly") {
  for (Variant var :
       {Variant::Radial, Variant::Chordal, Variant::TwoSidedRadial}) {
    const SleParams params = make_params(3.0, var);
    Rng rng(21, "t-cosim", 0);
    const CoSimResult r =
        co_simulate_driving(params, kPi / 2.0, 0.5, 1e-3, rng);
    REQUIRE(r.U.values.size() == r.theta.size());
    REQUIRE(r.U.values.size() == r.x.size());
    CHECK(r.U.values.front() == 0.0);
    CHECK(r.theta.front() == Catch::Approx(kPi / 2.0));
    for (std::size_t j = 0; j < r.x.size(); ++j)
      REQUIRE(std::fabs(r.x[j] - (r.theta[j] - r.U.values[j])) < 1e-12);
  }
}

TEST_CASE("co-simulation determinism and radial driving moments") {
  const SleParams params = make_params(2.0, Variant::Radial);
  Rng r1(33, "t-cosim-det", 5), r2(33, "t-cosim-det", 5);
  const CoSimResult a = co_simulate_driving(params, 1.0, 0.3, 1e-3, r1);
  const CoSimResult b = co_simulate_driving(params, 1.0, 0.3, 1e-3, r2);
  REQUIRE(a.U.values.size() == b.U.values.size());
  for (std::size_t j = 0; j < a.U.values.size(); ++j)
    REQUIRE(a.U.values[j] == b.U.values[j]);

  // Radial driving is a sign-flipped Brownian motion: increment moments.
  RunningStat inc;
  for (int i = 0; i < 200; ++i) {
    Rng rng(34, "t-cosim-bm", static_cast<std::uint64_t>(i));
    const CoSimResult r = co_simulate_driving(params, kPi / 2.0, 0.2, 1e-3, rng);
    for (std::size_t j = 1; j < r.U.values.size(); ++j)
      inc.add(r.U.values[j] - r.U.values[j - 1]);
  }
  CHECK(std::fabs(inc.mean()) <= 3.0 * inc.stderr_mean());
  CHECK(inc.variance() == Catch::Approx(1e-3).epsilon(0.05));
}

TEST_CASE("chordal co-simulation truncates at absorption") {
  const SleParams params = make_params(6.0, Variant::Chordal);  // beta = 1/3
  int absorbed = 0;
  for (int i = 0; i < 10; ++i) {
    Rng rng(55, "t-cosim-abs", static_cast<std::uint64_t>(i));
    const CoSimResult r = co_simulate_driving(params, kPi / 2.0, 40.0, 1e-3, rng);
    if (r.absorbed) {
      ++absorbed;
      CHECK(r.U.t_end() <= r.absorb_time + 1e-12);
      CHECK(r.U.values.size() == r.x.size());
    }
  }
  CHECK(absorbed >= 8);
}

TEST_CASE("radial co-simulation outlives marked-point absorption") {
  const SleParams params = make_params(6.0, Variant::Radial);  // beta = 1/3
  int absorbed = 0;
  for (int i = 0; i < 10; ++i) {
    Rng rng(56, "t-cosim-radial-abs", static_cast<std::uint64_t>(i));
    const CoSimResult r =
        co_simulate_driving(params, kPi / 2.0, 12.0, 1e-3, rng);
    // The driving always spans the full horizon: the curve outlives the
    // swallowing of any single boundary point.
    REQUIRE(r.U.values.size() == 12001);
    REQUIRE(r.U.values.size() == r.x.size());
    REQUIRE(r.U.values.size() == r.theta.size());
    if (r.absorbed) {
      ++absorbed;
      CHECK(r.absorb_time <= 12.0);
      CHECK(std::sin(r.x.back()) < 1e-6);  // frozen at a swallowed angle
    }
  }
  CHECK(absorbed >= 3);  // beta = 1/3 swallows pi/2 well before t = 12 often
}

TEST_CASE("two-sided drift never absorbs at kappa = 2") {
  const SleParams params = make_params(2.0, Variant::TwoSidedRadial);
  for (int i = 0; i < 50; ++i) {
    Rng rng(66, "t-cosim-two", static_cast<std::uint64_t>(i));
    const CoSimResult r = co_simulate_driving(params, kPi / 2.0, 1.0, 1e-3, rng);
    REQUIRE_FALSE(r.absorbed);
  }
}
