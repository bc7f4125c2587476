#include <catch2/catch_amalgamated.hpp>

#include <slelab/params.hpp>
#include <slelab/rng.hpp>
#include <slelab/stats.hpp>
#include <slelab/version.hpp>

using namespace slelab;

TEST_CASE("derived exponent triples") {
  const SleParams p4 = make_params(4.0, Variant::Radial);
  CHECK(p4.a == Catch::Approx(0.5).margin(1e-15));
  CHECK(p4.alpha == Catch::Approx(1.0).margin(1e-15));
  CHECK(p4.b == Catch::Approx(0.25).margin(1e-15));
  CHECK(p4.d == Catch::Approx(1.5).margin(1e-15));
  CHECK(p4.beta == Catch::Approx(0.5).margin(1e-15));

  const SleParams p2 = make_params(2.0, Variant::TwoSidedRadial);
  CHECK(p2.a == Catch::Approx(1.0).margin(1e-15));
  CHECK(p2.alpha == Catch::Approx(3.0).margin(1e-15));
  CHECK(p2.beta == Catch::Approx(2.0).margin(1e-15));
  CHECK(p2.d == Catch::Approx(1.25).margin(1e-15));

  const SleParams p83 = make_params(8.0 / 3.0, Variant::Chordal);
  CHECK(p83.a == Catch::Approx(0.75).margin(1e-15));
  CHECK(p83.alpha == Catch::Approx(2.0).margin(1e-15));
  CHECK(p83.b == Catch::Approx(0.625).margin(1e-15));
  CHECK(p83.beta == Catch::Approx(-0.5).margin(1e-15));
}

TEST_CASE("kappa domain is the open interval (0, 8)") {
  CHECK_THROWS_AS(make_params(0.0, Variant::Radial), std::domain_error);
  CHECK_THROWS_AS(make_params(8.0, Variant::Radial), std::domain_error);
  CHECK_THROWS_AS(make_params(-1.0, Variant::Chordal), std::domain_error);
  CHECK_NOTHROW(make_params(7.999, Variant::TwoSidedRadial));
}

TEST_CASE("variant names round-trip") {
  for (Variant v :
       {Variant::Radial, Variant::Chordal, Variant::TwoSidedRadial})
    CHECK(variant_from_name(variant_name(v)) == v);
  CHECK_THROWS_AS(variant_from_name("diagonal"), std::invalid_argument);
}

TEST_CASE("interior-point weight") {
  // kappa = 2: exponent 4a-1 = 3, so sin(pi/6)^3 = 1/8.
  CHECK(green_exponent_weight(kPi / 6.0, 2.0) ==
        Catch::Approx(0.125).margin(1e-14));
  // Symmetry about pi/2 and maximum there.
  CHECK(green_exponent_weight(kPi / 3.0, 3.0) ==
        Catch::Approx(green_exponent_weight(2.0 * kPi / 3.0, 3.0))
            .margin(1e-14));
  CHECK(green_exponent_weight(kPi / 2.0, 3.0) == Catch::Approx(1.0));
  CHECK_THROWS_AS(green_exponent_weight(0.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(green_exponent_weight(kPi, 2.0), std::domain_error);
}

TEST_CASE("boundary-pair weight") {
  // kappa = 2: exponent 1-3a = -2, so |sin(pi/6)|^-2 = 4.
  CHECK(chordal_partition_weight(kPi / 3.0, kPi / 6.0, 2.0) ==
        Catch::Approx(4.0).margin(1e-13));
  // Depends only on the angle difference.
  CHECK(chordal_partition_weight(1.3, 0.9, 3.0) ==
        Catch::Approx(chordal_partition_weight(2.3, 1.9, 3.0)).margin(1e-13));
  // Coincident boundary points e^{2 i theta} (difference multiple of pi).
  CHECK_THROWS_AS(chordal_partition_weight(0.7, 0.7, 2.0), std::domain_error);
  CHECK_THROWS_AS(chordal_partition_weight(0.7 + kPi, 0.7, 2.0),
                  std::domain_error);
}

TEST_CASE("drift coefficients per variant") {
  const double a = 0.65;
  CHECK(drift_beta(a, Variant::Radial) == Catch::Approx(a));
  CHECK(drift_beta(a, Variant::Chordal) == Catch::Approx(1.0 - 2.0 * a));
  CHECK(drift_beta(a, Variant::TwoSidedRadial) == Catch::Approx(2.0 * a));
}

TEST_CASE("counter-based rng is deterministic and splits by id") {
  Rng r1(42, "exp-a", 7);
  Rng r2(42, "exp-a", 7);
  for (int i = 0; i < 100; ++i) REQUIRE(r1.uniform() == r2.uniform());
  Rng r3(42, "exp-b", 7);
  Rng r4(42, "exp-a", 8);
  int same3 = 0, same4 = 0;
  Rng r5(42, "exp-a", 7);
  for (int i = 0; i < 100; ++i) {
    const double u = r5.uniform();
    if (u == r3.uniform()) ++same3;
    if (u == r4.uniform()) ++same4;
  }
  CHECK(same3 == 0);
  CHECK(same4 == 0);
}

TEST_CASE("rng outputs lie in the expected ranges") {
  Rng r(1, "ranges", 0);
  RunningStat s;
  for (int i = 0; i < 20000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s.add(r.normal());
  }
  CHECK(std::fabs(s.mean()) < 0.05);
  CHECK(s.variance() == Catch::Approx(1.0).epsilon(0.05));
}

TEST_CASE("running statistics match closed forms and merge correctly") {
  RunningStat a;
  for (double x : {1.0, 2.0, 3.0, 4.0}) a.add(x);
  CHECK(a.mean() == Catch::Approx(2.5));
  CHECK(a.variance() == Catch::Approx(5.0 / 3.0));  // sample variance
  RunningStat b;
  for (double x : {10.0, 20.0}) b.add(x);
  RunningStat c = a;
  c.merge(b);
  RunningStat ref;
  for (double x : {1.0, 2.0, 3.0, 4.0, 10.0, 20.0}) ref.add(x);
  CHECK(c.count() == 6);
  CHECK(c.mean() == Catch::Approx(ref.mean()));
  CHECK(c.variance() == Catch::Approx(ref.variance()));
}

TEST_CASE("version string present") { CHECK(kVersion == std::string("1.0.0")); }
