#pragma once

// Parameter bookkeeping for radial SLE in the unit disk, time scaled so the
// conformal radius of the unexplored domain decays like exp(-2at), a = 2/kappa.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slelab {

inline constexpr double kPi = std::numbers::pi;

enum class Variant { Radial, Chordal, TwoSidedRadial };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Radial: return "radial";
    case Variant::Chordal: return "chordal";
    case Variant::TwoSidedRadial: return "two-sided";
  }
  throw std::invalid_argument("variant_name: bad enum value");
}

inline Variant variant_from_name(const std::string& s) {
  if (s == "radial") return Variant::Radial;
  if (s == "chordal") return Variant::Chordal;
  if (s == "two-sided" || s == "two_sided" || s == "twosided")
    return Variant::TwoSidedRadial;
  throw std::invalid_argument("unknown variant: " + s);
}

// All exponents derived from kappa once, so downstream code never re-derives.
//   a     = 2/kappa          (time-change rate)
//   alpha = 4a - 1           (boundary exponent, = 8/kappa - 1)
//   b     = (3a - 1)/2       (chordal boundary scaling exponent)
//   d     = 1 + kappa/8      (informational dimension constant)
//   beta  = drift coefficient of the angle X_t = theta_t - U_t:
//             radial a, chordal 1 - 2a, two-sided radial 2a.
struct SleParams {
  double kappa = 0;
  double a = 0;
  double alpha = 0;
  double b = 0;
  double d = 0;
  double beta = 0;
  Variant variant = Variant::Radial;
};

inline double drift_beta(double a, Variant variant) {
  switch (variant) {
    case Variant::Radial: return a;
    case Variant::Chordal: return 1.0 - 2.0 * a;
    case Variant::TwoSidedRadial: return 2.0 * a;
  }
  throw std::invalid_argument("drift_beta: bad enum value");
}

inline SleParams make_params(double kappa, Variant variant) {
  if (!(kappa > 0.0) || !(kappa < 8.0))
    throw std::domain_error("make_params: kappa must lie in (0, 8)");
  SleParams p;
  p.kappa = kappa;
  p.a = 2.0 / kappa;
  p.alpha = 4.0 * p.a - 1.0;
  p.b = (3.0 * p.a - 1.0) / 2.0;
  p.d = 1.0 + kappa / 8.0;
  p.beta = drift_beta(p.a, variant);
  p.variant = variant;
  return p;
}

// Weight (sin theta)^(4a-1) for an interior point seen at angle theta from the
// two marked boundary points; vanishes at the degenerate angles.
inline double green_exponent_weight(double theta, double kappa) {
  if (!(kappa > 0.0) || !(kappa < 8.0))
    throw std::domain_error("green_exponent_weight: kappa must lie in (0, 8)");
  if (!(theta > 0.0) || !(theta < kPi))
    throw std::domain_error("green_exponent_weight: theta must lie in (0, pi)");
  const double a = 2.0 / kappa;
  return std::pow(std::sin(theta), 4.0 * a - 1.0);
}

// Pair weight |sin(theta1 - theta2)|^(1-3a) for two boundary points e^{2i
// theta}; the angles coincide (mod pi) exactly when the boundary points agree.
inline double chordal_partition_weight(double theta1, double theta2,
                                       double kappa) {
  if (!(kappa > 0.0) || !(kappa < 8.0))
    throw std::domain_error(
        "chordal_partition_weight: kappa must lie in (0, 8)");
  const double s = std::fabs(std::sin(theta1 - theta2));
  if (s < 1e-12)
    throw std::domain_error(
        "chordal_partition_weight: coincident boundary points");
  const double a = 2.0 / kappa;
  return std::pow(s, 1.0 - 3.0 * a);
}

}  // namespace slelab
