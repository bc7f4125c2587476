#pragma once

// Serialization: CSV writers for sampled curves and angle paths, JSON
// conversion for estimates and crosscut families, and run-summary output.
// All text output uses LF line endings and round-trippable double formatting.

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "slelab/bessel.hpp"
#include "slelab/geometry.hpp"
#include "slelab/loewner.hpp"
#include "slelab/stats.hpp"

namespace slelab {

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline void write_trace_csv(std::ostream& os, const TraceCurve& curve) {
  os << "t,re,im\n";
  for (std::size_t i = 0; i < curve.t.size(); ++i)
    os << format_double(curve.t[i]) << ',' << format_double(curve.z[i].real())
       << ',' << format_double(curve.z[i].imag()) << '\n';
}

inline void write_bessel_csv(std::ostream& os, const BesselPath& path) {
  os << "t,x\n";
  for (std::size_t i = 0; i < path.t.size(); ++i)
    os << format_double(path.t[i]) << ',' << format_double(path.x[i]) << '\n';
}

// Generic two-column table, used for experiment point output.
inline void write_points_csv(std::ostream& os, const std::string& xname,
                             const std::string& yname,
                             const std::vector<double>& xs,
                             const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw std::invalid_argument("write_points_csv: size mismatch");
  os << xname << ',' << yname << '\n';
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << format_double(xs[i]) << ',' << format_double(ys[i]) << '\n';
}

inline nlohmann::json to_json(const McEstimate& e) {
  return nlohmann::json{{"mean", e.mean},
                        {"stderr", e.stderr_mean},
                        {"n", e.n},
                        {"master_seed", e.master_seed},
                        {"experiment_id", e.experiment_id}};
}

inline nlohmann::json to_json(const CrosscutFamily& fam) {
  nlohmann::json arcs = nlohmann::json::array();
  for (const auto& a : fam.arcs)
    arcs.push_back({{"theta_lo", a.theta_lo}, {"theta_hi", a.theta_hi}});
  nlohmann::json j{{"n", fam.n}, {"k", fam.k}, {"arcs", arcs}};
  if (fam.star_index)
    j["star_index"] = *fam.star_index;
  else
    j["star_index"] = nullptr;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);  // binary: keep LF endings
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << body;
  if (!os) throw std::runtime_error("write failed: " + path);
}

inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace slelab
