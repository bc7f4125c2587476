// Command-line front end for the slelab library.
//
// One subcommand per experiment; every numeric flag accepts decimal notation
// or the shorthand "pi" / "pi/K".  Options resolve as: command-line flag,
// then config-file key (flat "key = value" lines, same names as the flags),
// then the built-in default.  Each run prints a JSON summary to stdout whose
// "config" block is sufficient to reproduce the run bit-exactly with
// --replay <summary.json>.  With --out DIR the summary and a points.csv are
// also written there.
//
// Exit status: 0 success, 2 argument error, 3 numerical failure.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <slelab/bessel.hpp>
#include <slelab/experiments.hpp>
#include <slelab/geometry.hpp>
#include <slelab/io.hpp>
#include <slelab/loewner.hpp>
#include <slelab/params.hpp>
#include <slelab/rng.hpp>
#include <slelab/verify.hpp>

namespace {

using nlohmann::json;
using KV = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(trim(s.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

double parse_strict_double(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw std::invalid_argument("bad number: '" + s + "'");
  return v;
}

// Decimal, "pi", "pi/K", or a plain fraction "A/B" (optionally signed).
double parse_number(const std::string& raw) {
  std::string s = trim(raw);
  double sign = 1.0;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    if (s[0] == '-') sign = -1.0;
    s = s.substr(1);
  }
  if (s == "pi") return sign * slelab::kPi;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    const std::string head = s.substr(0, slash);
    const double num = head == "pi" ? slelab::kPi : parse_strict_double(head);
    return sign * num / parse_strict_double(s.substr(slash + 1));
  }
  return sign * parse_strict_double(s);
}

long long parse_integer(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) throw std::invalid_argument("empty integer");
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size())
    throw std::invalid_argument("bad integer: '" + s + "'");
  return v;
}

// Option resolution with an audit trail: every key actually consumed is
// recorded (with its raw string) so the summary can echo a complete config.
struct Ctx {
  KV cli;  // from flags
  KV cfg;  // from --config or --replay
  mutable KV used;

  std::string get(const std::string& key, const char* fallback) const {
    std::string v;
    if (auto it = cli.find(key); it != cli.end())
      v = it->second;
    else if (auto jt = cfg.find(key); jt != cfg.end())
      v = jt->second;
    else if (fallback)
      v = fallback;
    else
      throw std::invalid_argument("missing required option --" + key);
    used[key] = v;
    return v;
  }
  double num(const std::string& key, const char* fallback = nullptr) const {
    return parse_number(get(key, fallback));
  }
  long long integer(const std::string& key,
                    const char* fallback = nullptr) const {
    return parse_integer(get(key, fallback));
  }
  std::uint64_t count(const std::string& key,
                      const char* fallback = nullptr) const {
    const long long v = integer(key, fallback);
    if (v < 0) throw std::invalid_argument("--" + key + " must be >= 0");
    return static_cast<std::uint64_t>(v);
  }
};

KV load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot read config file: " + path);
  KV kv;
  std::string line;
  while (std::getline(is, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line without key");
    kv[key] = val;
  }
  return kv;
}

// "geometric:R" (count taken from --n) or a comma-separated list.
std::vector<double> parse_eps_list(const Ctx& ctx, const std::string& spec) {
  if (spec.rfind("geometric:", 0) == 0) {
    const double ratio = parse_strict_double(spec.substr(10));
    const long long n = ctx.integer("n");
    if (n < 1) throw std::invalid_argument("geometric eps needs --n >= 1");
    return slelab::geometric_eps(ratio, static_cast<int>(n));
  }
  std::vector<double> out;
  for (const std::string& part : split(spec, ',')) out.push_back(parse_number(part));
  return out;
}

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw std::runtime_error("non-finite " + what);
}

json estimate_json(const slelab::McEstimate& e) {
  require_finite(e.mean, "estimate " + e.experiment_id);
  require_finite(e.stderr_mean, "stderr " + e.experiment_id);
  return slelab::to_json(e);
}

json fit_json(const std::optional<slelab::ExponentFit>& fit) {
  if (!fit) return nullptr;
  json pts = json::array();
  for (const auto& [lx, ly] : fit->points) pts.push_back({lx, ly});
  return json{{"slope", fit->slope},
              {"intercept", fit->intercept},
              {"residual", fit->residual},
              {"points", pts}};
}

std::string estimates_csv(const std::string& xname,
                          const std::vector<double>& xs,
                          const std::vector<slelab::McEstimate>& es) {
  std::ostringstream os;
  os << xname << ",mean,stderr\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    os << slelab::format_double(xs[i]) << ','
       << slelab::format_double(es[i].mean) << ','
       << slelab::format_double(es[i].stderr_mean) << '\n';
  return os.str();
}

struct RunOut {
  json results;
  std::string csv;  // points.csv body; empty = do not write
  int status = 0;
};

// --------------------------------------------------------------------------
// Subcommand implementations.

RunOut run_oracle_f(const Ctx& ctx) {
  const double beta = ctx.num("beta");
  const double x = ctx.num("x");
  const double value = slelab::exact_F(beta, x);
  require_finite(value, "scale function value");
  RunOut out;
  out.results = json{{"value", value}};
  std::ostringstream os;
  slelab::write_points_csv(os, "x", "F", {x}, {value});
  out.csv = os.str();
  return out;
}

RunOut run_exit_prob(const Ctx& ctx) {
  const double beta = ctx.num("beta");
  const double x = ctx.num("x");
  const double eps = ctx.num("eps");
  const std::uint64_t samples = ctx.count("samples", "100000");
  const double dt = ctx.num("dt", "1e-3");
  const std::uint64_t seed = ctx.count("seed", "1");
  const slelab::McEstimate mc =
      slelab::mc_exit_prob(beta, x, eps, samples, dt, seed, "exit-prob");
  const double exact = slelab::exit_prob_exact(beta, x, eps);
  RunOut out;
  out.results = json{{"mc", estimate_json(mc)}, {"exact", exact}};
  out.csv = estimates_csv("eps", {eps}, {mc});
  return out;
}

RunOut run_min_sin(const Ctx& ctx) {
  const double beta = ctx.num("beta");
  const double x = ctx.num("x");
  const double t0 = ctx.num("t0", "1");
  const std::string eps_spec = ctx.get("eps", nullptr);
  const std::uint64_t samples = ctx.count("samples", "100000");
  const double dt = ctx.num("dt", "1e-3");
  const std::uint64_t seed = ctx.count("seed", "1");
  RunOut out;
  if (eps_spec.find(',') != std::string::npos ||
      eps_spec.rfind("geometric:", 0) == 0) {
    const std::vector<double> eps = parse_eps_list(ctx, eps_spec);
    const slelab::BesselTailResult r = slelab::bessel_exponent_experiment(
        beta, x, t0, eps, samples, dt, seed, "min-sin");
    json probs = json::array();
    for (std::size_t i = 0; i < r.prob.size(); ++i)
      probs.push_back(
          {{"eps", r.eps[i]}, {"estimate", estimate_json(r.prob[i])}});
    out.results = json{{"prob", probs}, {"fit", fit_json(r.fit)}};
    out.csv = estimates_csv("eps", r.eps, r.prob);
  } else {
    const double eps = parse_number(eps_spec);
    const slelab::McEstimate est =
        slelab::min_sin_tail(beta, x, t0, eps, samples, dt, seed, "min-sin");
    out.results = json{{"prob", estimate_json(est)}};
    out.csv = estimates_csv("eps", {eps}, {est});
  }
  return out;
}

RunOut run_girsanov_check(const Ctx& ctx) {
  const double beta = ctx.num("beta");
  const double x = ctx.num("x", "pi/2");
  const double t0 = ctx.num("t0", "1");
  const double eps = ctx.num("eps", "0.3");
  const std::uint64_t samples = ctx.count("samples", "100000");
  const double dt = ctx.num("dt", "1e-3");
  const std::uint64_t seed = ctx.count("seed", "1");
  const auto tail = [](const slelab::PathEnd& e) {
    return e.x_end > 0.5 * slelab::kPi ? 1.0 : 0.0;
  };
  const auto one = [](const slelab::PathEnd&) { return 1.0; };
  const slelab::McEstimate direct = slelab::girsanov_reweight(
      beta, beta, x, t0, eps, samples, dt, seed, "girsanov-check/direct", tail);
  const slelab::McEstimate rew = slelab::girsanov_reweight(
      0.0, beta, x, t0, eps, samples, dt, seed, "girsanov-check/reweighted",
      tail);
  const slelab::McEstimate norm = slelab::girsanov_reweight(
      0.0, beta, x, t0, eps, samples, dt, seed, "girsanov-check/norm", one);
  const double gap = std::fabs(direct.mean - rew.mean);
  const double tol = 3.0 * std::hypot(direct.stderr_mean, rew.stderr_mean);
  RunOut out;
  out.results = json{{"direct", estimate_json(direct)},
                     {"reweighted", estimate_json(rew)},
                     {"normalization", estimate_json(norm)},
                     {"consistent", gap <= tol}};
  out.csv = estimates_csv("beta", {beta, beta, beta}, {direct, rew, norm});
  return out;
}

RunOut run_trace(const Ctx& ctx) {
  const double kappa = ctx.num("kappa");
  const slelab::Variant variant =
      slelab::variant_from_name(ctx.get("variant", "radial"));
  const double theta0 = ctx.num("x", "pi/2");
  const double horizon = ctx.num("t0", "2");
  const double dt = ctx.num("dt", "1e-3");
  const std::uint64_t seed = ctx.count("seed", "1");
  const auto stride = static_cast<std::size_t>(ctx.count("stride", "10"));
  const slelab::SleParams params = slelab::make_params(kappa, variant);
  slelab::Rng rng(seed, "trace", 0);
  const slelab::CoSimResult sim =
      slelab::co_simulate_driving(params, theta0, horizon, dt, rng);
  if (sim.U.cells() == 0)
    throw std::runtime_error("trace: driving absorbed before the first cell");
  slelab::TraceOptions topt;
  topt.stride = stride;
  const slelab::TraceCurve curve = slelab::trace_curve(sim.U, params.a, topt);
  double min_r = 1.0;
  std::uint64_t failed = 0;
  for (std::size_t i = 0; i < curve.z.size(); ++i) {
    min_r = std::min(min_r, std::abs(curve.z[i]));
    failed += curve.failed[i];
  }
  RunOut out;
  out.results = json{{"n_points", curve.t.size()},
                     {"t_end", curve.t.back()},
                     {"min_radius", min_r},
                     {"failed_points", failed},
                     {"absorbed", sim.absorbed}};
  std::ostringstream os;
  slelab::write_trace_csv(os, curve);
  out.csv = os.str();
  return out;
}

RunOut run_arcs(const Ctx& ctx) {
  const double kappa = ctx.num("kappa");
  const slelab::Variant variant =
      slelab::variant_from_name(ctx.get("variant", "radial"));
  const double theta0 = ctx.num("x", "pi/2");
  const auto k = static_cast<int>(ctx.integer("k"));
  const auto n = static_cast<int>(ctx.integer("n"));
  const double dt = ctx.num("dt", "5e-4");
  const std::uint64_t seed = ctx.count("seed", "1");
  const auto stride = static_cast<std::size_t>(ctx.count("stride", "5"));
  const auto resolution = static_cast<int>(ctx.integer("resolution", "256"));
  const slelab::SleParams params = slelab::make_params(kappa, variant);
  // rho_n never exceeds n/(2a), so this horizon always suffices.
  const double horizon =
      static_cast<double>(n) / (2.0 * params.a) + 2.0 * dt;
  slelab::Rng rng(seed, "arcs", 0);
  const slelab::CoSimResult sim =
      slelab::co_simulate_driving(params, theta0, horizon, dt, rng);
  if (sim.U.cells() == 0)
    throw std::runtime_error("arcs: driving absorbed before the first cell");
  slelab::TraceOptions topt;
  topt.stride = stride;
  const slelab::TraceCurve curve = slelab::trace_curve(sim.U, params.a, topt);
  const slelab::CrosscutFamily fam =
      slelab::arc_components(sim.U, params.a, curve, n, k, resolution);
  const auto rho_n = slelab::first_radius_time(curve, n);
  RunOut out;
  out.results = json{{"family", slelab::to_json(fam)},
                     {"rho_n", rho_n ? json(*rho_n) : json(nullptr)},
                     {"absorbed", sim.absorbed}};
  std::ostringstream os;
  slelab::write_trace_csv(os, curve);
  out.csv = os.str();
  return out;
}

RunOut run_return_prob(const Ctx& ctx) {
  slelab::CurveBatchConfig cfg;
  cfg.kappa = ctx.num("kappa");
  cfg.variant = slelab::variant_from_name(ctx.get("variant", "radial"));
  cfg.theta0 = ctx.num("x", "pi/2");
  cfg.n_samples = ctx.count("samples", "2000");
  cfg.master_seed = ctx.count("seed", "1");
  cfg.experiment_id = "return-prob";
  cfg.dt = ctx.num("dt", "1e-3");
  cfg.trace_stride = static_cast<std::size_t>(ctx.count("stride", "10"));
  const auto k = static_cast<int>(ctx.integer("k", "1"));
  const auto horizon_m = static_cast<int>(ctx.integer("horizon-m", "6"));
  std::vector<int> n_values;
  for (const std::string& part : split(ctx.get("n", nullptr), ','))
    n_values.push_back(static_cast<int>(parse_integer(part)));
  const slelab::ReturnProbResult r =
      slelab::return_prob_experiment(cfg, k, n_values, horizon_m);
  json rows = json::array();
  std::vector<double> xs;
  for (std::size_t i = 0; i < r.q.size(); ++i) {
    rows.push_back(
        {{"n", r.n_values[i]}, {"estimate", estimate_json(r.q[i])}});
    xs.push_back(static_cast<double>(r.n_values[i]));
  }
  RunOut out;
  out.results =
      json{{"k", r.k}, {"horizon_m", r.horizon_m}, {"q", rows}};
  out.csv = estimates_csv("n", xs, r.q);
  return out;
}

RunOut run_crosscut_exponent(const Ctx& ctx) {
  slelab::CurveBatchConfig cfg;
  cfg.kappa = ctx.num("kappa");
  cfg.variant = slelab::variant_from_name(ctx.get("variant", "radial"));
  cfg.theta0 = ctx.num("x", "pi/2");
  cfg.n_samples = ctx.count("samples", "2000");
  cfg.master_seed = ctx.count("seed", "1");
  cfg.experiment_id = "crosscut-exponent";
  cfg.dt = ctx.num("dt", "1e-3");
  cfg.trace_stride = static_cast<std::size_t>(ctx.count("stride", "5"));
  const double center = parse_number(ctx.get("center", "pi"));
  const auto horizon_n = static_cast<int>(ctx.integer("n", "6"));
  std::vector<double> radii;
  for (const std::string& part : split(ctx.get("radii", nullptr), ','))
    radii.push_back(parse_number(part));
  const slelab::CrosscutExponentResult r =
      slelab::crosscut_exponent_experiment(cfg, center, radii, horizon_n);
  json rows = json::array();
  for (std::size_t i = 0; i < r.freq.size(); ++i)
    rows.push_back(
        {{"r", r.radii[i]}, {"estimate", estimate_json(r.freq[i])}});
  RunOut out;
  out.results = json{{"freq", rows}, {"fit", fit_json(r.fit)}};
  out.csv = estimates_csv("r", r.radii, r.freq);
  return out;
}

RunOut run_markov_tail(const Ctx& ctx) {
  const std::vector<double> eps = parse_eps_list(ctx, ctx.get("eps", nullptr));
  const auto n = static_cast<int>(ctx.integer("n"));
  const std::string mode = ctx.get("mode", "both");
  if (mode != "exact" && mode != "mc" && mode != "both")
    throw std::invalid_argument("--mode must be exact, mc, or both");
  RunOut out;
  out.results = json::object();
  if (mode != "mc") {
    const double exact = slelab::markov_tail_exact(eps, n);
    require_finite(exact, "reset-chain tail");
    out.results["exact"] = exact;
  }
  if (mode != "exact") {
    const std::uint64_t samples = ctx.count("samples", "100000");
    const std::uint64_t seed = ctx.count("seed", "1");
    const slelab::MarkovTailResult r =
        slelab::markov_return_tail(eps, n, samples, seed, "markov-tail");
    out.results["exact"] = r.exact;
    out.results["mc"] = estimate_json(r.mc);
  }
  std::vector<double> idx(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i)
    idx[i] = static_cast<double>(i + 1);
  std::ostringstream os;
  slelab::write_points_csv(os, "j", "eps", idx, eps);
  out.csv = os.str();
  return out;
}

RunOut run_verify(const Ctx& ctx) {
  slelab::VerifyOptions opt;
  opt.budget = ctx.num("budget", "0.05");
  opt.master_seed = ctx.count("seed", "20260825");
  std::vector<int> ids;
  const std::string only = ctx.get("only", "");
  if (!only.empty())
    for (const std::string& part : split(only, ','))
      ids.push_back(static_cast<int>(parse_integer(part)));
  if (ids.empty())
    for (int i = 1; i <= 12; ++i) ids.push_back(i);

  json rows = json::array();
  int failed = 0;
  for (int id : ids) {
    const auto results = slelab::run_criteria(opt, {id});
    for (const auto& r : results) {
      std::cerr << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name
                << " (" << r.seconds << " s) " << r.detail << '\n';
      rows.push_back({{"id", r.id},
                      {"name", r.name},
                      {"pass", r.pass},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
      if (!r.pass) ++failed;
    }
  }
  RunOut out;
  out.results = json{{"criteria", rows},
                     {"passed", static_cast<int>(ids.size()) - failed},
                     {"failed", failed}};
  out.status = failed == 0 ? 0 : 3;
  return out;
}

RunOut dispatch(const std::string& name, const Ctx& ctx) {
  if (name == "oracle-f") return run_oracle_f(ctx);
  if (name == "exit-prob") return run_exit_prob(ctx);
  if (name == "min-sin") return run_min_sin(ctx);
  if (name == "girsanov-check") return run_girsanov_check(ctx);
  if (name == "trace") return run_trace(ctx);
  if (name == "arcs") return run_arcs(ctx);
  if (name == "return-prob") return run_return_prob(ctx);
  if (name == "crosscut-exponent") return run_crosscut_exponent(ctx);
  if (name == "markov-tail") return run_markov_tail(ctx);
  if (name == "verify") return run_verify(ctx);
  throw std::invalid_argument("unknown subcommand: " + name);
}

struct FlagDoc {
  const char* key;
  const char* doc;
};

constexpr FlagDoc kFlags[] = {
    {"kappa", "SLE parameter in (0, 8)"},
    {"variant", "radial | chordal | two-sided"},
    {"beta", "drift coefficient of the angle process"},
    {"x", "angle / start value; accepts pi and pi/K"},
    {"eps", "threshold: number, comma list, or geometric:R"},
    {"t0", "time horizon"},
    {"dt", "time-grid step"},
    {"samples", "Monte Carlo sample count"},
    {"seed", "master seed"},
    {"k", "outer circle index (radius e^{-k})"},
    {"n", "depth index, count, or comma list"},
    {"horizon-m", "truncation depth beyond n+k"},
    {"stride", "trace sampling stride"},
    {"resolution", "angular resolution for arc families"},
    {"radii", "comma list of boundary-crosscut diameters"},
    {"center", "crosscut center angle on the unit circle"},
    {"mode", "exact | mc | both"},
    {"budget", "sample-budget scale for verify"},
    {"only", "comma list of criterion ids for verify"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for Loewner curves in the unit disk"};
  app.require_subcommand(0, 1);

  Ctx ctx;
  std::string config_path, out_dir, replay_path;
  app.add_option("--replay", replay_path,
                 "re-run the configuration stored in a summary.json");
  app.add_option("--out", out_dir, "output directory");

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"oracle-f", "evaluate the exact boundary scale function"},
      {"exit-prob", "two-barrier exit probability: Monte Carlo vs exact"},
      {"min-sin", "boundary-contact tail of the angle process"},
      {"girsanov-check", "direct vs reweighted estimates of a tail event"},
      {"trace", "simulate one curve and write its trace"},
      {"arcs", "crosscut arc family of one curve"},
      {"return-prob", "truncated deep-return probabilities"},
      {"crosscut-exponent", "arc-hitting frequencies over a radius ladder"},
      {"markov-tail", "integer reset chain: exact recursion and simulation"},
      {"verify", "run the numbered verification criteria"},
  };
  for (const auto& [name, desc] : subs) {
    CLI::App* sub = app.add_subcommand(name, desc);
    for (const FlagDoc& f : kFlags)
      sub->add_option_function<std::string>(
          std::string("--") + f.key,
          [&ctx, key = std::string(f.key)](const std::string& v) {
            ctx.cli[key] = v;
          },
          f.doc);
    sub->add_option("--config", config_path,
                    "flat key = value config file (flags win)");
    sub->add_option("--out", out_dir, "output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::string name;
    if (!replay_path.empty()) {
      json saved;
      try {
        std::ifstream is(replay_path);
        if (!is) throw std::runtime_error("cannot open");
        is >> saved;
      } catch (const std::exception& e) {
        throw std::invalid_argument("cannot replay " + replay_path + ": " +
                                    e.what());
      }
      if (!saved.contains("subcommand") || !saved.contains("config"))
        throw std::invalid_argument(
            "replay file lacks subcommand/config fields");
      name = saved["subcommand"].get<std::string>();
      for (const auto& [key, val] : saved["config"].items())
        ctx.cfg[key] = val.get<std::string>();
    } else {
      const auto chosen = app.get_subcommands();
      if (chosen.empty()) {
        std::cerr << app.help() << '\n';
        return 2;
      }
      name = chosen.front()->get_name();
      if (!config_path.empty()) ctx.cfg = load_config_file(config_path);
    }

    const RunOut out = dispatch(name, ctx);
    json summary{{"subcommand", name},
                 {"config", ctx.used},
                 {"results", out.results}};
    std::cout << summary.dump(2) << '\n';
    if (!out_dir.empty()) {
      std::filesystem::create_directories(out_dir);
      slelab::write_json_file(
          (std::filesystem::path(out_dir) / "summary.json").string(), summary);
      if (!out.csv.empty())
        slelab::write_text_file(
            (std::filesystem::path(out_dir) / "points.csv").string(), out.csv);
    }
    return out.status;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "argument error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
