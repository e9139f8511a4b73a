#include "dmoc/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "dmoc/baselines/baselines.hpp"
#include "dmoc/errors.hpp"
#include "dmoc/problems/problems.hpp"

namespace dmoc::cli {

namespace {

std::string joined(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : ", ") + n;
  return s;
}

void reject_unknown(const Json& j, const std::string& where, const std::set<std::string>& known) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const Json& j, const std::string& key, double def, const std::string& where) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + "." + key + ": must be finite");
  return x;
}

int get_int(const Json& j, const std::string& key, int def, const std::string& where) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

bool get_bool(const Json& j, const std::string& key, bool def, const std::string& where) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& def, const std::string& where) {
  if (!j.contains(key)) return def;
  const Json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

Vec get_vec(const Json& j, const std::string& key, const std::string& where) {
  const Json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of numbers");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(where + "." + key + ": expected an array of numbers");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

problems::OrbitalParams orbital_params(const Json& p) {
  const std::string w = "params";
  reject_unknown(p, w, {"m", "gammaM", "r0", "rT", "d", "literal_radii"});
  const bool literal = get_bool(p, "literal_radii", false, w);
  if (literal && (p.contains("r0") || p.contains("rT"))) {
    throw ConfigError("params: literal_radii fixes r0 and rT; do not set them as well");
  }
  problems::OrbitalParams o = literal ? problems::OrbitalParams::literal_radii() : problems::OrbitalParams{};
  o.m = get_number(p, "m", o.m, w);
  o.gammaM = get_number(p, "gammaM", o.gammaM, w);
  o.r0 = get_number(p, "r0", o.r0, w);
  o.rT = get_number(p, "rT", o.rT, w);
  o.d = get_int(p, "d", o.d, w);
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return o;
}

problems::TwoLinkParams two_link_params(const Json& p) {
  const std::string w = "params";
  reject_unknown(p, w, {"m1", "m2", "l1", "l2", "J1", "J2", "g"});
  problems::TwoLinkParams t;
  t.m1 = get_number(p, "m1", t.m1, w);
  t.m2 = get_number(p, "m2", t.m2, w);
  t.l1 = get_number(p, "l1", t.l1, w);
  t.l2 = get_number(p, "l2", t.l2, w);
  t.J1 = get_number(p, "J1", t.J1, w);
  t.J2 = get_number(p, "J2", t.J2, w);
  t.g = get_number(p, "g", t.g, w);
  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return t;
}

Json resolved_params(const std::string& problem, const Json& p) {
  if (problem == "orbital") {
    const auto o = orbital_params(p);
    // Radii are written out explicitly, so the resolved form drops the flag.
    return Json{{"m", o.m}, {"gammaM", o.gammaM}, {"r0", o.r0}, {"rT", o.rT}, {"d", o.d}};
  }
  if (problem == "two-link") {
    const auto t = two_link_params(p);
    return Json{{"m1", t.m1}, {"m2", t.m2}, {"l1", t.l1}, {"l2", t.l2}, {"J1", t.J1}, {"J2", t.J2}, {"g", t.g}};
  }
  reject_unknown(p, "params", {});
  return Json::object();
}

}  // namespace

RunConfig parse_config(const Json& j) {
  reject_unknown(j, "config", {"problem", "params", "method", "N", "solver", "output_dir", "deterministic", "converge",
                               "audit"});
  RunConfig c;
  c.problem = get_string(j, "problem", c.problem, "config");
  const auto& probs = problems::problem_names();
  if (std::find(probs.begin(), probs.end(), c.problem) == probs.end()) {
    throw ConfigError("unknown problem '" + c.problem + "' (valid: " + joined(probs) + ")");
  }
  c.params = resolved_params(c.problem, j.contains("params") ? j.at("params") : Json::object());

  c.method = get_string(j, "method", c.method, "config");
  const auto& methods = method_names();
  if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) {
    throw ConfigError("unknown method '" + c.method + "' (valid: " + joined(methods) + ")");
  }
  c.N = get_int(j, "N", c.N, "config");
  if (c.N < 2) throw ConfigError("config.N: must be at least 2");
  c.output_dir = get_string(j, "output_dir", c.output_dir, "config");
  if (c.output_dir.empty()) throw ConfigError("config.output_dir: must not be empty");
  c.deterministic = get_bool(j, "deterministic", true, "config");
  if (!c.deterministic) throw ConfigError("config.deterministic: runs are always deterministic; only true is accepted");

  if (j.contains("solver")) {
    const Json& s = j.at("solver");
    const std::string w = "solver";
    reject_unknown(s, w, {"stationarity_tol", "feasibility_tol", "max_iterations", "regularization_floor", "contraction",
                          "sufficient_decrease", "min_step", "second_order_correction", "nonmonotone_window"});
    auto& o = c.solver;
    o.stationarity_tol = get_number(s, "stationarity_tol", o.stationarity_tol, w);
    o.feasibility_tol = get_number(s, "feasibility_tol", o.feasibility_tol, w);
    o.max_iterations = get_int(s, "max_iterations", o.max_iterations, w);
    o.regularization_floor = get_number(s, "regularization_floor", o.regularization_floor, w);
    o.contraction = get_number(s, "contraction", o.contraction, w);
    o.sufficient_decrease = get_number(s, "sufficient_decrease", o.sufficient_decrease, w);
    o.min_step = get_number(s, "min_step", o.min_step, w);
    o.second_order_correction = get_bool(s, "second_order_correction", o.second_order_correction, w);
    o.nonmonotone_window = get_int(s, "nonmonotone_window", o.nonmonotone_window, w);
  }
  try {
    c.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  if (j.contains("converge")) {
    const Json& s = j.at("converge");
    const std::string w = "converge";
    reject_unknown(s, w, {"grids", "feasibility_tol", "workers"});
    if (s.contains("grids")) {
      const Json& g = s.at("grids");
      if (!g.is_array()) throw ConfigError("converge.grids: expected an array of integers");
      c.converge.grids.clear();
      for (const auto& v : g) {
        if (!v.is_number_integer()) throw ConfigError("converge.grids: expected an array of integers");
        c.converge.grids.push_back(v.get<int>());
      }
    }
    c.converge.feasibility_tol = get_number(s, "feasibility_tol", c.converge.feasibility_tol, w);
    c.converge.workers = get_int(s, "workers", c.converge.workers, w);
  }
  const auto& g = c.converge.grids;
  if (g.size() < 3) throw ConfigError("converge.grids: need at least two coarse grids and a reference");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 2) throw ConfigError("converge.grids: entries must be at least 2");
    if (i > 0 && g[i] <= g[i - 1]) throw ConfigError("converge.grids: entries must increase");
    if (g.back() % g[i] != 0) throw ConfigError("converge.grids: every grid must divide the reference (last entry)");
  }
  if (!(c.converge.feasibility_tol > 0)) throw ConfigError("converge.feasibility_tol: must be positive");
  if (c.converge.workers < 0) throw ConfigError("converge.workers: must be non-negative");

  if (j.contains("audit")) {
    const Json& s = j.at("audit");
    reject_unknown(s, "audit", {"generator", "rollout"});
    c.audit.generator = get_int(s, "generator", 0, "audit");
    if (c.audit.generator < 0) throw ConfigError("audit.generator: must be non-negative");
    if (s.contains("rollout")) {
      const Json& r = s.at("rollout");
      const std::string w = "audit.rollout";
      reject_unknown(r, w, {"h", "steps", "q0", "qdot0"});
      RolloutConfig rc;
      rc.h = get_number(r, "h", rc.h, w);
      rc.steps = get_int(r, "steps", rc.steps, w);
      if (!(rc.h > 0)) throw ConfigError("audit.rollout.h: must be positive");
      if (rc.steps < 1) throw ConfigError("audit.rollout.steps: must be positive");
      const Ocp o = build_problem(c, c.N);
      rc.q0 = r.contains("q0") ? get_vec(r, "q0", w) : o.q0;
      rc.qdot0 = r.contains("qdot0") ? get_vec(r, "qdot0", w) : o.qdot0;
      if (rc.q0.size() != o.sys.n || rc.qdot0.size() != o.sys.n) {
        throw ConfigError("audit.rollout: q0 and qdot0 need " + std::to_string(o.sys.n) + " entries");
      }
      c.audit.rollout = rc;
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

Json to_json(const RunConfig& c) {
  const auto& o = c.solver;
  Json grids = Json::array();
  for (int g : c.converge.grids) grids.push_back(g);
  Json audit{{"generator", c.audit.generator}};
  if (c.audit.rollout) {
    const auto& r = *c.audit.rollout;
    audit["rollout"] = Json{{"h", r.h}, {"steps", r.steps}, {"q0", vec_json(r.q0)}, {"qdot0", vec_json(r.qdot0)}};
  }
  return Json{
      {"problem", c.problem},
      {"params", c.params},
      {"method", c.method},
      {"N", c.N},
      {"solver",
       {{"stationarity_tol", o.stationarity_tol},
        {"feasibility_tol", o.feasibility_tol},
        {"max_iterations", o.max_iterations},
        {"regularization_floor", o.regularization_floor},
        {"contraction", o.contraction},
        {"sufficient_decrease", o.sufficient_decrease},
        {"min_step", o.min_step},
        {"second_order_correction", o.second_order_correction},
        {"nonmonotone_window", o.nonmonotone_window}}},
      {"output_dir", c.output_dir},
      {"deterministic", c.deterministic},
      {"converge",
       {{"grids", grids}, {"feasibility_tol", c.converge.feasibility_tol}, {"workers", c.converge.workers}}},
      {"audit", audit},
  };
}

Ocp build_problem(const RunConfig& c, int N) {
  if (c.problem == "orbital") return problems::orbital_transfer(orbital_params(c.params), N);
  if (c.problem == "two-link") return problems::two_link(two_link_params(c.params), N);
  if (c.problem == "free-particle") return problems::free_particle_transfer(N);
  if (c.problem == "pendulum") return problems::pendulum_swing(N);
  throw ConfigError("unknown problem '" + c.problem + "'");
}

}  // namespace dmoc::cli
