#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wavebal/errors.hpp"
#include "wavebal/matrix.hpp"
#include "wavebal/model.hpp"
#include "wavebal/scheme.hpp"

// Config ingestion and deterministic output emission. All CSV output uses
// 17 significant digits (full double round trip), '.' decimals, LF endings.
// Identical config and seed must produce byte-identical files; everything
// here is locale-independent and iteration order is fixed.

namespace wavebal {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Mean of the final tenth of a series, the same tail the rate fit uses.
inline double tail_mean(const std::vector<double>& y) {
  if (y.empty()) return 0.0;
  const std::size_t tail = std::max<std::size_t>(1, y.size() / 10);
  double acc = 0.0;
  for (std::size_t i = y.size() - tail; i < y.size(); ++i) acc += y[i];
  return acc / static_cast<double>(tail);
}

/// Tolerances the commands consult, all overridable from the config file.
struct Tolerances {
  double float_identity = 1e-12;  // float-mode matrix identity ceiling
  double rate_margin = 0.05;      // fitted rate may undershoot Chat3 by this
  double plateau_lo = 0.35;       // plateau(2N)/plateau(N) acceptance band
  double plateau_hi = 0.65;
};

struct RunConfig {
  std::string command;
  ProblemSpec problem;
  bool has_problem = false;
  std::vector<int> Ns;
  double T_final = 0.0;
  std::uint64_t seed = 0;
  bool exact = false;
  bool inject_failure = false;  // matrix-verify failure-path hook
  std::optional<double> d1, d2;  // contraction command parameters
  Tolerances tol;
};

namespace detail {

inline ConfigError field_error(const std::string& where, const std::string& what) {
  return ConfigError("config field '" + where + "': " + what);
}

inline const nlohmann::json& need(const nlohmann::json& j, const char* key,
                                  const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw field_error(where + "." + key, "missing");
  return *it;
}

inline double need_number(const nlohmann::json& j, const char* key,
                          const std::string& where) {
  const auto& v = need(j, key, where);
  if (!v.is_number()) throw field_error(where + "." + key, "must be a number");
  return v.get<double>();
}

inline std::vector<double> need_number_list(const nlohmann::json& j,
                                            const char* key,
                                            const std::string& where) {
  const auto& v = need(j, key, where);
  if (!v.is_array()) throw field_error(where + "." + key, "must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      throw field_error(where + "." + key, "must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

}  // namespace detail

inline DampingLaw parse_damping(const nlohmann::json& j) {
  const std::string fam =
      detail::need(j, "family", "problem.damping").get<std::string>();
  const double p = detail::need_number(j, "param", "problem.damping");
  if (fam == "linear") return damping_linear(p);
  if (fam == "cubic") return damping_cubic(p);
  if (fam == "sinh") return damping_sinh(p);
  if (fam == "odd_power") return damping_odd_power(p);
  throw detail::field_error("problem.damping.family", "unknown family '" + fam + "'");
}

inline SpaceCoefficient parse_coefficient(const nlohmann::json& j) {
  const std::string where = "problem.coefficient";
  const std::string fam = detail::need(j, "family", where).get<std::string>();
  if (fam == "constant")
    return coeff_constant(detail::need_number(j, "value", where));
  if (fam == "affine")
    return coeff_affine(detail::need_number(j, "at0", where),
                        detail::need_number(j, "slope", where));
  if (fam == "piecewise")
    return coeff_piecewise(
        PiecewiseConstant(detail::need_number_list(j, "breakpoints", where),
                          detail::need_number_list(j, "values", where)));
  if (fam == "bump")
    return coeff_bump(detail::need_number(j, "base", where),
                      detail::need_number(j, "amplitude", where),
                      detail::need_number(j, "center", where),
                      detail::need_number(j, "width", where));
  throw detail::field_error(where + ".family", "unknown family '" + fam + "'");
}

inline Profile parse_profile(const nlohmann::json& j, const std::string& where) {
  Profile p{PiecewiseConstant(detail::need_number_list(j, "breakpoints", where),
                              detail::need_number_list(j, "values", where)),
            0.0};
  p.a_scale = j.value("a_scale", 0.0);
  return p;
}

inline ProblemSpec parse_problem(const nlohmann::json& j) {
  ProblemSpec spec{parse_damping(detail::need(j, "damping", "problem")),
                   parse_coefficient(detail::need(j, "coefficient", "problem")),
                   parse_profile(detail::need(j, "rho0", "problem"), "problem.rho0"),
                   parse_profile(detail::need(j, "J0", "problem"), "problem.J0"),
                   j.value("Jb", 0.0)};
  return spec;
}

inline RunConfig parse_config(const nlohmann::json& j) {
  if (j.value("schema", 0) != 1)
    throw detail::field_error("schema", "must be 1");
  RunConfig cfg;
  cfg.command = detail::need(j, "command", "").get<std::string>();
  const bool known = cfg.command == "simulate" || cfg.command == "decay-study" ||
                     cfg.command == "matrix-verify" ||
                     cfg.command == "contraction" || cfg.command == "convergence";
  if (!known)
    throw detail::field_error("command", "unknown command '" + cfg.command + "'");

  if (j.contains("problem")) {
    cfg.problem = parse_problem(j["problem"]);
    cfg.has_problem = true;
  }

  if (j.contains("N")) {
    const auto& n = j["N"];
    if (n.is_number_integer()) {
      cfg.Ns.push_back(n.get<int>());
    } else if (n.is_array()) {
      for (const auto& e : n) {
        if (!e.is_number_integer())
          throw detail::field_error("N", "list entries must be integers");
        cfg.Ns.push_back(e.get<int>());
      }
    } else {
      throw detail::field_error("N", "must be an integer or a list of integers");
    }
  }
  for (int n : cfg.Ns)
    if (n < 2 || n % 2 != 0)
      throw detail::field_error("N", "cell counts must be even and >= 2");

  cfg.T_final = j.value("T_final", 0.0);
  if (j.contains("T_final") && !(cfg.T_final > 0))
    throw detail::field_error("T_final", "must be positive");
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.exact = j.value("exact", false);
  cfg.inject_failure = j.value("inject_failure", false);
  if (j.contains("d1")) cfg.d1 = j["d1"].get<double>();
  if (j.contains("d2")) cfg.d2 = j["d2"].get<double>();

  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    cfg.tol.float_identity = t.value("float_identity", cfg.tol.float_identity);
    cfg.tol.rate_margin = t.value("rate_margin", cfg.tol.rate_margin);
    cfg.tol.plateau_lo = t.value("plateau_lo", cfg.tol.plateau_lo);
    cfg.tol.plateau_hi = t.value("plateau_hi", cfg.tol.plateau_hi);
  }
  return cfg;
}

/// Reads and parses a config file. JSON syntax errors surface as ConfigError
/// with an explicit line and column, computed from the parser's byte offset.
inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("JSON parse error in '" + path + "' at line " +
                      std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config error in '" + path + "': " + e.what());
  }
}

// ---- CSV and JSON emission ----

inline void write_trajectory_header(std::ostream& os) {
  os << "t,x_left,f_minus,f_plus\n";
}

/// One row per constant piece of the current profile.
inline void append_trajectory(std::ostream& os, const GridState& st) {
  const std::string t = fmt17(st.time());
  for (const auto& p : sample_profile(st))
    os << t << ',' << fmt17(p.x0) << ',' << fmt17(p.fm) << ',' << fmt17(p.fp)
       << '\n';
}

inline void write_diagnostics_csv(std::ostream& os, const DecayReport& rep) {
  os << "t,sup_J,sup_rho,tv_J,tv_rho,L_pm,L_0\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    os << fmt17(rep.times[i]) << ',' << fmt17(rep.sup_J[i]) << ','
       << fmt17(rep.sup_rho[i]) << ',' << fmt17(rep.tv_J[i]) << ','
       << fmt17(rep.tv_rho[i]) << ',' << fmt17(rep.L_pm[i]) << ','
       << fmt17(rep.L_0[i]) << '\n';
}

/// Summary of one simulation. fitted_rate is omitted when the series never
/// produced a usable decay window (stationary data, too-short runs).
inline nlohmann::json summary_json(const DecayReport& rep) {
  nlohmann::json s;
  s["N"] = rep.N;
  s["T_final"] = rep.T_final;
  s["records"] = rep.times.size();
  s["plateau"] = rep.plateau;
  s["rho_floor"] = tail_mean(rep.sup_rho);
  if (rep.fitted_rate != 0.0) s["fitted_rate"] = rep.fitted_rate;
  s["Chat3"] = rep.consts.Chat3;
  s["Cd1d2"] = rep.consts.Cd1d2;
  s["condition_holds"] = rep.consts.condition_holds;
  s["d1"] = rep.consts.d1;
  s["d2"] = rep.consts.d2;
  s["C0"] = rep.consts.C0;
  s["C1"] = rep.consts.C1;
  s["tv_bound"] = rep.tv_bound_M;
  if (!rep.c_min.empty()) {
    s["c_min"] = *std::min_element(rep.c_min.begin(), rep.c_min.end());
    s["c_max"] = *std::max_element(rep.c_max.begin(), rep.c_max.end());
  }
  return s;
}

inline void write_json(std::ostream& os, const nlohmann::json& j) {
  os << j.dump(2) << '\n';
}

struct DecayRow {
  int N = 0;
  double plateau = 0.0;
  double fitted_rate = 0.0;
  double Chat3 = 0.0;
};

inline void write_decay_table(std::ostream& os, const std::vector<DecayRow>& rows) {
  os << "N,plateau,fitted_rate,Chat3\n";
  for (const auto& r : rows)
    os << r.N << ',' << fmt17(r.plateau) << ',' << fmt17(r.fitted_rate) << ','
       << fmt17(r.Chat3) << '\n';
}

inline void write_matrix_csv(std::ostream& os, const Matrix<double>& m) {
  for (int i = 0; i < m.size(); ++i) {
    for (int j = 0; j < m.size(); ++j) {
      if (j) os << ',';
      os << fmt17(m(i, j));
    }
    os << '\n';
  }
}

// ---- logging (stderr only; stdout carries data tables exclusively) ----

inline int log_level() {
  const char* v = std::getenv("WAVEBAL_LOG");
  if (v == nullptr || *v == '\0') return 0;
  const std::string s(v);
  if (s == "0" || s == "off") return 0;
  if (s == "2" || s == "debug") return 2;
  return 1;
}

inline void log_line(int level, const std::string& msg) {
  if (log_level() >= level) std::fprintf(stderr, "[wavebal] %s\n", msg.c_str());
}

}  // namespace wavebal
