// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file report.hpp
 * @brief Scenario files, task orchestration and deterministic CSV/JSON output.
 *
 * A scenario is flat `key = value` text; `#` starts a comment. Lists are
 * comma separated. Orbitals are `kind charge n l m` entries separated by `;`.
 *
 * Exit codes: 0 when every verdict passes, 2 when a bound check fails, 1 on
 * an operational error.
 */

#pragma once

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rholab/bounds.hpp"
#include "rholab/density.hpp"
#include "rholab/extension.hpp"
#include "rholab/radial.hpp"
#include "rholab/wavefunction.hpp"

namespace rholab {

using Json = nlohmann::ordered_json;

inline constexpr int report_spec_version = 1;

enum class Task { density, certifyOrigin, decay, radial, extend, checkBounds, all };

inline const char* to_string(Task t) {
  switch (t) {
    case Task::density: return "density";
    case Task::certifyOrigin: return "certifyOrigin";
    case Task::decay: return "decay";
    case Task::radial: return "radial";
    case Task::extend: return "extend";
    case Task::checkBounds: return "checkBounds";
    default: return "all";
  }
}

inline std::optional<Task> task_from_string(const std::string& s) {
  for (Task t : {Task::density, Task::certifyOrigin, Task::decay, Task::radial, Task::extend, Task::checkBounds,
                 Task::all})
    if (s == to_string(t)) return t;
  return std::nullopt;
}

struct GridSpec {
  double rmin = 0.0;
  double rmax = 30.0;
  int points = 601;
  Spacing spacing = Spacing::linear;
};

struct Scenario {
  std::optional<WavefunctionModel> model;
  std::string model_kind;
  Task task = Task::all;
  GridSpec grid;
  std::optional<Method> method;
  McConfig mc;
  std::optional<std::uint64_t> seed;
  std::optional<Window> window;
  FitBasis basis = FitBasis::asymptotic;

  std::optional<double> lower_alpha;  // global lower check; default alpha0 + 0.01
  double lower_r0 = 0.0;
  std::optional<double> epsilon;
  std::optional<double> envelope_C;
  double envelope_r0 = 1.0;
  double lemma_rmin = 2.0;
  std::optional<double> lemma_rmax;

  bool hypersphere = false;
  double hyper_r1 = 8.0, hyper_r2 = 16.0;
  int hyper_points = 9;
  double hyper_tolerance = 0.1;

  std::vector<int> radial_l{0};
  std::vector<double> radial_kappa{1.0};
  std::vector<double> radial_R{1.0};
  double radial_span = 10.0;
  int radial_points = 101;

  int extend_lmax = 4;
  double extend_R = 1.0;
  std::vector<double> extend_widths;
  std::string extend_mode = "random";
  int extend_l = 0, extend_m = 0;
  double extend_span = 4.0;
  int extend_points = 81;

  std::string output_dir = ".";
  std::string output_prefix;
  std::set<std::string> formats{"csv", "json"};

  std::optional<std::string> profile_file;

  std::vector<std::pair<std::string, std::string>> echo;  // keys in file order
  std::map<std::string, int> lines;

  bool uses_monte_carlo() const { return method && *method == Method::monteCarlo; }
  bool needs_model() const { return task != Task::radial && task != Task::extend; }
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_number(const std::string& s, int line, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    throw ParseError(line, "malformed number '" + s + "' for " + key);
  return v;
}

inline long long parse_integer(const std::string& s, int line, const std::string& key) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw ParseError(line, "malformed integer '" + s + "' for " + key);
  return v;
}

inline std::vector<double> parse_numbers(const std::string& s, int line, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_number(item, line, key));
  if (out.empty()) throw ParseError(line, key + " needs at least one number");
  return out;
}

inline bool parse_bool(const std::string& s, int line, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ParseError(line, "malformed boolean '" + s + "' for " + key);
}

inline Statistics parse_statistics(const std::string& s, int line) {
  if (s == "antisymmetric") return Statistics::antisymmetric;
  if (s == "symmetric") return Statistics::symmetric;
  throw ParseError(line, "statistics must be antisymmetric or symmetric, got '" + s + "'");
}

inline std::vector<Orbital> parse_orbitals(const std::string& s, int line) {
  std::vector<Orbital> out;
  for (const auto& entry : split(s, ';')) {
    std::istringstream in(entry);
    std::string kind, tok;
    std::vector<std::string> rest;
    in >> kind;
    while (in >> tok) rest.push_back(tok);
    if (rest.size() != 4) throw ParseError(line, "orbital '" + entry + "' must read: kind charge n l m");
    const double c = parse_number(rest[0], line, "model.orbitals");
    const int n = static_cast<int>(parse_integer(rest[1], line, "model.orbitals"));
    const int l = static_cast<int>(parse_integer(rest[2], line, "model.orbitals"));
    const int m = static_cast<int>(parse_integer(rest[3], line, "model.orbitals"));
    try {
      if (kind == "hydrogenic") out.push_back(Orbital::hydrogenic(c, n, l, m));
      else if (kind == "slater") out.push_back(Orbital::slater(c, n, l, m));
      else throw ParseError(line, "orbital kind must be hydrogenic or slater, got '" + kind + "'");
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line, e.what());
    }
  }
  if (out.empty()) throw ParseError(line, "model.orbitals is empty");
  return out;
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "model.kind", "model.alphas", "model.mixing", "model.Z", "model.n", "model.l", "model.m",
      "model.orbitals", "model.n1", "model.n2", "model.statistics1", "model.statistics2", "model.energy",
      "model.alpha0", "model.charge", "model.scale", "task", "grid.rmin", "grid.rmax", "grid.points",
      "grid.spacing", "density.method", "mc.samples", "mc.proposal", "mc.stepSize", "mc.burnIn", "mc.chains",
      "seed", "fit.r1", "fit.r2", "fit.basis", "bounds.lowerAlpha", "bounds.lowerR0", "bounds.epsilon",
      "bounds.envelopeC", "bounds.envelopeR0", "bounds.lemmaRmin", "bounds.lemmaRmax", "decay.hypersphere",
      "decay.hyperR1", "decay.hyperR2", "decay.hyperPoints", "decay.hyperTolerance", "radial.l", "radial.kappa",
      "radial.R", "radial.span", "radial.points", "extend.lmax", "extend.R", "extend.widths", "extend.mode",
      "extend.l", "extend.m", "extend.span", "extend.points", "output.dir", "output.prefix", "output.formats",
      "profile.file"};
  return keys;
}

}  // namespace detail

/// Command-line values that take precedence over the scenario text.
struct ScenarioOverrides {
  std::optional<Task> task;
  std::optional<std::uint64_t> seed;
};

/// Parses and validates scenario text. Errors carry the offending line.
inline Scenario parse_scenario(const std::string& text, const ScenarioOverrides& ov = {}) {
  using namespace detail;
  Scenario sc;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) throw ParseError(lineno, "unknown key '" + key + "'");
    if (kv.count(key)) throw ParseError(lineno, "duplicate key '" + key + "'");
    if (value.empty()) throw ParseError(lineno, "empty value for '" + key + "'");
    kv[key] = value;
    sc.lines[key] = lineno;
    sc.echo.emplace_back(key, value);
  }
  auto has = [&](const std::string& k) { return kv.count(k) > 0; };
  auto line_of = [&](const std::string& k) { return has(k) ? sc.lines.at(k) : 0; };
  auto num = [&](const std::string& k) { return parse_number(kv.at(k), line_of(k), k); };
  auto integer = [&](const std::string& k) { return parse_integer(kv.at(k), line_of(k), k); };

  if (has("task")) {
    const auto t = task_from_string(kv["task"]);
    if (!t) throw ParseError(line_of("task"), "unknown task '" + kv["task"] + "'");
    sc.task = *t;
  }
  if (ov.task) sc.task = *ov.task;

  // Grid.
  if (has("grid.rmin")) sc.grid.rmin = num("grid.rmin");
  if (has("grid.rmax")) sc.grid.rmax = num("grid.rmax");
  if (has("grid.points")) sc.grid.points = static_cast<int>(integer("grid.points"));
  if (has("grid.spacing")) {
    if (kv["grid.spacing"] == "linear") sc.grid.spacing = Spacing::linear;
    else if (kv["grid.spacing"] == "log") sc.grid.spacing = Spacing::log;
    else throw ParseError(line_of("grid.spacing"), "grid.spacing must be linear or log");
  }
  if (!(sc.grid.rmin < sc.grid.rmax))
    throw ParseError(std::max(line_of("grid.rmin"), line_of("grid.rmax")),
                     "grid.rmin = " + format_double(sc.grid.rmin) + " must be below grid.rmax = " +
                         format_double(sc.grid.rmax));
  if (sc.grid.rmin < 0.0) throw ParseError(line_of("grid.rmin"), "grid.rmin must be >= 0");
  if (sc.grid.points < 2) throw ParseError(line_of("grid.points"), "grid.points must be >= 2");
  if (sc.grid.spacing == Spacing::log && sc.grid.rmin <= 0.0)
    throw ParseError(line_of("grid.spacing"), "log spacing needs grid.rmin > 0");

  // Sampling.
  if (has("density.method")) {
    try {
      sc.method = method_from_string(kv["density.method"]);
    } catch (const DomainError& e) {
      throw ParseError(line_of("density.method"), e.what());
    }
  }
  if (has("mc.samples")) {
    const auto n = integer("mc.samples");
    if (n < 1) throw ParseError(line_of("mc.samples"), "mc.samples must be >= 1");
    sc.mc.samples = static_cast<std::size_t>(n);
  }
  if (has("mc.proposal")) {
    if (kv["mc.proposal"] == "exponentialImportance") sc.mc.proposal = Proposal::exponentialImportance;
    else if (kv["mc.proposal"] == "metropolis") sc.mc.proposal = Proposal::metropolis;
    else throw ParseError(line_of("mc.proposal"), "mc.proposal must be exponentialImportance or metropolis");
  }
  if (has("mc.stepSize")) {
    sc.mc.step_size = num("mc.stepSize");
    if (!(sc.mc.step_size > 0.0)) throw ParseError(line_of("mc.stepSize"), "mc.stepSize must be > 0");
  }
  if (has("mc.burnIn")) {
    const auto n = integer("mc.burnIn");
    if (n < 0) throw ParseError(line_of("mc.burnIn"), "mc.burnIn must be >= 0");
    sc.mc.burn_in = static_cast<std::size_t>(n);
  }
  if (has("mc.chains")) {
    const auto n = integer("mc.chains");
    if (n < 1) throw ParseError(line_of("mc.chains"), "mc.chains must be >= 1");
    sc.mc.chains = static_cast<std::size_t>(n);
  }
  if (has("seed")) {
    const auto s = integer("seed");
    if (s < 0) throw ParseError(line_of("seed"), "seed must be >= 0");
    sc.seed = static_cast<std::uint64_t>(s);
    sc.mc.seed = *sc.seed;
  }
  if (ov.seed) {
    sc.seed = *ov.seed;
    sc.mc.seed = *ov.seed;
  }
  if (has("decay.hypersphere")) sc.hypersphere = parse_bool(kv["decay.hypersphere"], line_of("decay.hypersphere"), "decay.hypersphere");
  if (has("decay.hyperR1")) sc.hyper_r1 = num("decay.hyperR1");
  if (has("decay.hyperR2")) sc.hyper_r2 = num("decay.hyperR2");
  if (has("decay.hyperPoints")) sc.hyper_points = static_cast<int>(integer("decay.hyperPoints"));
  if (has("decay.hyperTolerance")) sc.hyper_tolerance = num("decay.hyperTolerance");
  if (sc.hypersphere && !(sc.hyper_r2 > sc.hyper_r1 && sc.hyper_r1 > 0.0))
    throw ParseError(line_of("decay.hyperR2"), "decay.hyperR1 must be positive and below decay.hyperR2");
  if (sc.hypersphere && sc.hyper_points < 8)
    throw ParseError(line_of("decay.hyperPoints"), "decay.hyperPoints must be >= 8");
  if ((sc.uses_monte_carlo() || sc.hypersphere) && !sc.seed)
    throw ParseError(line_of(sc.hypersphere ? "decay.hypersphere" : "density.method"),
                     "a seed is required when a Monte Carlo path is enabled");

  // Fit window.
  if (has("fit.r1") != has("fit.r2"))
    throw ParseError(std::max(line_of("fit.r1"), line_of("fit.r2")), "fit.r1 and fit.r2 must be given together");
  if (has("fit.r1")) {
    Window w{num("fit.r1"), num("fit.r2")};
    if (!(w.r1 < w.r2)) throw ParseError(line_of("fit.r2"), "fit.r1 must be below fit.r2");
    if (w.r1 < sc.grid.rmin || w.r2 > sc.grid.rmax)
      throw ParseError(line_of("fit.r1"), "fit window [" + format_double(w.r1) + ", " + format_double(w.r2) +
                                              "] lies outside the grid [" + format_double(sc.grid.rmin) + ", " +
                                              format_double(sc.grid.rmax) + "]");
    sc.window = w;
  }
  if (has("fit.basis")) {
    try {
      sc.basis = fit_basis_from_string(kv["fit.basis"]);
    } catch (const DomainError& e) {
      throw ParseError(line_of("fit.basis"), e.what());
    }
  }

  // Bounds.
  if (has("bounds.lowerAlpha")) sc.lower_alpha = num("bounds.lowerAlpha");
  if (has("bounds.lowerR0")) sc.lower_r0 = num("bounds.lowerR0");
  if (has("bounds.epsilon")) {
    sc.epsilon = num("bounds.epsilon");
    if (!(*sc.epsilon > 0.0)) throw ParseError(line_of("bounds.epsilon"), "bounds.epsilon must be > 0");
  }
  if (has("bounds.envelopeC")) sc.envelope_C = num("bounds.envelopeC");
  if (has("bounds.envelopeR0")) {
    sc.envelope_r0 = num("bounds.envelopeR0");
    if (!(sc.envelope_r0 > 0.0)) throw ParseError(line_of("bounds.envelopeR0"), "bounds.envelopeR0 must be > 0");
  }
  if (has("bounds.lemmaRmin")) sc.lemma_rmin = num("bounds.lemmaRmin");
  if (has("bounds.lemmaRmax")) sc.lemma_rmax = num("bounds.lemmaRmax");

  // Radial.
  if (has("radial.l")) {
    sc.radial_l.clear();
    for (double v : parse_numbers(kv["radial.l"], line_of("radial.l"), "radial.l")) {
      if (v != std::floor(v) || v < 0 || v > radial_max_l)
        throw ParseError(line_of("radial.l"), "radial.l entries must be integers in [0, 64]");
      sc.radial_l.push_back(static_cast<int>(v));
    }
  }
  if (has("radial.kappa")) sc.radial_kappa = parse_numbers(kv["radial.kappa"], line_of("radial.kappa"), "radial.kappa");
  if (has("radial.R")) sc.radial_R = parse_numbers(kv["radial.R"], line_of("radial.R"), "radial.R");
  for (double k : sc.radial_kappa)
    if (!(k >= 0.0 && k <= radial_max_kappa)) throw ParseError(line_of("radial.kappa"), "radial.kappa must lie in [0, 1e3]");
  for (double R : sc.radial_R)
    if (!(R > 0.0)) throw ParseError(line_of("radial.R"), "radial.R must be > 0");
  if (has("radial.span")) sc.radial_span = num("radial.span");
  if (has("radial.points")) sc.radial_points = static_cast<int>(integer("radial.points"));
  if (!(sc.radial_span > 0.0)) throw ParseError(line_of("radial.span"), "radial.span must be > 0");
  if (sc.radial_points < 2) throw ParseError(line_of("radial.points"), "radial.points must be >= 2");

  // Extension.
  if (has("extend.lmax")) sc.extend_lmax = static_cast<int>(integer("extend.lmax"));
  if (has("extend.R")) sc.extend_R = num("extend.R");
  if (has("extend.widths")) sc.extend_widths = parse_numbers(kv["extend.widths"], line_of("extend.widths"), "extend.widths");
  if (has("extend.mode")) sc.extend_mode = kv["extend.mode"];
  if (has("extend.l")) sc.extend_l = static_cast<int>(integer("extend.l"));
  if (has("extend.m")) sc.extend_m = static_cast<int>(integer("extend.m"));
  if (has("extend.span")) sc.extend_span = num("extend.span");
  if (has("extend.points")) sc.extend_points = static_cast<int>(integer("extend.points"));
  if (sc.extend_mode != "random" && sc.extend_mode != "single")
    throw ParseError(line_of("extend.mode"), "extend.mode must be random or single");
  if (sc.extend_lmax < 0 || sc.extend_lmax > 32) throw ParseError(line_of("extend.lmax"), "extend.lmax must lie in [0, 32]");
  if (!(sc.extend_R > 0.0)) throw ParseError(line_of("extend.R"), "extend.R must be > 0");
  for (double w : sc.extend_widths)
    if (!(w > 0.0)) throw ParseError(line_of("extend.widths"), "extend.widths must be positive");
  if (sc.extend_mode == "single" && (sc.extend_l < 0 || std::abs(sc.extend_m) > sc.extend_l))
    throw ParseError(line_of("extend.l"), "extend.l/extend.m must satisfy |m| <= l");
  if (sc.extend_points < 2) throw ParseError(line_of("extend.points"), "extend.points must be >= 2");

  // Output.
  if (has("output.dir")) sc.output_dir = kv["output.dir"];
  if (has("output.prefix")) sc.output_prefix = kv["output.prefix"];
  if (has("output.formats")) {
    sc.formats.clear();
    for (const auto& f : split(kv["output.formats"], ',')) {
      if (f != "csv" && f != "json") throw ParseError(line_of("output.formats"), "output format must be csv or json");
      sc.formats.insert(f);
    }
  }
  if (has("profile.file")) sc.profile_file = kv["profile.file"];

  // Model.
  if (has("model.kind")) {
    const std::string kind = kv["model.kind"];
    sc.model_kind = kind;
    Metadata meta;
    if (has("model.energy")) meta.energy = num("model.energy");
    if (has("model.alpha0")) meta.alpha0 = num("model.alpha0");
    if (has("model.charge")) meta.nuclear_charge = num("model.charge");
    if (has("model.scale")) meta.scale = num("model.scale");
    const int kline = line_of("model.kind");
    try {
      if (kind == "separable") {
        if (!has("model.alphas")) throw ParseError(kline, "separable model needs model.alphas");
        sc.model = WavefunctionModel::separable(parse_numbers(kv["model.alphas"], line_of("model.alphas"), "model.alphas"), meta);
      } else if (kind == "mixed") {
        if (!has("model.alphas")) throw ParseError(kline, "mixed model needs model.alphas");
        const auto alphas = parse_numbers(kv["model.alphas"], line_of("model.alphas"), "model.alphas");
        if (!has("model.mixing") || kv["model.mixing"] == "rotation45") {
          if (alphas.size() != 2) throw ParseError(line_of("model.alphas"), "rotation45 mixing needs two alphas");
          sc.model = WavefunctionModel::rotated_pair(alphas[0], alphas[1], meta);
        } else {
          sc.model = WavefunctionModel::mixed(parse_numbers(kv["model.mixing"], line_of("model.mixing"), "model.mixing"),
                                              alphas, meta);
        }
      } else if (kind == "hydrogenic") {
        const double z = has("model.Z") ? num("model.Z") : 1.0;
        const int n = has("model.n") ? static_cast<int>(integer("model.n")) : 1;
        const int l = has("model.l") ? static_cast<int>(integer("model.l")) : 0;
        const int m = has("model.m") ? static_cast<int>(integer("model.m")) : 0;
        sc.model = WavefunctionModel::hydrogenic(z, n, l, m, meta);
      } else if (kind == "determinant") {
        if (!has("model.orbitals")) throw ParseError(kline, "determinant model needs model.orbitals");
        auto orbitals = parse_orbitals(kv["model.orbitals"], line_of("model.orbitals"));
        SymmetryClass sym;
        sym.n1 = has("model.n1") ? static_cast<int>(integer("model.n1")) : static_cast<int>(orbitals.size());
        sym.n2 = has("model.n2") ? static_cast<int>(integer("model.n2")) : static_cast<int>(orbitals.size()) - sym.n1;
        if (has("model.statistics1")) sym.statistics1 = parse_statistics(kv["model.statistics1"], line_of("model.statistics1"));
        if (has("model.statistics2")) sym.statistics2 = parse_statistics(kv["model.statistics2"], line_of("model.statistics2"));
        sc.model = build_determinant(std::move(orbitals), sym, meta);
      } else {
        throw ParseError(kline, "model.kind must be separable, mixed, hydrogenic or determinant");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(kline, e.what());
    }
  } else if (sc.needs_model()) {
    throw ParseError(0, std::string("missing model.kind (required by task ") + to_string(sc.task) + ")");
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path, const ScenarioOverrides& ov = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario sc = parse_scenario(ss.str(), ov);
  // Profile paths are relative to the scenario file.
  if (sc.profile_file && std::filesystem::path(*sc.profile_file).is_relative())
    sc.profile_file = (std::filesystem::path(path).parent_path() / *sc.profile_file).string();
  return sc;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct OutputFile {
  std::string name;
  std::string content;
};

struct Report {
  Json json;
  std::vector<OutputFile> csv;
  int exit_code = 0;
  double wall_seconds = 0.0;  // diagnostics only; never serialized
};

namespace detail {

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline std::string label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline Json profile_summary(const RadialDensityProfile& p) {
  Json j;
  j["provenance"] = to_string(p.provenance);
  j["points"] = p.size();
  j["rmin"] = p.grid.front();
  j["rmax"] = p.grid.back();
  j["electrons"] = p.electrons;
  j["normSquared"] = number_or_null(p.norm_squared);
  return j;
}

inline Json mass_json(const MassCheck& m) {
  return Json{{"integral", m.integral},
              {"expected", m.expected},
              {"tolerance", m.tolerance},
              {"stdError", m.std_error},
              {"passed", m.passed}};
}

inline Json positivity_json(const RadialDensityProfile& p) {
  std::size_t nonpositive = 0;
  double first_bad = std::numeric_limits<double>::quiet_NaN();
  double min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    min_value = std::min(min_value, p.values[i]);
    if (!(p.values[i] > 0.0)) {
      if (nonpositive == 0) first_bad = p.grid[i];
      ++nonpositive;
    }
  }
  Json j{{"minValue", min_value}, {"nonpositivePoints", nonpositive}, {"passed", nonpositive == 0}};
  if (nonpositive > 0) j["firstNonpositiveR"] = first_bad;
  return j;
}

inline Json origin_json(const OriginCertificate& c) {
  return Json{{"rho0", c.rho0},
              {"rho0StdError", c.rho0_stderr},
              {"Psq", c.psq},
              {"PsqStdError", c.psq_stderr},
              {"normSq", c.norm_sq},
              {"Z", c.Z},
              {"N", c.N},
              {"A", c.A},
              {"B", c.B},
              {"C", c.C},
              {"alphaStar", c.alpha_star},
              {"lowerBound", c.lower_bound},
              {"minimum", c.minimum()},
              {"status", to_string(c.status)},
              {"passed", c.passed}};
}

inline Json decay_json(const DecayCertificate& c) {
  Json j{{"fittedRate", c.fitted_rate},
         {"intercept", c.intercept},
         {"residual", c.residual},
         {"tolerance", c.tolerance},
         {"shellRate", c.shell_rate},
         {"shellResidual", c.shell_residual},
         {"shellTolerance", c.shell_tolerance},
         {"alpha0", c.alpha0},
         {"N", c.N},
         {"upperEnvRate", c.upper_env_rate},
         {"lowerEnvRate", c.lower_env_rate},
         {"bandPosition", c.band_position},
         {"fitWindow", Json::array({c.window.r1, c.window.r2})},
         {"fitBasis", to_string(c.basis)},
         {"sandwichPassed", c.sandwich_passed},
         {"shellPassed", c.shell_passed}};
  j["energy"] = c.energy ? Json(*c.energy) : Json(nullptr);
  j["thresholdCap"] = c.threshold_cap ? Json(*c.threshold_cap) : Json(nullptr);
  j["epsilon"] = c.epsilon ? Json(*c.epsilon) : Json(nullptr);
  j["capPassed"] = c.cap_passed ? Json(*c.cap_passed) : Json(nullptr);
  return j;
}

inline Json scan_json(const ConstantScan& s) {
  Json j{{"constant", number_or_null(s.constant)},
         {"argsup", s.argsup},
         {"rMin", s.r_min},
         {"rMax", s.r_max},
         {"points", s.points},
         {"passed", s.passed}};
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

struct VerdictBook {
  Json verdicts = Json::object();
  bool all = true;
  void add(const std::string& name, bool passed) {
    verdicts[name] = passed;
    all = all && passed;
  }
};

inline std::string envelope_csv(const RadialDensityProfile& p, const DecayCertificate& c) {
  // Envelopes anchored at the first grid point of the fit window.
  std::size_t a = 0;
  while (a + 1 < p.size() && p.grid[a] < c.window.r1) ++a;
  const double ra = p.grid[a], ya = p.values[a];
  std::string out = "r,rho_tilde,stderr,upper_env,lower_env\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double up = ya * std::exp(c.upper_env_rate * (p.grid[i] - ra));
    const double lo = ya * std::exp(c.lower_env_rate * (p.grid[i] - ra));
    out += format_double(p.grid[i]) + "," + format_double(p.values[i]) + "," + format_double(p.stderr_[i]) + "," +
           format_double(up) + "," + format_double(lo) + "\n";
  }
  return out;
}

inline RadialDensityProfile scenario_profile(const Scenario& sc, const WavefunctionModel& model, Method method) {
  if (sc.profile_file) {
    std::ifstream in(*sc.profile_file);
    if (!in) throw Error("cannot open profile file '" + *sc.profile_file + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return profile_from_csv(ss.str(), model.electrons(), norm_squared(model).value);
  }
  return profile(model, make_grid(sc.grid.rmin, sc.grid.rmax, sc.grid.points, sc.grid.spacing), method, sc.mc);
}

inline void run_radial(const Scenario& sc, Json& results, VerdictBook& book, std::vector<OutputFile>& csv) {
  Json list = Json::array();
  bool all_mp = true, all_ode = true;
  for (int l : sc.radial_l)
    for (double kappa : sc.radial_kappa)
      for (double R : sc.radial_R) {
        const auto grid = make_grid(R, R + sc.radial_span, sc.radial_points);
        const RadialSolution sol = solve_radial(l, kappa, R, grid);
        const MaxPrincipleCheck mp = max_principle_check(sol);
        const OdeCrossCheck ode = ode_cross_check(l, kappa, R, grid.back());
        all_mp = all_mp && mp.passed;
        all_ode = all_ode && ode.passed;
        const std::string name = "radial_l" + std::to_string(l) + "_k" + label(kappa) + "_R" + label(R) + ".csv";
        list.push_back(Json{{"l", l},
                            {"kappa", kappa},
                            {"R", R},
                            {"method", to_string(sol.method)},
                            {"fAtEnd", sol.values.back()},
                            {"maxPrinciple", Json{{"maxExcess", mp.max_excess}, {"worstR", mp.worst_r}, {"passed", mp.passed}}},
                            {"ode", Json{{"maxDeviation", ode.max_deviation},
                                         {"rEnd", ode.r_end},
                                         {"rCompare", ode.r_compare},
                                         {"steps", ode.steps},
                                         {"skipped", ode.skipped},
                                         {"passed", ode.passed}}},
                            {"csv", name}});
        std::string out = "r,f,envelope\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
          out += format_double(grid[i]) + "," + format_double(sol.values[i]) + "," +
                 format_double(max_principle_envelope(kappa, R, grid[i])) + "\n";
        csv.push_back({name, out});
      }
  results["radial"] = list;
  book.add("radial.maxPrinciple", all_mp);
  book.add("radial.odeCrossCheck", all_ode);
}

inline void run_extend(const Scenario& sc, Json& results, VerdictBook& book, std::vector<OutputFile>& csv) {
  const double R = sc.extend_R;
  const BoundaryFunction b =
      sc.extend_mode == "single"
          ? BoundaryFunction{sc.extend_l, sc.extend_widths,
                             [&] {
                               BoundaryFunction z = BoundaryFunction::zeros(sc.extend_l, sc.extend_widths);
                               for (std::size_t i = 0; i < z.inner(); ++i) z.coeff(lm_index(sc.extend_l, sc.extend_m), i) = 1.0;
                               return z.coeffs;
                             }()}
          : BoundaryFunction::random(sc.extend_lmax, sc.seed.value_or(1), sc.extend_widths);
  const HarmonicField field = extend(b, R);
  const double roundtrip = roundtrip_check(b, R);
  const double roundtrip_tol = b.electrons() == 1 ? 1e-10 : 1e-8;
  const NormBoundCheck shell = shell_norm_bound_check(field, b, R);
  const Vec3 probe{0.9 * R, 1.1 * R, 0.7 * R};
  const Vec3 xh = b.electrons() == 2 ? Vec3{0.3, 0.2, 0.4} : Vec3{0, 0, 0};
  const ConvergenceCheck conv = field_convergence(field, probe, xh, 1e-2 * R);
  const TraceCheck tg = trace_inequality_check({{SampleFactor::Kind::gaussian, 0.5}}, R);
  const TraceCheck te = trace_inequality_check({{SampleFactor::Kind::exponential, 1.0}}, R);
  const bool shell_sharp = shell.constant <= std::sqrt(26.0 / 3.0) + 1e-6;
  results["extend"] = Json{
      {"lmax", b.lmax},
      {"R", R},
      {"electrons", b.electrons()},
      {"widths", b.widths},
      {"normSquared", b.norm_squared()},
      {"roundtrip", Json{{"relativeError", roundtrip}, {"tolerance", roundtrip_tol}, {"passed", roundtrip < roundtrip_tol}}},
      {"shellNorm", Json{{"lhs", shell.lhs},
                         {"rhs", shell.rhs},
                         {"constant", shell.constant},
                         {"sharpConstant", std::sqrt(26.0 / 3.0)},
                         {"passed", shell.passed},
                         {"sharpPassed", shell_sharp}}},
      {"harmonic", Json{{"residualH", conv.residual_h},
                        {"residualHalf", conv.residual_half},
                        {"ratio", conv.ratio},
                        {"passed", conv.passed}}},
      {"trace", Json::array({Json{{"sample", "gaussian"}, {"lhs", tg.lhs}, {"rhs", tg.rhs}, {"passed", tg.passed}},
                             Json{{"sample", "exponential"}, {"lhs", te.lhs}, {"rhs", te.rhs}, {"passed", te.passed}}})},
      {"csv", "extend.csv"}};
  book.add("extend.roundtrip", roundtrip < roundtrip_tol);
  book.add("extend.shellNorm", shell.passed && shell_sharp);
  book.add("extend.harmonic", conv.passed);
  book.add("extend.trace", tg.passed && te.passed);
  std::string out = "r,value,envelope_bound\n";
  const Vec3 w{0.0, 0.0, 1.0};
  const auto grid = make_grid(R, R + sc.extend_span, sc.extend_points);
  for (double r : grid)
    out += format_double(r) + "," + format_double(field.value(r, w, xh)) + "," +
           format_double(extension_envelope(b, R, r, w)) + "\n";
  csv.push_back({"extend.csv", out});
}

inline Report run_tasks(const Scenario& sc, std::string& stage) {
  Report rep;
  VerdictBook book;
  Json results = Json::object();
  const bool all = sc.task == Task::all;
  auto wants = [&](Task t) { return all || sc.task == t; };

  if (sc.needs_model()) {
    if (!sc.model) throw Error("scenario has no model");
    const WavefunctionModel& model = *sc.model;
    const Method method = sc.method.value_or(default_method(model));
    const double alpha0 = analytic_alpha0(model);
    const int N = model.electrons();

    Json mj{{"kind", sc.model_kind},
            {"electrons", N},
            {"normSquared", norm_squared(model).value},
            {"alpha0", alpha0},
            {"energy", energy_of(model) ? Json(*energy_of(model)) : Json(nullptr)},
            {"nuclearCharge", nuclear_charge(model) ? Json(*nuclear_charge(model)) : Json(nullptr)},
            {"method", to_string(method)}};
    results["model"] = mj;

    std::optional<RadialDensityProfile> prof;
    auto get_profile = [&]() -> const RadialDensityProfile& {
      if (!prof) prof = scenario_profile(sc, model, method);
      return *prof;
    };

    if (wants(Task::density)) {
      stage = "density";
      const auto& p = get_profile();
      Json d;
      d["profile"] = profile_summary(p);
      d["rho0"] = density_total(model, {0, 0, 0}, method, sc.mc, 41).value;
      if (p.grid.front() == 0.0) {
        const MassCheck m = mass_check(p);
        d["mass"] = mass_json(m);
        book.add("density.mass", m.passed);
      }
      d["positivity"] = positivity_json(p);
      book.add("density.positivity", d["positivity"]["passed"].get<bool>());
      d["csv"] = "profile.csv";
      results["density"] = d;
      rep.csv.push_back({"profile.csv", profile_to_csv(p)});
    }

    if (wants(Task::certifyOrigin)) {
      stage = "certifyOrigin";
      if (nuclear_charge(model)) {
        const OriginCertificate c = origin_certificate(model, method, sc.mc);
        const RAlphaScan scan = r_alpha_min_scan(c);
        Json o = origin_json(c);
        o["scanAlpha"] = scan.alpha;
        o["scanMinimum"] = scan.value;
        results["origin"] = o;
        // Only ground states carry a theorem; diagnostic certificates are reported, not enforced.
        if (c.status == CertificateStatus::certified) book.add("origin.lowerBound", c.passed);
      } else if (sc.task == Task::certifyOrigin) {
        throw Error("certifyOrigin needs a nuclear charge (model.charge)");
      }
    }

    std::optional<DecayCertificate> decay;
    if (wants(Task::decay) || wants(Task::checkBounds)) {
      const auto& p = get_profile();
      const Window w = sc.window.value_or(default_window(p.grid));
      decay = sandwich_check(p, alpha0, N, w, sc.basis, energy_of(model), sc.epsilon);
    }
    if (wants(Task::decay)) {
      stage = "decay";
      const auto& p = get_profile();
      Json d = decay_json(*decay);
      d["csv"] = "envelopes.csv";
      book.add("decay.sandwich", decay->sandwich_passed);
      book.add("decay.shellSandwich", decay->shell_passed);
      if (decay->cap_passed) book.add("decay.thresholdCap", *decay->cap_passed);
      const Alpha0Estimate est = estimate_alpha0(model);
      d["alpha0Estimate"] = est.value;
      d["alpha0EstimateRays"] = est.rays;
      if (sc.hypersphere) {
        std::vector<double> rs = make_grid(sc.hyper_r1, sc.hyper_r2, sc.hyper_points), ls;
        Json pts = Json::array();
        for (std::size_t i = 0; i < rs.size(); ++i) {
          const Estimate e = hypersphere_average(model, rs[i], sc.mc, 31 + i);
          if (!(e.value > 0.0)) throw Error("hypersphere average vanished at R = " + format_double(rs[i]));
          ls.push_back(std::log(e.value));
          pts.push_back(Json{{"R", rs[i]}, {"value", e.value}, {"stdError", e.std_error}});
        }
        const DecayFit f = fit_log_samples(rs, ls, FitBasis::asymptotic);
        const bool ok = std::abs(f.slope + 2.0 * alpha0) <= sc.hyper_tolerance;
        d["hypersphere"] = Json{{"points", pts},
                                {"rate", f.slope},
                                {"expectedRate", -2.0 * alpha0},
                                {"tolerance", sc.hyper_tolerance},
                                {"passed", ok}};
        book.add("decay.hypersphere", ok);
      }
      results["decay"] = d;
      rep.csv.push_back({"envelopes.csv", envelope_csv(p, *decay)});
    }

    if (wants(Task::checkBounds)) {
      stage = "checkBounds";
      const auto& p = get_profile();
      Json b;
      const double la = sc.lower_alpha.value_or(alpha0 + 0.01);
      const GlobalLowerCheck g = global_lower_check(p, la, N, sc.lower_r0);
      b["globalLower"] = Json{{"alpha", g.alpha},
                              {"N", g.N},
                              {"r0", g.r0},
                              {"c", g.c},
                              {"tailSlope", g.tail_slope},
                              {"tolerance", g.tolerance},
                              {"passed", g.passed}};
      book.add("bounds.globalLower", g.passed);
      b["sandwich"] = Json{{"fittedRate", decay->fitted_rate},
                           {"tolerance", decay->tolerance},
                           {"lowerEnvRate", decay->lower_env_rate},
                           {"upperEnvRate", decay->upper_env_rate},
                           {"passed", decay->sandwich_passed}};
      book.add("bounds.sandwich", decay->sandwich_passed);
      const double lrmax = sc.lemma_rmax.value_or(p.grid.back());
      const ConstantScan a = lemmaA_constant(p, sc.lemma_rmin, lrmax);
      const ConstantScan c = lemmaC_constant(p, sc.lemma_rmin, lrmax);
      b["lemmaA"] = scan_json(a);
      b["lemmaC"] = scan_json(c);
      book.add("bounds.lemmaA", a.passed);
      book.add("bounds.lemmaC", c.passed);
      std::optional<double> eps = sc.epsilon;
      if (!eps && model.as<Hydrogenic>() && energy_of(model)) eps = -*energy_of(model);
      const auto z = nuclear_charge(model);
      if (eps && z) {
        const ClassicalEnvelope env = classical_upper_envelope(*z, N, *eps, sc.envelope_C.value_or(1.0), sc.envelope_r0);
        const auto grid = make_grid(std::max(sc.envelope_r0, p.grid.front()), p.grid.back(), std::min<int>(201, sc.grid.points));
        const EnvelopeCheck e = envelope_check(env, model, grid);
        Json ej{{"Z", env.Z},         {"N", env.N},        {"epsilon", env.epsilon}, {"C", env.C},
                {"r0", env.r0},       {"exponent", env.exponent()}, {"requiredC", number_or_null(e.required_C)},
                {"points", e.points}, {"enforced", sc.envelope_C.has_value()}, {"passed", e.passed}};
        b["classicalEnvelope"] = ej;
        if (sc.envelope_C) book.add("bounds.classicalEnvelope", e.passed);
      }
      b["positivity"] = positivity_json(p);
      book.add("bounds.positivity", b["positivity"]["passed"].get<bool>());
      results["bounds"] = b;
    }
  }

  if (wants(Task::radial)) {
    stage = "radial";
    run_radial(sc, results, book, rep.csv);
  }
  if (wants(Task::extend)) {
    stage = "extend";
    run_extend(sc, results, book, rep.csv);
  }
  stage = "report";

  Json echo = Json::object();
  for (const auto& [k, v] : sc.echo) echo[k] = v;
  rep.json["specVersion"] = report_spec_version;
  rep.json["tool"] = "rho-lab";
  rep.json["task"] = to_string(sc.task);
  rep.json["seed"] = sc.seed ? Json(*sc.seed) : Json(nullptr);
  rep.json["scenario"] = echo;
  rep.json["sampling"] = Json{{"samples", sc.mc.samples},
                              {"chains", sc.mc.chains},
                              {"proposal", to_string(sc.mc.proposal)},
                              {"stepSize", sc.mc.step_size},
                              {"burnIn", sc.mc.burn_in}};
  rep.json["results"] = results;
  rep.json["verdicts"] = book.verdicts;
  rep.json["allPassed"] = book.all;
  rep.exit_code = book.all ? 0 : 2;
  rep.json["exitCode"] = rep.exit_code;
  return rep;
}

}  // namespace detail

/**
 * Runs the scenario's task. Results depend only on the scenario and seed.
 * Operational errors propagate as exceptions; verdicts set exit_code 2.
 */
inline Report run(const Scenario& sc) {
  std::string stage = "setup";
  try {
    return detail::run_tasks(sc, stage);
  } catch (const std::exception& e) {
    throw Error("task " + stage + ": " + e.what());
  }
}

/// Serialized JSON text (2-space indent, trailing newline).
inline std::string report_json_text(const Report& rep) { return rep.json.dump(2) + "\n"; }

/// Writes report.json and the CSV files under dir with the given name prefix.
inline std::vector<std::string> emit(const Report& rep, const std::string& dir, const std::set<std::string>& formats,
                                     const std::string& prefix = "") {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& content) {
    const fs::path path = fs::path(dir) / (prefix + name);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error("write failed for '" + path.string() + "'");
    written.push_back(path.string());
  };
  if (formats.count("json")) write("report.json", report_json_text(rep));
  if (formats.count("csv"))
    for (const auto& f : rep.csv) write(f.name, f.content);
  return written;
}

// ---------------------------------------------------------------------------
// Verdict soundness
// ---------------------------------------------------------------------------

/**
 * Recomputes every verdict of a serialized report from its stored numbers.
 * Returns the names whose recomputed value differs (empty when sound).
 */
inline std::vector<std::string> recompute_verdicts(const Json& report) {
  std::vector<std::string> bad;
  const Json& res = report.at("results");
  const Json& verdicts = report.at("verdicts");
  auto check = [&](const std::string& name, bool recomputed, const Json* stored_passed) {
    if (stored_passed && stored_passed->get<bool>() != recomputed) bad.push_back(name + " (passed field)");
    if (verdicts.contains(name) && verdicts.at(name).get<bool>() != recomputed) bad.push_back(name);
  };
  auto finite = [](const Json& v) { return v.is_number(); };
  if (res.contains("density")) {
    const Json& d = res.at("density");
    if (d.contains("mass")) {
      const Json& m = d.at("mass");
      const bool ok = std::abs(m.at("integral").get<double>() - m.at("expected").get<double>()) <= m.at("tolerance").get<double>();
      check("density.mass", ok, &m.at("passed"));
    }
    const Json& p = d.at("positivity");
    check("density.positivity", p.at("nonpositivePoints").get<std::size_t>() == 0 && p.at("minValue").get<double>() > 0.0,
          &p.at("passed"));
  }
  if (res.contains("origin")) {
    const Json& o = res.at("origin");
    const bool ok = o.at("rho0").get<double>() >= o.at("lowerBound").get<double>();
    check("origin.lowerBound", ok, &o.at("passed"));
    const double lb = 2.0 * std::pow(o.at("Psq").get<double>(), 2) /
                      (3.0 * pi * o.at("Z").get<double>() * o.at("N").get<double>() * o.at("normSq").get<double>());
    if (std::abs(lb - o.at("lowerBound").get<double>()) > 1e-12 * std::max(1.0, std::abs(lb)))
      bad.push_back("origin.lowerBound (formula)");
  }
  if (res.contains("decay")) {
    const Json& d = res.at("decay");
    const double f = d.at("fittedRate"), tol = d.at("tolerance"), lo = d.at("lowerEnvRate"), up = d.at("upperEnvRate");
    check("decay.sandwich", lo - tol <= f && f <= up + tol, &d.at("sandwichPassed"));
    const double s = d.at("shellRate"), stol = d.at("shellTolerance");
    check("decay.shellSandwich", lo - stol <= s && s <= up + stol, &d.at("shellPassed"));
    if (!d.at("capPassed").is_null()) {
      const double cap = d.at("thresholdCap");
      check("decay.thresholdCap", d.at("alpha0").get<double>() <= cap * (1.0 + 1e-12), &d.at("capPassed"));
    }
    if (d.contains("hypersphere")) {
      const Json& h = d.at("hypersphere");
      const bool ok = std::abs(h.at("rate").get<double>() - h.at("expectedRate").get<double>()) <= h.at("tolerance").get<double>();
      check("decay.hypersphere", ok, &h.at("passed"));
    }
  }
  if (res.contains("bounds")) {
    const Json& b = res.at("bounds");
    const Json& g = b.at("globalLower");
    check("bounds.globalLower", g.at("c").get<double>() > 0.0 && g.at("tailSlope").get<double>() >= -g.at("tolerance").get<double>(),
          &g.at("passed"));
    const Json& sw = b.at("sandwich");
    {
      const double f = sw.at("fittedRate"), tol = sw.at("tolerance");
      check("bounds.sandwich", sw.at("lowerEnvRate").get<double>() - tol <= f && f <= sw.at("upperEnvRate").get<double>() + tol,
            &sw.at("passed"));
    }
    check("bounds.lemmaA", finite(b.at("lemmaA").at("constant")), &b.at("lemmaA").at("passed"));
    check("bounds.lemmaC", finite(b.at("lemmaC").at("constant")), &b.at("lemmaC").at("passed"));
    if (b.contains("classicalEnvelope")) {
      const Json& e = b.at("classicalEnvelope");
      const bool ok = finite(e.at("requiredC")) && e.at("requiredC").get<double>() <= e.at("C").get<double>();
      check("bounds.classicalEnvelope", ok, &e.at("passed"));
    }
    const Json& p = b.at("positivity");
    check("bounds.positivity", p.at("nonpositivePoints").get<std::size_t>() == 0, &p.at("passed"));
  }
  if (res.contains("radial")) {
    bool mp = true, ode = true;
    for (const Json& r : res.at("radial")) {
      const bool m = r.at("maxPrinciple").at("maxExcess").get<double>() <= 1e-12;
      const bool o = r.at("ode").at("skipped").get<bool>() || r.at("ode").at("maxDeviation").get<double>() < 1e-8;
      check("radial.entry", m, &r.at("maxPrinciple").at("passed"));
      check("radial.entry", o, &r.at("ode").at("passed"));
      mp = mp && m;
      ode = ode && o;
    }
    check("radial.maxPrinciple", mp, nullptr);
    check("radial.odeCrossCheck", ode, nullptr);
  }
  if (res.contains("extend")) {
    const Json& e = res.at("extend");
    const Json& rt = e.at("roundtrip");
    check("extend.roundtrip", rt.at("relativeError").get<double>() < rt.at("tolerance").get<double>(), &rt.at("passed"));
    const Json& sn = e.at("shellNorm");
    const bool shell_ok = sn.at("lhs").get<double>() <= sn.at("rhs").get<double>();
    check("extend.shellNorm.bound", shell_ok, &sn.at("passed"));
    const bool sharp = sn.at("constant").get<double>() <= sn.at("sharpConstant").get<double>() + 1e-6;
    check("extend.shellNorm", shell_ok && sharp, &sn.at("sharpPassed"));
    if (sn.at("sharpPassed").get<bool>() != sharp) bad.push_back("extend.shellNorm (sharp)");
    const Json& h = e.at("harmonic");
    const double ratio = h.at("ratio");
    check("extend.harmonic", ratio >= 3.2 && ratio <= 4.8, &h.at("passed"));
    bool trace = true;
    for (const Json& t : e.at("trace")) {
      const bool ok = t.at("lhs").get<double>() <= t.at("rhs").get<double>();
      if (t.at("passed").get<bool>() != ok) bad.push_back("extend.trace (entry)");
      trace = trace && ok;
    }
    check("extend.trace", trace, nullptr);
  }
  bool all = true;
  for (const auto& [k, v] : verdicts.items()) all = all && v.get<bool>();
  if (report.at("allPassed").get<bool>() != all) bad.push_back("allPassed");
  if (report.at("exitCode").get<int>() != (all ? 0 : 2)) bad.push_back("exitCode");
  return bad;
}

}  // namespace rholab
