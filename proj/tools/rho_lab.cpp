// Copyright 2026 The rho-lab Authors
// SPDX-License-Identifier: Apache-2.0

// rho-lab <task> --config <file> [--seed N] [--out DIR] [--format csv,json]
//
// Exit codes: 0 all verdicts pass, 2 a bound check failed, 1 operational error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "rholab/rholab.hpp"

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + rholab::format_double(v[i]);
  return out;
}

void set_echo(rholab::Scenario& sc, const std::string& key, const std::string& value) {
  for (auto& [k, v] : sc.echo)
    if (k == key) {
      v = value;
      return;
    }
  sc.echo.emplace_back(key, value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rho-lab: spherically averaged electron densities and their decay bounds"};
  std::string task_name, config, out_dir, formats;
  std::optional<std::uint64_t> seed;
  std::vector<int> ls;
  std::vector<double> kappas, radii;
  std::optional<int> lmax;
  std::optional<double> extend_R;
  std::string mode;
  bool quiet = false;

  app.add_option("task", task_name, "density | certifyOrigin | decay | radial | extend | checkBounds | all")
      ->required();
  app.add_option("--config,-c", config, "scenario file (key = value lines)");
  app.add_option("--seed", seed, "Monte Carlo seed (overrides the scenario)");
  app.add_option("--out,-o", out_dir, "output directory");
  app.add_option("--format", formats, "comma list of csv,json");
  app.add_option("--l", ls, "radial: angular momenta")->delimiter(',');
  app.add_option("--kappa", kappas, "radial: decay constants")->delimiter(',');
  app.add_option("--R", radii, "radial: inner radii; extend: first value is the sphere radius")->delimiter(',');
  app.add_option("--lmax", lmax, "extend: boundary band limit");
  app.add_option("--mode", mode, "extend: random | single");
  app.add_flag("--quiet,-q", quiet, "suppress the summary on stdout");
  CLI11_PARSE(app, argc, argv);

  const auto task = rholab::task_from_string(task_name);
  if (!task) {
    std::cerr << "rho-lab: unknown task '" << task_name << "'\n";
    return 1;
  }
  try {
    rholab::ScenarioOverrides ov{task, seed};
    rholab::Scenario sc;
    if (!config.empty()) {
      sc = rholab::load_scenario(config, ov);
    } else if (*task == rholab::Task::radial || *task == rholab::Task::extend) {
      sc = rholab::parse_scenario("", ov);
    } else {
      std::cerr << "rho-lab: task " << task_name << " needs --config\n";
      return 1;
    }
    if (!ls.empty()) {
      for (int l : ls)
        if (l < 0 || l > rholab::radial_max_l) throw rholab::DomainError("--l entries must lie in [0, 64]");
      sc.radial_l = ls;
      set_echo(sc, "radial.l", join(std::vector<double>(ls.begin(), ls.end())));
    }
    if (!kappas.empty()) {
      for (double k : kappas)
        if (!(k >= 0.0 && k <= rholab::radial_max_kappa)) throw rholab::DomainError("--kappa must lie in [0, 1e3]");
      sc.radial_kappa = kappas;
      set_echo(sc, "radial.kappa", join(kappas));
    }
    if (!radii.empty()) {
      for (double r : radii)
        if (!(r > 0.0)) throw rholab::DomainError("--R must be > 0");
      sc.radial_R = radii;
      sc.extend_R = radii.front();
      set_echo(sc, "radial.R", join(radii));
      set_echo(sc, "extend.R", rholab::format_double(radii.front()));
    }
    if (lmax) {
      if (*lmax < 0 || *lmax > 32) throw rholab::DomainError("--lmax must lie in [0, 32]");
      sc.extend_lmax = *lmax;
      set_echo(sc, "extend.lmax", std::to_string(*lmax));
    }
    if (!mode.empty()) {
      if (mode != "random" && mode != "single") throw rholab::DomainError("--mode must be random or single");
      sc.extend_mode = mode;
      set_echo(sc, "extend.mode", mode);
    }
    if (!formats.empty()) {
      sc.formats.clear();
      for (const auto& f : rholab::detail::split(formats, ',')) {
        if (f != "csv" && f != "json") throw rholab::DomainError("--format accepts csv and json");
        sc.formats.insert(f);
      }
    }
    if (!out_dir.empty()) sc.output_dir = out_dir;

    const auto t0 = std::chrono::steady_clock::now();
    rholab::Report rep = rholab::run(sc);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto files = rholab::emit(rep, sc.output_dir, sc.formats, sc.output_prefix);

    if (!quiet) {
      for (const auto& [name, passed] : rep.json["verdicts"].items())
        std::cout << (passed.get<bool>() ? "PASS " : "FAIL ") << name << "\n";
      for (const auto& f : files) std::cout << "wrote " << f << "\n";
    }
    std::fprintf(stderr, "rho-lab: %s finished in %.3f s, exit %d\n", task_name.c_str(), rep.wall_seconds,
                 rep.exit_code);
    return rep.exit_code;
  } catch (const rholab::ParseError& e) {
    std::cerr << "rho-lab: " << config << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "rho-lab: " << task_name << ": " << e.what() << "\n";
    return 1;
  }
}
