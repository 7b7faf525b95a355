// SPDX-License-Identifier: Apache-2.0
// lt_optim: command-line front end for the fixed-point optimizer.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 bump separation (solve mode).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltopt/ltopt.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

bool is_config_error(lt_status s) {
  return s == LT_INVALID_PARAMETER || s == LT_MISMATCHED_GRID || s == LT_FORBIDDEN_COMBINATION || s == LT_IO_ERROR;
}

int report(lt_status s) {
  std::cerr << "lt_optim: " << lt_status_name(s) << ": " << lt_last_error() << '\n';
  return is_config_error(s) ? kExitConfig : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point search for Lieb-Thirring optimizers"};

  std::string config_path;
  std::optional<std::string> mode, out, seed_snapshot, density;
  std::optional<int> d, N, max_iters, workers;
  std::optional<double> gamma, gamma_min, gamma_max, gamma_step, L, grading, tol, seed_width, seed_amplitude;
  bool dry_run = false;

  app.add_option("--config", config_path, "JSON config file; flags override its entries")->check(CLI::ExistingFile);
  app.add_option("--mode", mode, "solve | branch | envelope | convergence_study | separation_study");
  app.add_option("--d", d, "space dimension");
  app.add_option("--gamma", gamma, "exponent gamma (solve, separation_study)");
  app.add_option("--gamma-min", gamma_min, "start of the gamma range (branch, envelope)");
  app.add_option("--gamma-max", gamma_max, "end of the gamma range (branch, envelope)");
  app.add_option("--gamma-step", gamma_step, "continuation step, at most 0.05");
  app.add_option("--N", N, "number of elements");
  app.add_option("--L", L, "domain size: [0, L] radially, [-L, L] in one dimension");
  app.add_option("--grading", grading, "radial grading exponent s in r_i = L (i/N)^s");
  app.add_option("--tol", tol, "fixed-point tolerance on sup |V_{n+1} - V_n|");
  app.add_option("--max-iters", max_iters, "iteration cap per solve");
  app.add_option("--seed-width", seed_width, "Gaussian seed width");
  app.add_option("--seed-amplitude", seed_amplitude, "Gaussian seed amplitude");
  app.add_option("--seed-snapshot", seed_snapshot, "start from a saved potential instead of a Gaussian");
  app.add_option("--density", density, "projected | nodal");
  app.add_option("--workers", workers, "parallel channel or branch jobs (capped by LT_OPTIM_WORKERS)");
  app.add_option("--out", out, "output directory");
  app.add_flag("--check", dry_run, "validate the configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  nlohmann::json config = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    try {
      config = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "lt_optim: cannot parse " << config_path << ": " << e.what() << '\n';
      return kExitConfig;
    }
    if (!config.is_object()) {
      std::cerr << "lt_optim: " << config_path << " must hold a JSON object\n";
      return kExitConfig;
    }
  }
  auto set = [&](const char* key, const auto& value) {
    if (value) config[key] = *value;
  };
  set("mode", mode);
  set("d", d);
  set("gamma", gamma);
  set("gamma_min", gamma_min);
  set("gamma_max", gamma_max);
  set("gamma_step", gamma_step);
  set("N", N);
  set("L", L);
  set("grading", grading);
  set("tol", tol);
  set("max_iters", max_iters);
  set("density", density);
  set("workers", workers);
  set("out", out);
  if (seed_width) config["seed"]["width"] = *seed_width;
  if (seed_amplitude) config["seed"]["amplitude"] = *seed_amplitude;
  if (seed_snapshot) config["seed"]["snapshot"] = *seed_snapshot;

  const std::string text = config.dump();
  if (const lt_status s = lt_check_config(text.c_str()); s != LT_OK) return report(s);
  if (dry_run) return 0;

  char* summary = nullptr;
  int exit_status = 0;
  if (const lt_status s = lt_run_config(text.c_str(), &summary, &exit_status); s != LT_OK) return report(s);
  std::cout << summary << '\n';
  lt_string_free(summary);
  return exit_status;
}
