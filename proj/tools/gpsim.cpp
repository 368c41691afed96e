// Command-line front end: point driver, scenarios, config validation, sweeps.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "gradplast/point_driver.hpp"
#include "gradplast/scenarios.hpp"

using namespace gradplast;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kNonConvergence = 3 };

struct Common {
  std::string config;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 1;
};

void print_report(const ScenarioReport& rep) {
  for (const CheckResult& c : rep.checks)
    std::printf("%s %s.%s: %s\n", c.passed ? "PASS" : "FAIL", rep.name.c_str(), c.name.c_str(),
                c.detail.c_str());
  if (!rep.table.empty()) {
    for (std::size_t i = 0; i < rep.table_columns.size(); ++i)
      std::printf("%s%s", i ? "\t" : "", rep.table_columns[i].c_str());
    std::printf("\n");
    for (const auto& row : rep.table) {
      for (std::size_t i = 0; i < row.size(); ++i) std::printf("%s%.6g", i ? "\t" : "", row[i]);
      std::printf("\n");
    }
  }
  for (const std::string& f : rep.files) std::printf("wrote %s\n", f.c_str());
}

/// Scenario name and configuration from --scenario and/or --config.
std::pair<std::string, ProblemDocument> resolve(std::string scenario, const Common& c) {
  std::string text;
  if (!c.config.empty()) {
    text = read_config_file(c.config);
    const std::string named = peek_scenario(text);
    if (!named.empty() && !scenario.empty() && named != scenario)
      throw ConfigError("config names scenario '" + named + "' but '" + scenario + "' was requested");
    if (scenario.empty()) scenario = named;
  }
  if (scenario.empty()) throw ConfigError("no scenario: pass --scenario or set 'scenario' in the config");
  ProblemDocument doc = c.config.empty() ? ProblemDocument{scenario, scenario_config(scenario), 0}
                                         : parse_problem(text, scenario_config(scenario));
  if (c.threads > 0) doc.config.threads = c.threads;
  doc.config.validate();
  return {scenario, doc};
}

int guarded(const std::function<int()>& fn) {
  try {
    return fn();
  } catch (const ConfigInvalid& e) {
    for (const auto& d : e.diagnostics()) std::fprintf(stderr, "config error: %s\n", d.to_string().c_str());
    return kConfigError;
  } catch (const OuterNonConvergence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNonConvergence;
  } catch (const NonConvergence& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNonConvergence;
  } catch (const IllPosedSpin& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNonConvergence;
  }
}

void add_common(CLI::App* app, Common& c, bool with_seed) {
  app->add_option("--config", c.config, "YAML configuration file");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--threads", c.threads, "worker threads (default: from config, else 1)")
      ->check(CLI::PositiveNumber);
  if (with_seed) app->add_option("--seed", c.seed, "seed for random perturbations");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient plasticity with plastic spin: simulations and checks"};
  app.require_subcommand(1);

  Common common;
  std::string scenario, param;
  std::vector<double> values;

  auto* list = app.add_subcommand("list", "list built-in scenarios");

  auto* point = app.add_subcommand("point", "single material point under a strain history");
  add_common(point, common, false);
  point->get_option("--config")->required();

  auto* run = app.add_subcommand("run", "run a scenario and evaluate its checks");
  run->add_option("--scenario", scenario, "scenario name");
  add_common(run, common, true);

  auto* validate = app.add_subcommand("validate", "check a configuration file");
  validate->add_option("--config", common.config, "YAML configuration file")->required();

  auto* sweep = app.add_subcommand("sweep", "run a scenario over values of one parameter");
  sweep->add_option("--scenario", scenario, "scenario name");
  sweep->add_option("--param", param, "Lc, alpha1, alpha2, rho, sigma0, sigma_hat0, r1, r2, dt, n_steps")
      ->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  add_common(sweep, common, true);

  CLI11_PARSE(app, argc, argv);

  if (*list) {
    for (const auto& n : scenario_names()) std::printf("%s\n", n.c_str());
    return kOk;
  }

  if (*validate) {
    const auto diag = validate_config_file(common.config);
    for (const auto& d : diag) std::printf("%s\n", d.to_string().c_str());
    if (diag.empty()) std::printf("ok\n");
    return diag.empty() ? kOk : kConfigError;
  }

  if (*point) {
    return guarded([&] {
      const PointProgram prog = load_point(common.config);
      const auto rows = run_point_driver(prog);
      if (common.out.empty()) {
        write_point_csv(std::cout, rows);
      } else {
        std::filesystem::create_directories(common.out);
        const std::string path = (std::filesystem::path(common.out) / "point.csv").string();
        std::ofstream os(path);
        write_point_csv(os, rows);
        std::printf("wrote %s\n", path.c_str());
      }
      return kOk;
    });
  }

  if (*run) {
    return guarded([&] {
      const auto [name, doc] = resolve(scenario, common);
      RunOptions opts{common.out, common.seed, doc.snapshot_every};
      const ScenarioReport rep = run_scenario(name, doc.config, opts);
      print_report(rep);
      return rep.passed() ? kOk : kCheckFailed;
    });
  }

  return guarded([&] {
    const auto [name, doc] = resolve(scenario, common);
    bool all = true;
    for (double v : values) {
      ProblemConfig cfg = doc.config;
      set_parameter(cfg, param, v);
      cfg.validate();
      char label[64];
      std::snprintf(label, sizeof label, "%s=%g", param.c_str(), v);
      RunOptions opts{common.out.empty() ? "" : (std::filesystem::path(common.out) / label).string(),
                      common.seed, doc.snapshot_every};
      std::printf("== %s\n", label);
      const ScenarioReport rep = run_scenario(name, cfg, opts);
      print_report(rep);
      all = all && rep.passed();
    }
    return all ? kOk : kCheckFailed;
  });
}
