// leocox: downlink performance of multi-constellation LEO networks modelled
// as superposed Cox point processes.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "leocox/config.hpp"
#include "leocox/runner.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string engine;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<double> tol;
};

void add_run_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "Config file (INI; see configs/example.ini)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--engine", o.engine, "analytic | montecarlo | both")
      ->check(CLI::IsMember({"analytic", "montecarlo", "both"}));
  sub->add_option("--trials", o.trials, "Monte Carlo trials per point");
  sub->add_option("--seed", o.seed, "Monte Carlo seed");
  sub->add_option("--out", o.out, "CSV output path (default: standard output)");
  sub->add_option("--tol", o.tol, "Relative quadrature tolerance")->check(CLI::PositiveNumber);
}

int execute(leocox::cli::Mode mode, const Overrides& o) {
  using namespace leocox::cli;
  RunConfig cfg;
  try {
    cfg = load_config(o.config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  cfg.mode = mode;
  if (!o.engine.empty()) cfg.engine = *parse_engine(o.engine);
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) cfg.seed = *o.seed;
  if (o.tol) cfg.tolerances.rel_tol = *o.tol;
  if (!o.out.empty()) cfg.output = o.out;

  try {
    if (cfg.output.empty()) return run(cfg, std::cout, std::cerr);
    std::ofstream file(cfg.output);
    if (!file) {
      std::cerr << "error: cannot write " << cfg.output << "\n";
      return 1;
    }
    const int code = run(cfg, file, std::cerr);
    file.close();
    if (!file) {
      std::cerr << "error: failed writing " << cfg.output << "\n";
      return 1;
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int validate(const std::string& path) {
  using namespace leocox::cli;
  try {
    const auto cfg = load_config(path);
    std::cout << describe(cfg);
    auto errors = check(cfg);
    if (!cfg.mode) std::erase_if(errors, [](const std::string& e) { return e.rfind("no mode", 0) == 0; });
    for (const auto& e : errors) std::cout << "error: " << e << "\n";
    if (!errors.empty()) return kExitConfig;
    std::cout << "ok\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cout << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using leocox::cli::Mode;
  CLI::App app{
      "Downlink coverage, association and no-satellite probabilities of heterogeneous LEO "
      "constellations modelled as Cox point processes.\n"
      "Units: SINR thresholds and gains in dB, lengths in km, powers in W."};
  app.footer(
      "Environment: LEOCOX_WORKERS sets the worker thread count (default: hardware "
      "concurrency).\nExit codes: 0 ok, 1 runtime error, 2 config error, 3 analytic/Monte Carlo "
      "disagreement beyond 5 standard errors (engine both).");
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    Mode mode;
    const char* help;
  };
  const Sub subs[] = {
      {"coverage-closed", Mode::coverage_closed, "SINR coverage of the serving type, closed access"},
      {"coverage-open", Mode::coverage_open, "SINR coverage, open access (nearest of any type)"},
      {"association", Mode::association, "Probability of association with each type"},
      {"no-satellite", Mode::no_satellite, "No-satellite probability per type and open access"},
      {"ergodic", Mode::ergodic, "Ergodic capacity in bits per channel use"},
      {"simulate", Mode::simulate, "Monte Carlo coverage for every access mode"},
      {"fit", Mode::fit, "Moment-match Cox parameters to Walker shells"},
      {"compare", Mode::compare, "Coverage of Walker shells against the fitted Cox model"},
  };
  Overrides overrides;
  std::optional<Mode> chosen;
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_run_options(sub, overrides);
    sub->callback([&chosen, m = s.mode] { chosen = m; });
  }
  std::string validate_path;
  auto* val = app.add_subcommand("validate", "Check a config file and echo the resolved model");
  val->add_option("config", validate_path, "Config file")->required();

  CLI11_PARSE(app, argc, argv);
  if (val->parsed()) return validate(validate_path);
  return execute(*chosen, overrides);
}
