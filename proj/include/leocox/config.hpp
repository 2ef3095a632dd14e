#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "leocox/constellation.hpp"
#include "leocox/model.hpp"
#include "leocox/quadrature.hpp"

namespace leocox::cli {

enum class Mode {
  coverage_closed,
  coverage_open,
  association,
  no_satellite,
  ergodic,
  simulate,
  fit,
  compare
};

enum class Engine { analytic, montecarlo, both };

const char* to_string(Mode m);
const char* to_string(Engine e);
std::optional<Mode> parse_mode(const std::string& s);
std::optional<Engine> parse_engine(const std::string& s);

/// Parse failure; `line` is 0 when the error is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

struct Sweep {
  std::string parameter;  ///< types, lambda.k, mu.k, altitude_km.k, gain_db.k, tx_power_w.k, alpha, noise_w
  std::vector<double> values;
};

/// Walker shells standing behind one constellation type (fit and compare
/// modes).
struct ShellGroup {
  std::vector<std::string> names;
  int reuse = 1;
  std::optional<double> fit_value;
};

struct RunConfig {
  std::optional<Mode> mode;
  std::vector<ConstellationSpec> constellations;  ///< as written, before `types`
  std::size_t types = 0;                          ///< resolved type count
  PropagationConfig propagation;
  std::optional<Sweep> sweep;
  Engine engine = Engine::analytic;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  quad::Settings tolerances;
  std::string output;  ///< empty means standard output
  std::size_t serving_type = 0;  ///< zero-based
  std::vector<double> tau_db;
  bool power_association = false;

  std::vector<ShellGroup> shells;  ///< per type, possibly empty
  std::string shell_table;         ///< resolved relative to the config file
  std::vector<double> latitudes_deg{0.0};
  std::size_t rotations = 20000;
  constellation::FitStrategy::Kind fit_strategy = constellation::FitStrategy::Kind::fix_mu;

  /// "section.key = value" lines for every setting that took its default.
  std::vector<std::string> defaulted;

  /// Model with `types` applied: extra types copy the last written one.
  NetworkModel model() const;
  NetworkModel model_with(const std::string& parameter, double value) const;
};

RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Checks cross-field invariants; returns error messages (empty when valid).
std::vector<std::string> check(const RunConfig& cfg);

/// Human-readable echo of the resolved configuration, units included and
/// defaulted values flagged.
std::string describe(const RunConfig& cfg);

}  // namespace leocox::cli
