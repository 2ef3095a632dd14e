#include "leocox/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace leocox::cli {

namespace {

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '#' || s[i] == ';') && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
      return s.substr(0, i);
    }
  }
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, sep);) out.push_back(trim(cell));
  return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"network", {"types"}},
      {"propagation", {"alpha", "noise_w", "noise_dbm", "nakagami_m"}},
      {"constellation",
       {"lambda", "mu", "altitude_km", "radius_km", "tx_power_w", "gain_db", "shells", "reuse",
        "fit_value"}},
      {"run",
       {"mode", "engine", "serving_type", "tau_db", "sweep", "sweep_values", "trials", "seed",
        "rel_tol", "abs_tol", "max_depth", "output", "association", "shell_table", "latitude_deg",
        "rotations", "fit_strategy"}},
  };
  return keys;
}

bool sweepable(const std::string& p) {
  static const std::set<std::string> plain = {"types", "alpha", "noise_w"};
  static const std::set<std::string> indexed = {"lambda", "mu", "altitude_km", "radius_km",
                                                "gain_db", "tx_power_w"};
  if (plain.count(p)) return true;
  const auto dot = p.find('.');
  if (dot == std::string::npos || !indexed.count(p.substr(0, dot))) return false;
  const auto idx = p.substr(dot + 1);
  return !idx.empty() && std::all_of(idx.begin(), idx.end(), ::isdigit) && std::stoul(idx) >= 1;
}

class Reader {
 public:
  Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source_, line, msg);
  }

  double number(const Entry& e, const std::string& key) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos == e.value.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    fail(e.line, key + ": expected a number, got '" + e.value + "'");
  }

  std::uint64_t count(const Entry& e, const std::string& key) const {
    const double v = number(e, key);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19) {
      fail(e.line, key + ": expected a non-negative integer, got '" + e.value + "'");
    }
    return static_cast<std::uint64_t>(v);
  }

  std::vector<double> list(const Entry& e, const std::string& key) const {
    std::vector<double> out;
    if (e.value.find(':') != std::string::npos) {
      const auto parts = split(e.value, ':');
      if (parts.size() != 3) fail(e.line, key + ": range must be start:stop:step");
      const double a = number({parts[0], e.line}, key), b = number({parts[1], e.line}, key),
                   step = number({parts[2], e.line}, key);
      if (!(step > 0.0) || b < a) fail(e.line, key + ": range needs step > 0 and stop >= start");
      const auto n = static_cast<std::size_t>(std::floor((b - a) / step + 1e-9));
      for (std::size_t i = 0; i <= n; ++i) out.push_back(a + step * i);
      return out;
    }
    for (const auto& p : split(e.value, ',')) out.push_back(number({p, e.line}, key));
    if (out.empty()) fail(e.line, key + ": empty list");
    return out;
  }

 private:
  std::string source_;
};

}  // namespace

const char* to_string(Mode m) {
  switch (m) {
    case Mode::coverage_closed: return "coverage-closed";
    case Mode::coverage_open: return "coverage-open";
    case Mode::association: return "association";
    case Mode::no_satellite: return "no-satellite";
    case Mode::ergodic: return "ergodic";
    case Mode::simulate: return "simulate";
    case Mode::fit: return "fit";
    case Mode::compare: return "compare";
  }
  return "?";
}

const char* to_string(Engine e) {
  switch (e) {
    case Engine::analytic: return "analytic";
    case Engine::montecarlo: return "montecarlo";
    case Engine::both: return "both";
  }
  return "?";
}

std::optional<Mode> parse_mode(const std::string& s) {
  for (auto m : {Mode::coverage_closed, Mode::coverage_open, Mode::association, Mode::no_satellite,
                 Mode::ergodic, Mode::simulate, Mode::fit, Mode::compare}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

std::optional<Engine> parse_engine(const std::string& s) {
  for (auto e : {Engine::analytic, Engine::montecarlo, Engine::both}) {
    if (s == to_string(e)) return e;
  }
  return std::nullopt;
}

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) + ": " + msg
                                  : source + ": " + msg),
      line_(line) {}

RunConfig parse_config(std::istream& in, const std::string& source) {
  Reader rd(source);
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::string current, raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') rd.fail(line_no, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      const auto base = current.substr(0, current.find('.'));
      if (!known_keys().count(base)) rd.fail(line_no, "unknown section [" + current + "]");
      if (base == "constellation") {
        const auto idx = current.size() > 14 ? current.substr(14) : "";
        if (current.size() < 15 || current[13] != '.' || idx.empty() ||
            !std::all_of(idx.begin(), idx.end(), ::isdigit) || std::stoul(idx) < 1) {
          rd.fail(line_no, "constellation sections are named [constellation.k], k >= 1");
        }
        current = "constellation." + std::to_string(std::stoul(idx));
      } else if (current != base) {
        rd.fail(line_no, "unknown section [" + current + "]");
      }
      if (section_line.count(current)) rd.fail(line_no, "duplicate section [" + current + "]");
      section_line[current] = line_no;
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) rd.fail(line_no, "expected key = value");
    if (current.empty()) rd.fail(line_no, "key outside of any section");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto base = current.substr(0, current.find('.'));
    if (!known_keys().at(base).count(key)) {
      rd.fail(line_no, "unknown key '" + key + "' in [" + current + "]");
    }
    if (value.empty()) rd.fail(line_no, "empty value for '" + key + "'");
    auto& sec = sections[current];
    if (sec.count(key)) rd.fail(line_no, "duplicate key '" + key + "'");
    sec[key] = {value, line_no};
  }

  RunConfig cfg;
  const auto get = [&](const std::string& sec, const std::string& key) -> const Entry* {
    const auto s = sections.find(sec);
    if (s == sections.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };
  const auto defaulted = [&](const std::string& sec, const std::string& key,
                             const std::string& value) {
    cfg.defaulted.push_back(sec + "." + key + " = " + value);
  };

  // constellations
  std::size_t K = 0;
  for (const auto& [name, _] : sections) {
    if (name.rfind("constellation.", 0) == 0) K = std::max<std::size_t>(K, std::stoul(name.substr(14)));
  }
  for (std::size_t k = 1; k <= K; ++k) {
    const auto sec = "constellation." + std::to_string(k);
    if (!sections.count(sec)) rd.fail(0, "constellation sections must be numbered 1.." + std::to_string(K) + ", [" + sec + "] is missing");
    ConstellationSpec spec;
    ShellGroup group;
    if (const auto* e = get(sec, "shells")) {
      group.names = split(e->value, ',');
      if (std::any_of(group.names.begin(), group.names.end(), [](auto& n) { return n.empty(); })) {
        rd.fail(e->line, "shells: empty shell name");
      }
    }
    const bool from_shells = !group.names.empty();
    if (const auto* e = get(sec, "lambda")) {
      spec.lambda = rd.number(*e, "lambda");
    } else if (!from_shells) {
      rd.fail(section_line[sec], "[" + sec + "] needs lambda");
    }
    if (const auto* e = get(sec, "mu")) {
      spec.mu = rd.number(*e, "mu");
    } else if (!from_shells) {
      rd.fail(section_line[sec], "[" + sec + "] needs mu");
    }
    const auto* alt = get(sec, "altitude_km");
    const auto* rad = get(sec, "radius_km");
    if (alt && rad) rd.fail(rad->line, "give altitude_km or radius_km, not both");
    if (alt) spec.radius_km = kEarthRadiusKm + rd.number(*alt, "altitude_km");
    if (rad) spec.radius_km = rd.number(*rad, "radius_km");
    if (!alt && !rad && !from_shells) rd.fail(section_line[sec], "[" + sec + "] needs altitude_km or radius_km");
    if (const auto* e = get(sec, "tx_power_w")) {
      spec.tx_power_w = rd.number(*e, "tx_power_w");
    } else {
      defaulted(sec, "tx_power_w", "1");
    }
    if (const auto* e = get(sec, "gain_db")) {
      spec.gain = db_to_linear(rd.number(*e, "gain_db"));
    } else {
      defaulted(sec, "gain_db", "0");
    }
    if (const auto* e = get(sec, "reuse")) {
      const auto r = rd.count(*e, "reuse");
      if (r < 1) rd.fail(e->line, "reuse must be >= 1");
      group.reuse = static_cast<int>(r);
    }
    if (const auto* e = get(sec, "fit_value")) group.fit_value = rd.number(*e, "fit_value");
    cfg.constellations.push_back(spec);
    cfg.shells.push_back(group);
  }

  // network
  if (const auto* e = get("network", "types")) {
    cfg.types = rd.count(*e, "types");
    if (cfg.types < 1) rd.fail(e->line, "types must be >= 1");
    if (K == 0) rd.fail(e->line, "types needs at least one [constellation.k] section");
  } else {
    cfg.types = K;
    defaulted("network", "types", std::to_string(K) + " (number of constellation sections)");
  }

  // propagation
  if (const auto* e = get("propagation", "alpha")) {
    cfg.propagation.alpha = rd.number(*e, "alpha");
  } else {
    defaulted("propagation", "alpha", "3");
  }
  const auto* nw = get("propagation", "noise_w");
  const auto* nd = get("propagation", "noise_dbm");
  if (nw && nd) rd.fail(nd->line, "give noise_w or noise_dbm, not both");
  if (nw) {
    cfg.propagation.noise_w = rd.number(*nw, "noise_w");
  } else if (nd) {
    cfg.propagation.noise_w = db_to_linear(rd.number(*nd, "noise_dbm") - 30.0);
  } else {
    defaulted("propagation", "noise_w", "0");
  }
  if (const auto* e = get("propagation", "nakagami_m")) {
    cfg.propagation.nakagami_m = static_cast<int>(rd.count(*e, "nakagami_m"));
  } else {
    defaulted("propagation", "nakagami_m", "1");
  }

  // run
  if (const auto* e = get("run", "mode")) {
    cfg.mode = parse_mode(e->value);
    if (!cfg.mode) rd.fail(e->line, "unknown mode '" + e->value + "'");
  }
  if (const auto* e = get("run", "engine")) {
    const auto eng = parse_engine(e->value);
    if (!eng) rd.fail(e->line, "engine must be analytic, montecarlo or both");
    cfg.engine = *eng;
  } else {
    defaulted("run", "engine", "analytic");
  }
  if (const auto* e = get("run", "serving_type")) {
    const auto k = rd.count(*e, "serving_type");
    if (k < 1) rd.fail(e->line, "serving_type is 1-based");
    cfg.serving_type = k - 1;
  } else {
    defaulted("run", "serving_type", "1");
  }
  if (const auto* e = get("run", "tau_db")) {
    cfg.tau_db = rd.list(*e, "tau_db");
    if (!std::is_sorted(cfg.tau_db.begin(), cfg.tau_db.end()) ||
        std::adjacent_find(cfg.tau_db.begin(), cfg.tau_db.end()) != cfg.tau_db.end()) {
      rd.fail(e->line, "tau_db must be strictly increasing");
    }
  } else {
    for (int t = -10; t <= 20; ++t) cfg.tau_db.push_back(t);
    defaulted("run", "tau_db", "-10:20:1");
  }
  const auto* sw = get("run", "sweep");
  const auto* sv = get("run", "sweep_values");
  if (sw || sv) {
    if (!sw || !sv) rd.fail((sw ? sw : sv)->line, "sweep and sweep_values go together");
    if (!sweepable(sw->value)) rd.fail(sw->line, "cannot sweep '" + sw->value + "'");
    Sweep s{sw->value, rd.list(*sv, "sweep_values")};
    for (std::size_t i = 1; i < s.values.size(); ++i) {
      if (!(s.values[i] > s.values[i - 1])) rd.fail(sv->line, "sweep_values must be strictly increasing");
    }
    cfg.sweep = std::move(s);
  }
  if (const auto* e = get("run", "trials")) {
    cfg.trials = rd.count(*e, "trials");
  } else {
    defaulted("run", "trials", std::to_string(cfg.trials));
  }
  if (const auto* e = get("run", "seed")) {
    cfg.seed = rd.count(*e, "seed");
  } else {
    defaulted("run", "seed", "1");
  }
  if (const auto* e = get("run", "rel_tol")) {
    cfg.tolerances.rel_tol = rd.number(*e, "rel_tol");
    if (!(cfg.tolerances.rel_tol > 0.0)) rd.fail(e->line, "rel_tol must be positive");
  } else {
    defaulted("run", "rel_tol", "1e-06");
  }
  if (const auto* e = get("run", "abs_tol")) {
    cfg.tolerances.abs_tol = rd.number(*e, "abs_tol");
    if (!(cfg.tolerances.abs_tol > 0.0)) rd.fail(e->line, "abs_tol must be positive");
  } else {
    defaulted("run", "abs_tol", "1e-09");
  }
  if (const auto* e = get("run", "max_depth")) {
    cfg.tolerances.max_depth = static_cast<int>(rd.count(*e, "max_depth"));
  } else {
    defaulted("run", "max_depth", "30");
  }
  if (const auto* e = get("run", "output")) cfg.output = e->value;
  if (const auto* e = get("run", "association")) {
    if (e->value == "power") {
      cfg.power_association = true;
    } else if (e->value != "nearest") {
      rd.fail(e->line, "association must be nearest or power");
    }
  } else {
    defaulted("run", "association", "nearest");
  }
  if (const auto* e = get("run", "shell_table")) {
    std::filesystem::path p(e->value);
    if (p.is_relative() && source.front() != '<') {
      p = std::filesystem::path(source).parent_path() / p;
    }
    cfg.shell_table = p.string();
  }
  if (const auto* e = get("run", "latitude_deg")) {
    cfg.latitudes_deg = rd.list(*e, "latitude_deg");
    for (double lat : cfg.latitudes_deg) {
      if (lat < -90.0 || lat > 90.0) rd.fail(e->line, "latitude_deg must lie in [-90, 90]");
    }
  } else {
    defaulted("run", "latitude_deg", "0");
  }
  if (const auto* e = get("run", "rotations")) {
    cfg.rotations = rd.count(*e, "rotations");
  } else {
    defaulted("run", "rotations", std::to_string(cfg.rotations));
  }
  if (const auto* e = get("run", "fit_strategy")) {
    using K_ = constellation::FitStrategy::Kind;
    if (e->value == "fix_mu") {
      cfg.fit_strategy = K_::fix_mu;
    } else if (e->value == "fix_lambda") {
      cfg.fit_strategy = K_::fix_lambda;
    } else if (e->value == "fix_ratio") {
      cfg.fit_strategy = K_::fix_ratio;
    } else {
      rd.fail(e->line, "fit_strategy must be fix_mu, fix_lambda or fix_ratio");
    }
  } else {
    defaulted("run", "fit_strategy", "fix_mu");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open file");
  return parse_config(in, path);
}

NetworkModel RunConfig::model() const {
  NetworkModel m;
  m.propagation = propagation;
  for (std::size_t k = 0; k < types && !constellations.empty(); ++k) {
    m.constellations.push_back(constellations[std::min(k, constellations.size() - 1)]);
  }
  return m;
}

NetworkModel RunConfig::model_with(const std::string& parameter, double value) const {
  if (parameter == "types") {
    if (value < 1.0 || value != std::floor(value)) {
      throw std::invalid_argument("types must be a positive integer");
    }
    RunConfig c = *this;
    c.types = static_cast<std::size_t>(value);
    return c.model();
  }
  NetworkModel m = model();
  if (parameter == "alpha") {
    m.propagation.alpha = value;
    return m;
  }
  if (parameter == "noise_w") {
    m.propagation.noise_w = value;
    return m;
  }
  const auto dot = parameter.find('.');
  const auto name = parameter.substr(0, dot);
  const std::size_t k = std::stoul(parameter.substr(dot + 1));
  if (k < 1 || k > m.size()) throw std::invalid_argument("sweep parameter " + parameter + " names a missing type");
  auto& spec = m.constellations[k - 1];
  if (name == "lambda") spec.lambda = value;
  else if (name == "mu") spec.mu = value;
  else if (name == "altitude_km") spec.radius_km = kEarthRadiusKm + value;
  else if (name == "radius_km") spec.radius_km = value;
  else if (name == "gain_db") spec.gain = db_to_linear(value);
  else if (name == "tx_power_w") spec.tx_power_w = value;
  else throw std::invalid_argument("cannot sweep " + parameter);
  return m;
}

std::vector<std::string> check(const RunConfig& cfg) {
  std::vector<std::string> errors;
  if (!cfg.mode) errors.push_back("no mode given ([run] mode or a subcommand)");
  if (cfg.constellations.empty()) errors.push_back("model has no constellation (K = 0)");
  const bool walker = cfg.mode && (*cfg.mode == Mode::fit || *cfg.mode == Mode::compare);
  if (walker) {
    for (std::size_t k = 0; k < cfg.shells.size(); ++k) {
      if (cfg.shells[k].names.empty()) {
        errors.push_back("[constellation." + std::to_string(k + 1) + "] needs shells in fit/compare modes");
      }
    }
    if (cfg.shell_table.empty()) errors.push_back("[run] shell_table is required in fit/compare modes");
    if (cfg.rotations < 2) errors.push_back("rotations must be >= 2");
    if (cfg.types != cfg.constellations.size()) errors.push_back("fit/compare modes do not support [network] types");
  } else if (!cfg.constellations.empty()) {
    const auto report = validate(cfg.model());
    errors.insert(errors.end(), report.errors.begin(), report.errors.end());
  }
  if (cfg.serving_type >= std::max<std::size_t>(cfg.types, 1) && !cfg.constellations.empty()) {
    errors.push_back("serving_type " + std::to_string(cfg.serving_type + 1) + " exceeds K = " + std::to_string(cfg.types));
  }
  const bool mc = cfg.engine != Engine::analytic || (cfg.mode && (*cfg.mode == Mode::simulate || *cfg.mode == Mode::compare));
  if (mc && cfg.trials < 1) errors.push_back("Monte Carlo needs trials >= 1");
  if (cfg.sweep) {
    if (walker) errors.push_back("fit/compare modes do not take a sweep");
    for (double v : cfg.sweep->values) {
      try {
        const auto m = cfg.model_with(cfg.sweep->parameter, v);
        for (const auto& e : validate(m).errors) errors.push_back(cfg.sweep->parameter + "=" + std::to_string(v) + ": " + e);
        if (cfg.serving_type >= m.size()) errors.push_back("serving_type exceeds K in sweep");
      } catch (const std::exception& e) {
        errors.push_back(e.what());
        break;
      }
    }
  }
  if (cfg.power_association && cfg.engine != Engine::analytic) {
    errors.push_back("association = power is analytic only");
  }
  return errors;
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  const auto flag = [&](const std::string& sec, const std::string& key) {
    const auto prefix = sec + "." + key + " = ";
    for (const auto& d : cfg.defaulted) {
      if (d.rfind(prefix, 0) == 0) return std::string("  [default]");
    }
    return std::string();
  };
  os << "mode = " << (cfg.mode ? to_string(*cfg.mode) : "(unset)") << "\n";
  os << "[network]\n  types = " << cfg.types << flag("network", "types") << "\n";
  for (std::size_t k = 0; k < cfg.constellations.size(); ++k) {
    const auto& c = cfg.constellations[k];
    const auto sec = "constellation." + std::to_string(k + 1);
    os << "[" << sec << "]\n";
    if (!cfg.shells[k].names.empty()) {
      os << "  shells =";
      for (std::size_t i = 0; i < cfg.shells[k].names.size(); ++i) {
        os << (i ? ", " : " ") << cfg.shells[k].names[i];
      }
      os << "\n  reuse = " << cfg.shells[k].reuse << "\n";
    }
    if (c.lambda > 0.0) os << "  lambda = " << c.lambda << " orbits (mean)\n";
    if (c.mu > 0.0) os << "  mu = " << c.mu << " satellites per orbit (mean)\n";
    if (c.radius_km > 0.0) {
      os << "  altitude_km = " << c.altitude_km() << " km (radius " << c.radius_km << " km)\n";
    }
    os << "  tx_power_w = " << c.tx_power_w << " W" << flag(sec, "tx_power_w") << "\n";
    os << "  gain_db = " << linear_to_db(c.gain) << " dB" << flag(sec, "gain_db") << "\n";
  }
  const auto& p = cfg.propagation;
  os << "[propagation]\n  alpha = " << p.alpha << flag("propagation", "alpha") << "\n"
     << "  noise_w = " << p.noise_w << " W" << flag("propagation", "noise_w") << "\n"
     << "  nakagami_m = " << p.nakagami_m << flag("propagation", "nakagami_m") << "\n";
  os << "[run]\n  engine = " << to_string(cfg.engine) << flag("run", "engine") << "\n"
     << "  serving_type = " << cfg.serving_type + 1 << flag("run", "serving_type") << "\n"
     << "  tau_db = " << cfg.tau_db.front() << " .. " << cfg.tau_db.back() << " dB ("
     << cfg.tau_db.size() << " points)" << flag("run", "tau_db") << "\n";
  if (cfg.sweep) {
    os << "  sweep = " << cfg.sweep->parameter << " over " << cfg.sweep->values.size() << " values\n";
  }
  os << "  trials = " << cfg.trials << flag("run", "trials") << "\n"
     << "  seed = " << cfg.seed << flag("run", "seed") << "\n"
     << "  rel_tol = " << cfg.tolerances.rel_tol << flag("run", "rel_tol") << "\n"
     << "  abs_tol = " << cfg.tolerances.abs_tol << flag("run", "abs_tol") << "\n"
     << "  max_depth = " << cfg.tolerances.max_depth << flag("run", "max_depth") << "\n"
     << "  association = " << (cfg.power_association ? "power" : "nearest") << flag("run", "association") << "\n"
     << "  output = " << (cfg.output.empty() ? "(stdout)" : cfg.output) << "\n";
  if (!cfg.shell_table.empty()) {
    os << "  shell_table = " << cfg.shell_table << "\n  latitude_deg =";
    for (std::size_t i = 0; i < cfg.latitudes_deg.size(); ++i) {
      os << (i ? ", " : " ") << cfg.latitudes_deg[i];
    }
    os << " deg" << flag("run", "latitude_deg") << "\n  rotations = " << cfg.rotations
       << flag("run", "rotations") << "\n";
  }
  return os.str();
}

}  // namespace leocox::cli
