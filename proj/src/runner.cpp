#include "leocox/runner.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "leocox/analytic.hpp"
#include "leocox/constellation.hpp"
#include "leocox/montecarlo.hpp"

namespace leocox::cli {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(const std::vector<std::string>& cols) { line(cols); }

  CsvWriter& operator<<(double v) {
    cells_.push_back(fmt(v));
    return *this;
  }
  CsvWriter& operator<<(const std::string& s) {
    cells_.push_back(s);
    return *this;
  }
  void end() {
    line(cells_);
    cells_.clear();
  }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

  std::ostream& os_;
  std::vector<std::string> cells_;
};

/// Tracks the largest analytic-vs-MC discrepancy in units of standard error.
class Agreement {
 public:
  void add(double analytic, double mc, double sigma, const std::string& where) {
    const double diff = std::abs(analytic - mc);
    if (diff > max_abs_) {
      max_abs_ = diff;
      where_abs_ = where;
    }
    const double z = sigma > 0.0 ? diff / sigma : (diff > 1e-12 ? kInf : 0.0);
    if (z > worst_z_) {
      worst_z_ = z;
      where_z_ = where;
    }
  }

  void add_binomial(double analytic, double mc, std::size_t n, const std::string& where) {
    const double p = std::min(std::max(analytic, 0.0), 1.0);
    add(analytic, mc, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), where);
  }

  bool violated() const { return worst_z_ > 5.0; }

  void report(std::ostream& log) const {
    log << "max |analytic - mc| = " << fmt(max_abs_);
    if (!where_abs_.empty()) log << " at " << where_abs_;
    log << "; worst deviation = " << fmt(worst_z_) << " stderr";
    if (!where_z_.empty()) log << " at " << where_z_;
    log << (violated() ? " (exceeds 5 stderr)" : "") << "\n";
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double max_abs_ = 0.0;
  double worst_z_ = 0.0;
  std::string where_abs_, where_z_;
};

struct Point {
  std::optional<double> sweep_value;
  NetworkModel model;
  std::string label;
};

std::vector<Point> sweep_points(const RunConfig& cfg) {
  std::vector<Point> out;
  if (!cfg.sweep) {
    out.push_back({std::nullopt, cfg.model(), ""});
    return out;
  }
  for (double v : cfg.sweep->values) {
    out.push_back({v, cfg.model_with(cfg.sweep->parameter, v), cfg.sweep->parameter + "=" + fmt(v) + " "});
  }
  return out;
}

std::vector<std::string> with_sweep(const RunConfig& cfg, std::vector<std::string> cols) {
  if (cfg.sweep) cols.insert(cols.begin(), cfg.sweep->parameter);
  return cols;
}

bool wants_analytic(Engine e) { return e != Engine::montecarlo; }
bool wants_mc(Engine e) { return e != Engine::analytic; }

template <typename F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(context + ": " + e.what());
  }
}

int run_coverage(const RunConfig& cfg, bool open, CsvWriter& csv, std::ostream& log) {
  std::vector<std::string> cols{"tau_db"};
  if (wants_analytic(cfg.engine)) cols.push_back("coverage_analytic");
  if (wants_mc(cfg.engine)) {
    cols.push_back("coverage_mc");
    cols.push_back("mc_stderr");
  }
  csv.header(with_sweep(cfg, cols));
  Agreement agree;
  for (const auto& pt : sweep_points(cfg)) {
    Curve a, m;
    if (wants_analytic(cfg.engine)) {
      a = with_context(pt.label + (open ? "coverage-open" : "coverage-closed"), [&] {
        return open ? analytic::coverage_open_curve(pt.model, cfg.tau_db, cfg.tolerances)
                    : analytic::coverage_closed_curve(pt.model, cfg.serving_type, cfg.tau_db,
                                                      cfg.tolerances);
      });
    }
    if (wants_mc(cfg.engine)) {
      const auto mode = open ? mc::Access::open() : mc::Access::closed(cfg.serving_type);
      m = mc::estimate(pt.model, mode, cfg.tau_db, cfg.trials, cfg.seed).coverage;
    }
    for (std::size_t i = 0; i < cfg.tau_db.size(); ++i) {
      if (pt.sweep_value) csv << *pt.sweep_value;
      csv << cfg.tau_db[i];
      if (!a.empty()) csv << a[i].y;
      if (!m.empty()) csv << m[i].y << *m[i].stderr_;
      csv.end();
      if (!a.empty() && !m.empty()) {
        agree.add_binomial(a[i].y, m[i].y, cfg.trials, pt.label + "tau_db=" + fmt(cfg.tau_db[i]));
      }
    }
  }
  if (cfg.engine == Engine::both) {
    agree.report(log);
    if (agree.violated()) return kExitDisagreement;
  }
  return kExitOk;
}

int run_association(const RunConfig& cfg, CsvWriter& csv, std::ostream& log) {
  std::vector<std::string> cols{"type"};
  if (wants_analytic(cfg.engine)) cols.push_back("association_analytic");
  if (wants_mc(cfg.engine)) {
    cols.push_back("association_mc");
    cols.push_back("mc_stderr");
  }
  csv.header(with_sweep(cfg, cols));
  Agreement agree;
  for (const auto& pt : sweep_points(cfg)) {
    std::vector<double> mc_freq;
    if (wants_mc(cfg.engine)) {
      const double tau0[] = {0.0};
      mc_freq = mc::estimate(pt.model, mc::Access::open(), tau0, cfg.trials, cfg.seed).association;
    }
    for (std::size_t k = 0; k < pt.model.size(); ++k) {
      if (pt.sweep_value) csv << *pt.sweep_value;
      csv << fmt(static_cast<double>(k + 1));
      double a = 0.0;
      if (wants_analytic(cfg.engine)) {
        a = with_context(pt.label + "association type " + std::to_string(k + 1), [&] {
          return cfg.power_association
                     ? analytic::association_probability_power(pt.model, k, cfg.tolerances)
                     : analytic::association_probability(pt.model, k, cfg.tolerances);
        });
        csv << a;
      }
      if (!mc_freq.empty()) {
        const double p = mc_freq[k];
        csv << p << std::sqrt(p * (1.0 - p) / cfg.trials);
        if (wants_analytic(cfg.engine)) {
          agree.add_binomial(a, p, cfg.trials, pt.label + "type=" + std::to_string(k + 1));
        }
      }
      csv.end();
    }
  }
  if (cfg.engine == Engine::both) {
    agree.report(log);
    if (agree.violated()) return kExitDisagreement;
  }
  return kExitOk;
}

int run_no_satellite(const RunConfig& cfg, CsvWriter& csv, std::ostream& log) {
  std::vector<std::string> cols{"scope"};
  if (wants_analytic(cfg.engine)) cols.push_back("no_satellite_analytic");
  if (wants_mc(cfg.engine)) {
    cols.push_back("no_satellite_mc");
    cols.push_back("mc_stderr");
  }
  csv.header(with_sweep(cfg, cols));
  Agreement agree;
  for (const auto& pt : sweep_points(cfg)) {
    std::optional<mc::NoSatelliteEstimate> est;
    if (wants_mc(cfg.engine)) est = mc::estimate_no_satellite(pt.model, cfg.trials, cfg.seed);
    for (std::size_t k = 0; k <= pt.model.size(); ++k) {
      const bool open = k == pt.model.size();
      const std::string scope = open ? "open" : std::to_string(k + 1);
      if (pt.sweep_value) csv << *pt.sweep_value;
      csv << scope;
      double a = 0.0;
      if (wants_analytic(cfg.engine)) {
        a = with_context(pt.label + "no-satellite " + scope, [&] {
          return open ? analytic::no_satellite_open(pt.model, cfg.tolerances)
                      : analytic::no_satellite_closed(pt.model[k], cfg.tolerances);
        });
        csv << a;
      }
      if (est) {
        const double p = open ? est->any : est->per_type[k];
        csv << p << std::sqrt(p * (1.0 - p) / cfg.trials);
        if (wants_analytic(cfg.engine)) agree.add_binomial(a, p, cfg.trials, pt.label + "scope=" + scope);
      }
      csv.end();
    }
  }
  if (cfg.engine == Engine::both) {
    agree.report(log);
    if (agree.violated()) return kExitDisagreement;
  }
  return kExitOk;
}

int run_ergodic(const RunConfig& cfg, CsvWriter& csv, std::ostream& log) {
  std::vector<std::string> cols{"access"};
  if (wants_analytic(cfg.engine)) cols.push_back("capacity_analytic");
  if (wants_mc(cfg.engine)) {
    cols.push_back("capacity_mc");
    cols.push_back("mc_stderr");
  }
  csv.header(with_sweep(cfg, cols));
  Agreement agree;
  const mc::Access modes[] = {mc::Access::closed(cfg.serving_type), mc::Access::open()};
  for (const auto& pt : sweep_points(cfg)) {
    std::vector<mc::EstimateResult> est;
    if (wants_mc(cfg.engine)) {
      const double tau0[] = {0.0};
      est = mc::estimate_modes(pt.model, modes, tau0, cfg.trials, cfg.seed);
    }
    for (int j = 0; j < 2; ++j) {
      const std::string name = j == 0 ? "closed." + std::to_string(cfg.serving_type + 1) : "open";
      if (pt.sweep_value) csv << *pt.sweep_value;
      csv << name;
      double a = 0.0;
      if (wants_analytic(cfg.engine)) {
        a = with_context(pt.label + "ergodic " + name, [&] {
          return analytic::ergodic_capacity(
              [&](double tau) {
                return j == 0 ? analytic::coverage_closed(pt.model, cfg.serving_type, tau, cfg.tolerances)
                              : analytic::coverage_open(pt.model, tau, cfg.tolerances);
              },
              cfg.tolerances);
        });
        csv << a;
      }
      if (!est.empty()) {
        csv << est[j].mean_capacity_bits << est[j].capacity_stderr;
        if (wants_analytic(cfg.engine)) {
          agree.add(a, est[j].mean_capacity_bits, est[j].capacity_stderr, pt.label + name);
        }
      }
      csv.end();
    }
  }
  if (cfg.engine == Engine::both) {
    agree.report(log);
    if (agree.violated()) return kExitDisagreement;
  }
  return kExitOk;
}

int run_simulate(const RunConfig& cfg, CsvWriter& csv) {
  csv.header(with_sweep(cfg, {"access", "tau_db", "coverage_mc", "mc_stderr"}));
  for (const auto& pt : sweep_points(cfg)) {
    std::vector<mc::Access> modes;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < pt.model.size(); ++k) {
      modes.push_back(mc::Access::closed(k));
      names.push_back("closed." + std::to_string(k + 1));
    }
    modes.push_back(mc::Access::open());
    names.push_back("open");
    const auto est = mc::estimate_modes(pt.model, modes, cfg.tau_db, cfg.trials, cfg.seed);
    for (std::size_t j = 0; j < modes.size(); ++j) {
      for (std::size_t i = 0; i < cfg.tau_db.size(); ++i) {
        if (pt.sweep_value) csv << *pt.sweep_value;
        csv << names[j] << cfg.tau_db[i] << est[j].coverage[i].y << *est[j].coverage[i].stderr_;
        csv.end();
      }
    }
  }
  return kExitOk;
}

struct WalkerType {
  std::vector<geometry::Vec3> positions;
  double radius_km = 0.0;
  double default_fit_value = 0.0;
  std::string label;
};

std::vector<WalkerType> walker_types(const RunConfig& cfg) {
  const auto table = constellation::load_shell_table(cfg.shell_table);
  std::vector<WalkerType> out;
  for (const auto& group : cfg.shells) {
    WalkerType t;
    int planes = 0;
    double sats = 0.0;
    for (const auto& name : group.names) {
      const constellation::WalkerShell* shell = nullptr;
      for (const auto& s : table) {
        if (s.name == name) shell = &s;
      }
      if (!shell) throw std::runtime_error("shell '" + name + "' not found in " + cfg.shell_table);
      const auto pos = constellation::co_channel_subset(constellation::generate_walker(*shell), group.reuse);
      t.positions.insert(t.positions.end(), pos.begin(), pos.end());
      t.radius_km += shell->radius_km() / group.names.size();
      planes += shell->planes;
      sats = static_cast<double>(shell->sats_per_plane) / group.reuse;
      t.label += (t.label.empty() ? "" : "+") + name;
    }
    using K_ = constellation::FitStrategy::Kind;
    switch (cfg.fit_strategy) {
      case K_::fix_mu: t.default_fit_value = sats; break;
      case K_::fix_lambda: t.default_fit_value = planes; break;
      case K_::fix_ratio: t.default_fit_value = planes / sats; break;
    }
    out.push_back(std::move(t));
  }
  return out;
}

constellation::FittedCox fit_type(const RunConfig& cfg, const WalkerType& t, std::size_t k,
                                  double lat, double target) {
  const double value = cfg.shells[k].fit_value.value_or(t.default_fit_value);
  return constellation::fit_cox(target, t.radius_km, {cfg.fit_strategy, value}, lat);
}

int run_fit(const RunConfig& cfg, CsvWriter& csv) {
  csv.header({"type", "shells", "latitude_deg", "walker_mean_visible", "walker_stderr",
              "lambda_hat", "mu_hat", "radius_km", "cox_mean_visible"});
  const auto types = walker_types(cfg);
  for (double lat : cfg.latitudes_deg) {
    for (std::size_t k = 0; k < types.size(); ++k) {
      const auto vis = constellation::mean_visible(types[k].positions, lat, cfg.rotations, cfg.seed);
      const auto fit = fit_type(cfg, types[k], k, lat, vis.mean);
      csv << fmt(static_cast<double>(k + 1)) << types[k].label << lat << vis.mean << vis.stderr_
          << fit.lambda_hat << fit.mu_hat << fit.radius_km << constellation::mean_visible(fit.spec());
      csv.end();
    }
  }
  return kExitOk;
}

int run_compare(const RunConfig& cfg, CsvWriter& csv, std::ostream& log) {
  std::vector<std::string> cols{"latitude_deg", "tau_db", "coverage_deterministic",
                                "deterministic_stderr"};
  if (wants_analytic(cfg.engine)) cols.push_back("coverage_cox_analytic");
  if (wants_mc(cfg.engine)) {
    cols.push_back("coverage_cox_mc");
    cols.push_back("cox_mc_stderr");
  }
  csv.header(cols);
  const auto types = walker_types(cfg);
  constellation::DeterministicSystem sys;
  for (std::size_t k = 0; k < types.size(); ++k) {
    sys.types.push_back(types[k].positions);
    auto spec = cfg.constellations[k];
    spec.radius_km = types[k].radius_km;
    spec.lambda = spec.mu = 1.0;
    sys.radio.constellations.push_back(spec);
  }
  sys.radio.propagation = cfg.propagation;
  const auto k = cfg.serving_type;
  for (double lat : cfg.latitudes_deg) {
    NetworkModel cox;
    cox.propagation = cfg.propagation;
    for (std::size_t j = 0; j < types.size(); ++j) {
      const auto vis = constellation::mean_visible(types[j].positions, lat, cfg.rotations, cfg.seed);
      const auto& radio = cfg.constellations[j];
      cox.constellations.push_back(
          fit_type(cfg, types[j], j, lat, vis.mean).spec(radio.tx_power_w, radio.gain));
    }
    const auto det = constellation::deterministic_coverage(sys, mc::Access::closed(k), lat,
                                                           cfg.tau_db, cfg.trials, cfg.seed);
    Curve a, m;
    if (wants_analytic(cfg.engine)) {
      a = with_context("compare latitude " + fmt(lat), [&] {
        return analytic::coverage_closed_curve(cox, k, cfg.tau_db, cfg.tolerances);
      });
    }
    if (wants_mc(cfg.engine)) {
      m = mc::estimate(cox, mc::Access::closed(k), cfg.tau_db, cfg.trials, cfg.seed).coverage;
    }
    for (std::size_t i = 0; i < cfg.tau_db.size(); ++i) {
      csv << lat << cfg.tau_db[i] << det[i].y << *det[i].stderr_;
      if (!a.empty()) csv << a[i].y;
      if (!m.empty()) csv << m[i].y << *m[i].stderr_;
      csv.end();
    }
    const auto& cox_curve = a.empty() ? m : a;
    try {
      log << "latitude " << fmt(lat) << " deg: max horizontal gap over coverage [0.2, 0.8] = "
          << fmt(constellation::max_horizontal_gap_db(det, cox_curve)) << " dB\n";
    } catch (const std::invalid_argument&) {
      log << "latitude " << fmt(lat) << " deg: tau grid does not span coverage [0.2, 0.8]\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& csv_out, std::ostream& log) {
  const auto errors = check(cfg);
  if (!errors.empty()) {
    for (const auto& e : errors) log << "config error: " << e << "\n";
    return kExitConfig;
  }
  CsvWriter csv(csv_out);
  switch (*cfg.mode) {
    case Mode::coverage_closed: return run_coverage(cfg, false, csv, log);
    case Mode::coverage_open: return run_coverage(cfg, true, csv, log);
    case Mode::association: return run_association(cfg, csv, log);
    case Mode::no_satellite: return run_no_satellite(cfg, csv, log);
    case Mode::ergodic: return run_ergodic(cfg, csv, log);
    case Mode::simulate: return run_simulate(cfg, csv);
    case Mode::fit: return run_fit(cfg, csv);
    case Mode::compare: return run_compare(cfg, csv, log);
  }
  return kExitConfig;
}

}  // namespace leocox::cli
