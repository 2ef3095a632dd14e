#include "leocox/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "leocox/analytic.hpp"
#include "leocox/parallel.hpp"
#include "leocox/stats.hpp"

namespace leocox::constellation {

using mc::CounterRng;

namespace {

constexpr double kDeg = kPi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

geometry::Vec3 user_at(double latitude_deg, CounterRng& rng) {
  return geometry::surface_point(latitude_deg * kDeg, 2.0 * kPi * rng.uniform());
}

std::optional<double> crossing(const Curve& c, double level) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double y0 = c[i].y, y1 = c[i + 1].y;
    if (y0 >= level && y1 <= level) {
      if (y0 == y1) return c[i].x;
      return c[i].x + (y0 - level) / (y0 - y1) * (c[i + 1].x - c[i].x);
    }
  }
  return std::nullopt;
}

}  // namespace

void WalkerShell::validate() const {
  if (planes < 1) throw std::invalid_argument("WalkerShell " + name + ": planes must be >= 1");
  if (sats_per_plane < 1) {
    throw std::invalid_argument("WalkerShell " + name + ": sats_per_plane must be >= 1");
  }
  if (!(altitude_km > 0.0)) {
    throw std::invalid_argument("WalkerShell " + name + ": altitude must be positive");
  }
  if (inclination_deg < 0.0 || inclination_deg > 180.0) {
    throw std::invalid_argument("WalkerShell " + name + ": inclination must lie in [0, 180]");
  }
}

std::vector<geometry::Vec3> generate_walker(const WalkerShell& shell) {
  shell.validate();
  const double r = shell.radius_km();
  const double ci = std::cos(shell.inclination_deg * kDeg), si = std::sin(shell.inclination_deg * kDeg);
  const double n_total = static_cast<double>(shell.size());
  std::vector<geometry::Vec3> out;
  out.reserve(shell.size());
  for (int p = 0; p < shell.planes; ++p) {
    const double raan = shell.raan_spread * p / shell.planes;
    const double co = std::cos(raan), so = std::sin(raan);
    const double shift = 2.0 * kPi * shell.phase_offset * p / n_total;
    for (int j = 0; j < shell.sats_per_plane; ++j) {
      const double u = 2.0 * kPi * j / shell.sats_per_plane + shift;
      const double cu = std::cos(u), su = std::sin(u);
      out.push_back({r * (cu * co - su * so * ci), r * (cu * so + su * co * ci), r * su * si});
    }
  }
  return out;
}

std::vector<geometry::Vec3> co_channel_subset(std::span<const geometry::Vec3> positions, int reuse) {
  if (reuse < 1) throw std::invalid_argument("co_channel_subset: reuse factor must be >= 1");
  std::vector<geometry::Vec3> out;
  for (std::size_t i = 0; i < positions.size(); i += reuse) out.push_back(positions[i]);
  return out;
}

std::vector<WalkerShell> read_shell_table(std::istream& in) {
  std::vector<WalkerShell> shells;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(t);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(trim(cell));
    const auto fail = [&](const std::string& msg) {
      throw std::runtime_error("shell table line " + std::to_string(line_no) + ": " + msg);
    };
    if (f.size() != 5) fail("expected 5 comma-separated fields, got " + std::to_string(f.size()));
    WalkerShell s;
    s.name = f[0];
    try {
      std::size_t pos = 0;
      s.altitude_km = std::stod(f[1], &pos);
      if (pos != f[1].size()) fail("bad altitude '" + f[1] + "'");
    } catch (const std::invalid_argument&) {
      if (shells.empty()) continue;  // header row
      fail("bad altitude '" + f[1] + "'");
    }
    try {
      s.inclination_deg = std::stod(f[2]);
      s.planes = std::stoi(f[3]);
      s.sats_per_plane = std::stoi(f[4]);
    } catch (const std::exception&) {
      fail("bad numeric field");
    }
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    shells.push_back(std::move(s));
  }
  return shells;
}

std::vector<WalkerShell> load_shell_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open shell table " + path);
  return read_shell_table(in);
}

VisibleCount mean_visible(std::span<const geometry::Vec3> positions, double latitude_deg,
                          std::size_t n_rotations, std::uint64_t seed) {
  if (n_rotations < 2) throw std::invalid_argument("mean_visible: need at least 2 rotations");
  std::vector<double> counts(n_rotations);
  const double re2 = kEarthRadiusKm * kEarthRadiusKm;
  parallel_for(n_rotations, [&](std::size_t i) {
    CounterRng rng(seed, i);
    const auto user = user_at(latitude_deg, rng);
    std::size_t n = 0;
    for (const auto& x : positions) n += x.dot(user) >= re2;
    counts[i] = static_cast<double>(n);
  });
  double sum = 0.0, sq = 0.0;
  for (double c : counts) {
    sum += c;
    sq += c * c;
  }
  const double n = static_cast<double>(n_rotations);
  const double mean = sum / n;
  const double var = std::max(0.0, (sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), n_rotations};
}

double mean_visible(const ConstellationSpec& spec) {
  return spec.lambda * spec.mu * (1.0 - kEarthRadiusKm / spec.radius_km) / 2.0;
}

FittedCox fit_cox(double target_visible, double radius_km, FitStrategy strategy,
                  double latitude_deg) {
  if (!(target_visible > 0.0)) throw std::invalid_argument("fit_cox: target must be positive");
  if (!(radius_km > kEarthRadiusKm)) throw std::invalid_argument("fit_cox: radius <= r_e");
  if (!(strategy.value > 0.0)) throw std::invalid_argument("fit_cox: strategy value must be positive");
  const double product = 2.0 * target_visible / (1.0 - kEarthRadiusKm / radius_km);
  FittedCox fit;
  fit.radius_km = radius_km;
  fit.target_visible = target_visible;
  fit.latitude_deg = latitude_deg;
  switch (strategy.kind) {
    case FitStrategy::Kind::fix_mu:
      fit.mu_hat = strategy.value;
      fit.lambda_hat = product / strategy.value;
      break;
    case FitStrategy::Kind::fix_lambda:
      fit.lambda_hat = strategy.value;
      fit.mu_hat = product / strategy.value;
      break;
    case FitStrategy::Kind::fix_ratio:
      fit.mu_hat = std::sqrt(product / strategy.value);
      fit.lambda_hat = strategy.value * fit.mu_hat;
      break;
  }
  return fit;
}

std::vector<mc::SinrSample> sample_sinr(const DeterministicSystem& system, mc::Access mode,
                                        double latitude_deg, std::size_t n_trials,
                                        std::uint64_t seed) {
  if (system.types.size() != system.radio.size()) {
    throw std::invalid_argument("DeterministicSystem: radio parameters needed for every type");
  }
  std::vector<mc::SinrSample> out(n_trials);
  const int m = system.radio.propagation.nakagami_m;
  parallel_for(n_trials, [&](std::size_t i) {
    CounterRng rng(seed, i);
    const auto user = user_at(latitude_deg, rng);
    out[i] = mc::evaluate_sinr(mc::observe_positions(system.types, user, m, rng), system.radio, mode);
  });
  return out;
}

Curve deterministic_coverage(const DeterministicSystem& system, mc::Access mode,
                             double latitude_deg, std::span<const double> tau_db,
                             std::size_t n_trials, std::uint64_t seed) {
  const auto samples = sample_sinr(system, mode, latitude_deg, n_trials, seed);
  Curve c;
  const double n = static_cast<double>(n_trials);
  for (double t : tau_db) {
    const double tau = db_to_linear(t);
    std::size_t hits = 0;
    for (const auto& s : samples) hits += s.serving_type && s.sinr > tau;
    const double p = hits / n;
    c.push_back(t, p, std::sqrt(p * (1.0 - p) / n));
  }
  return c;
}

double max_horizontal_gap_db(const Curve& a, const Curve& b, double lo, double hi) {
  constexpr int kLevels = 61;
  double gap = -1.0;
  for (int i = 0; i < kLevels; ++i) {
    const double level = lo + (hi - lo) * i / (kLevels - 1);
    const auto xa = crossing(a, level), xb = crossing(b, level);
    if (xa && xb) gap = std::max(gap, std::abs(*xa - *xb));
  }
  if (gap < 0.0) throw std::invalid_argument("max_horizontal_gap_db: curves miss the level range");
  return gap;
}

CoverageComparison compare_coverage(const DeterministicSystem& system, const NetworkModel& cox,
                                    std::size_t k, double latitude_deg,
                                    std::span<const double> tau_db, std::size_t n_trials,
                                    std::uint64_t seed) {
  CoverageComparison out;
  out.deterministic =
      deterministic_coverage(system, mc::Access::closed(k), latitude_deg, tau_db, n_trials, seed);
  out.cox = analytic::coverage_closed_curve(cox, k, tau_db);
  out.max_gap_db = max_horizontal_gap_db(out.deterministic, out.cox);
  return out;
}

std::vector<double> nearest_distance_samples(std::span<const std::vector<geometry::Vec3>> types,
                                             double latitude_deg, std::size_t n,
                                             std::uint64_t seed) {
  std::vector<double> out(n);
  const double re2 = kEarthRadiusKm * kEarthRadiusKm;
  parallel_for(n, [&](std::size_t i) {
    CounterRng rng(seed, i);
    const auto user = user_at(latitude_deg, rng);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& type : types) {
      for (const auto& x : type) {
        if (x.dot(user) >= re2) best = std::min(best, (x - user).norm());
      }
    }
    out[i] = best;
  });
  return out;
}

mc::IsotropyResult isotropy_check(std::span<const std::vector<geometry::Vec3>> types,
                                  std::size_t n, std::uint64_t seed) {
  if (n < 10000) throw std::invalid_argument("isotropy_check: n must be at least 1e4");
  const auto pole = nearest_distance_samples(types, 90.0, n, seed);
  const auto mid = nearest_distance_samples(types, 45.0, n, seed ^ 0x5bd1e9955bd1e995ull);
  const auto ks = stats::ks_two_sample(pole, mid);
  return {ks.statistic, ks.p_value, ks.p_value > 0.01};
}

}  // namespace leocox::constellation
