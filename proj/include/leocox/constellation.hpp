#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "leocox/geometry.hpp"
#include "leocox/model.hpp"
#include "leocox/montecarlo.hpp"

namespace leocox::constellation {

/// Deterministic Walker-style shell: `planes` circular planes equally spaced
/// in RAAN over `raan_spread`, `sats_per_plane` satellites equally spaced in
/// each plane. Plane p is advanced in anomaly by
/// 2 pi * phase_offset * p / (planes * sats_per_plane).
struct WalkerShell {
  std::string name;
  double altitude_km = 0.0;
  double inclination_deg = 0.0;
  int planes = 0;
  int sats_per_plane = 0;
  double raan_spread = 2.0 * kPi;
  double phase_offset = 0.0;

  double radius_km() const { return kEarthRadiusKm + altitude_km; }
  std::size_t size() const { return static_cast<std::size_t>(planes) * sats_per_plane; }
  void validate() const;
};

/// Satellite positions ordered plane by plane.
std::vector<geometry::Vec3> generate_walker(const WalkerShell& shell);

/// Co-channel subset under frequency reuse factor F: every F-th satellite by
/// index.
std::vector<geometry::Vec3> co_channel_subset(std::span<const geometry::Vec3> positions,
                                              int reuse);

/// Reads shells from a comma-separated table with columns
/// name, altitude_km, inclination_deg, planes, sats_per_plane.
/// Blank lines and lines starting with '#' are skipped; a header row whose
/// second field is not numeric is skipped too.
std::vector<WalkerShell> read_shell_table(std::istream& in);
std::vector<WalkerShell> load_shell_table(const std::string& path);

struct VisibleCount {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t rotations = 0;
};

/// Mean number of satellites above the horizon of a user at the given
/// latitude, averaged over uniformly random rotations about the earth axis.
VisibleCount mean_visible(std::span<const geometry::Vec3> positions, double latitude_deg,
                          std::size_t n_rotations, std::uint64_t seed);

/// Cox model mean visible count lambda mu (1 - r_e / r) / 2, the same at
/// every latitude.
double mean_visible(const ConstellationSpec& spec);

struct FitStrategy {
  enum class Kind { fix_mu, fix_lambda, fix_ratio };
  Kind kind = Kind::fix_mu;
  double value = 0.0;  ///< mu_0, lambda_0, or lambda / mu

  static FitStrategy fix_mu(double mu) { return {Kind::fix_mu, mu}; }
  static FitStrategy fix_lambda(double lambda) { return {Kind::fix_lambda, lambda}; }
  static FitStrategy fix_ratio(double ratio) { return {Kind::fix_ratio, ratio}; }
};

struct FittedCox {
  double lambda_hat = 0.0;
  double mu_hat = 0.0;
  double radius_km = 0.0;
  double target_visible = 0.0;
  double latitude_deg = 0.0;

  ConstellationSpec spec(double tx_power_w = 1.0, double gain = 1.0) const {
    return {lambda_hat, mu_hat, radius_km, tx_power_w, gain};
  }
};

/// Solves lambda mu (1 - r_e / r) / 2 = target under the given closure.
FittedCox fit_cox(double target_visible, double radius_km, FitStrategy strategy,
                  double latitude_deg = 0.0);

/// Deterministic multi-type system: satellite positions per type plus the
/// radio parameters (power, gain, propagation) taken from `radio`; the
/// lambda and mu fields of `radio` are not used.
struct DeterministicSystem {
  std::vector<std::vector<geometry::Vec3>> types;
  NetworkModel radio;
};

/// SINR samples of a user at `latitude_deg` and random longitude.
std::vector<mc::SinrSample> sample_sinr(const DeterministicSystem& system, mc::Access mode,
                                        double latitude_deg, std::size_t n_trials,
                                        std::uint64_t seed);

/// Coverage of the deterministic system over a tau grid (dB), with binomial
/// standard errors.
Curve deterministic_coverage(const DeterministicSystem& system, mc::Access mode,
                             double latitude_deg, std::span<const double> tau_db,
                             std::size_t n_trials, std::uint64_t seed);

/// Largest horizontal distance (dB) between two decreasing coverage curves
/// over coverage levels in [lo, hi], found by linear interpolation.
double max_horizontal_gap_db(const Curve& a, const Curve& b, double lo = 0.2, double hi = 0.8);

struct CoverageComparison {
  Curve deterministic;
  Curve cox;
  double max_gap_db = 0.0;
};

/// Closed-access coverage of type k in the deterministic system paired with
/// the analytic coverage of the fitted Cox model.
CoverageComparison compare_coverage(const DeterministicSystem& system, const NetworkModel& cox,
                                    std::size_t k, double latitude_deg,
                                    std::span<const double> tau_db, std::size_t n_trials,
                                    std::uint64_t seed);

/// Nearest visible distance (any type) for users at `latitude_deg` and
/// random longitudes; infinity when nothing is visible.
std::vector<double> nearest_distance_samples(std::span<const std::vector<geometry::Vec3>> types,
                                             double latitude_deg, std::size_t n,
                                             std::uint64_t seed);

/// Pole against 45 degrees latitude two-sample KS test for a deterministic
/// system.
mc::IsotropyResult isotropy_check(std::span<const std::vector<geometry::Vec3>> types,
                                  std::size_t n, std::uint64_t seed);

}  // namespace leocox::constellation
