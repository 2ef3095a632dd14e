#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "leocox/geometry.hpp"
#include "leocox/model.hpp"
#include "leocox/rng.hpp"

namespace leocox::mc {

struct SampledOrbit {
  double radius;
  double longitude;    ///< [0, pi)
  double inclination;  ///< [0, pi]
  std::vector<double> anomalies;

  geometry::Vec3 position(double omega) const;
};

/// One realisation of the superposed Cox process: orbits per type, each with
/// its satellite anomalies.
struct SampledNetwork {
  std::vector<std::vector<SampledOrbit>> types;

  std::size_t satellite_count(std::size_t k) const;
  std::size_t satellite_count() const;
  std::vector<geometry::Vec3> positions(std::size_t k) const;
};

/// Exact sampler: Poisson(lambda) orbits with uniform longitude and
/// inclination density sin/2, Poisson(mu) satellites per orbit with uniform
/// anomalies.
SampledNetwork sample_network(const NetworkModel& model, CounterRng& rng);

/// Orbit law of one type on a window of the (radius, longitude, inclination)
/// cuboid: radius uniform on [radius_min, radius_max], longitude uniform on
/// [longitude_min, longitude_max), inclination with density proportional to
/// sin on [inclination_min, inclination_max].
struct OrbitLaw {
  double lambda;
  double mu;
  double radius_min;
  double radius_max;
  double longitude_min = 0.0;
  double longitude_max = kPi;
  double inclination_min = 0.0;
  double inclination_max = kPi;

  void validate() const;
};

SampledNetwork sample_network_generalized(std::span<const OrbitLaw> laws, CounterRng& rng);

/// A visible satellite as seen by one user: type, distance and the fading
/// draw of its link.
struct Link {
  int type;
  double distance;
  double fading;
};

/// Visible links of one realisation, sorted by increasing distance.
struct LinkSet {
  std::vector<Link> links;
};

/// Draws unit-mean Gamma(m, 1/m) power fading.
double draw_fading(int m, CounterRng& rng);

/// Visible satellites of `net` seen from `user` (zero-elevation mask), each
/// with a fresh fading draw.
LinkSet observe(const SampledNetwork& net, const geometry::Vec3& user, int nakagami_m,
                CounterRng& rng);

/// Same law as observe(sample_network(...), typical user) but only the
/// visible part of each orbit is sampled.
LinkSet sample_visible_links(const NetworkModel& model, CounterRng& rng);

/// Builds a LinkSet from explicit satellite positions per type.
LinkSet observe_positions(std::span<const std::vector<geometry::Vec3>> positions,
                          const geometry::Vec3& user, int nakagami_m, CounterRng& rng);

struct Access {
  enum class Kind { closed, open };
  Kind kind = Kind::open;
  std::size_t type = 0;  ///< serving type for closed access

  static Access closed(std::size_t k) { return {Kind::closed, k}; }
  static Access open() { return {Kind::open, 0}; }
};

struct SinrSample {
  std::optional<std::size_t> serving_type;
  double serving_distance = 0.0;  ///< infinity when nothing serves
  double sinr = 0.0;
  Access mode;
  /// Nearest interferer distance (infinity if none).
  double nearest_interferer = 0.0;
};

SinrSample evaluate_sinr(const LinkSet& links, const NetworkModel& model, Access mode);
SinrSample evaluate_sinr(const SampledNetwork& net, const NetworkModel& model, Access mode,
                         CounterRng& rng);

struct EstimateResult {
  Curve coverage;               ///< x = tau in dB, y = P(SINR > tau), with stderr
  double no_satellite_rate = 0.0;
  std::vector<double> association;  ///< serving-type frequencies (open mode)
  double mean_capacity_bits = 0.0;  ///< mean log2(1 + SINR), outages count as 0
  double capacity_stderr = 0.0;
  std::size_t trials = 0;
};

/// Monte Carlo estimate for the typical user. Deterministic in
/// (model, mode, tau grid, n_trials, seed) for any worker count.
EstimateResult estimate(const NetworkModel& model, Access mode, std::span<const double> tau_db,
                        std::size_t n_trials, std::uint64_t seed);

/// Several access modes evaluated on the same realisations and fading
/// draws; result i belongs to modes[i].
std::vector<EstimateResult> estimate_modes(const NetworkModel& model, std::span<const Access> modes,
                                           std::span<const double> tau_db, std::size_t n_trials,
                                           std::uint64_t seed);

/// Fraction of trials with no visible satellite of any type / of type k.
struct NoSatelliteEstimate {
  std::vector<double> per_type;
  double any = 0.0;
  std::size_t trials = 0;
};

NoSatelliteEstimate estimate_no_satellite(const NetworkModel& model, std::size_t n_trials,
                                          std::uint64_t seed);

/// Nearest-visible-distance samples (any type) for a user at `user`, one per
/// independent realisation; infinity when nothing is visible.
std::vector<double> nearest_distance_samples(const NetworkModel& model, const geometry::Vec3& user,
                                             std::size_t n, std::uint64_t seed);

struct IsotropyResult {
  double statistic;
  double p_value;
  bool passed;  ///< p_value > 0.01
};

/// Two-sample KS comparison of nearest-distance samples at the pole and at
/// 45 degrees latitude.
IsotropyResult isotropy_check(const NetworkModel& model, std::size_t n, std::uint64_t seed);

}  // namespace leocox::mc
