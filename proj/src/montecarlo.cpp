#include "leocox/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "leocox/parallel.hpp"
#include "leocox/stats.hpp"

namespace leocox::mc {

namespace {

constexpr double kRe = kEarthRadiusKm;
constexpr double kInf = std::numeric_limits<double>::infinity();

int draw_poisson(double mean, CounterRng& rng) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<int> dist(mean);
  return dist(rng);
}

void sort_links(LinkSet& set) {
  std::sort(set.links.begin(), set.links.end(),
            [](const Link& a, const Link& b) { return a.distance < b.distance; });
}

}  // namespace

geometry::Vec3 SampledOrbit::position(double omega) const {
  return geometry::OrbitGeom(radius, longitude, inclination).position(omega);
}

std::size_t SampledNetwork::satellite_count(std::size_t k) const {
  std::size_t n = 0;
  for (const auto& o : types.at(k)) n += o.anomalies.size();
  return n;
}

std::size_t SampledNetwork::satellite_count() const {
  std::size_t n = 0;
  for (std::size_t k = 0; k < types.size(); ++k) n += satellite_count(k);
  return n;
}

std::vector<geometry::Vec3> SampledNetwork::positions(std::size_t k) const {
  std::vector<geometry::Vec3> out;
  for (const auto& o : types.at(k)) {
    const geometry::OrbitGeom g(o.radius, o.longitude, o.inclination);
    for (double w : o.anomalies) out.push_back(g.position(w));
  }
  return out;
}

void OrbitLaw::validate() const {
  if (!(lambda >= 0.0) || !(mu >= 0.0)) throw std::invalid_argument("OrbitLaw: negative mean");
  if (!(radius_min > kRe) || radius_max < radius_min) {
    throw std::invalid_argument("OrbitLaw: radius window must satisfy r_e < r_a <= r_b");
  }
  if (longitude_min < 0.0 || longitude_max > kPi || longitude_max < longitude_min) {
    throw std::invalid_argument("OrbitLaw: longitude window must lie in [0, pi)");
  }
  if (inclination_min < 0.0 || inclination_max > kPi || inclination_max < inclination_min) {
    throw std::invalid_argument("OrbitLaw: inclination window must lie in [0, pi]");
  }
}

SampledNetwork sample_network_generalized(std::span<const OrbitLaw> laws, CounterRng& rng) {
  SampledNetwork net;
  net.types.resize(laws.size());
  for (std::size_t k = 0; k < laws.size(); ++k) {
    const auto& law = laws[k];
    law.validate();
    const int n_orbits = draw_poisson(law.lambda, rng);
    auto& orbits = net.types[k];
    orbits.reserve(n_orbits);
    // inverse CDF of the sin density on [inclination_min, inclination_max]
    const double c_lo = std::cos(law.inclination_min), c_hi = std::cos(law.inclination_max);
    for (int i = 0; i < n_orbits; ++i) {
      SampledOrbit o;
      o.radius = law.radius_min + (law.radius_max - law.radius_min) * rng.uniform();
      o.longitude = law.longitude_min + (law.longitude_max - law.longitude_min) * rng.uniform();
      o.inclination = std::acos(std::clamp(c_lo - (c_lo - c_hi) * rng.uniform(), -1.0, 1.0));
      if (o.longitude >= kPi) o.longitude = std::nextafter(kPi, 0.0);
      const int n_sats = draw_poisson(law.mu, rng);
      o.anomalies.resize(n_sats);
      for (auto& w : o.anomalies) w = 2.0 * kPi * rng.uniform();
      orbits.push_back(std::move(o));
    }
  }
  return net;
}

SampledNetwork sample_network(const NetworkModel& model, CounterRng& rng) {
  std::vector<OrbitLaw> laws;
  for (const auto& c : model.constellations) {
    laws.push_back({c.lambda, c.mu, c.radius_km, c.radius_km});
  }
  return sample_network_generalized(laws, rng);
}

double draw_fading(int m, CounterRng& rng) {
  if (m == 1) return -std::log1p(-rng.uniform());
  std::gamma_distribution<double> dist(m, 1.0 / m);
  return dist(rng);
}

LinkSet observe(const SampledNetwork& net, const geometry::Vec3& user, int nakagami_m,
                CounterRng& rng) {
  LinkSet set;
  const double re2 = user.dot(user);
  for (std::size_t k = 0; k < net.types.size(); ++k) {
    for (const auto& o : net.types[k]) {
      const geometry::OrbitGeom g(o.radius, o.longitude, o.inclination);
      for (double w : o.anomalies) {
        const auto x = g.position(w);
        if (x.dot(user) < re2) continue;  // below the horizon
        set.links.push_back({static_cast<int>(k), (x - user).norm(), draw_fading(nakagami_m, rng)});
      }
    }
  }
  sort_links(set);
  return set;
}

LinkSet observe_positions(std::span<const std::vector<geometry::Vec3>> positions,
                          const geometry::Vec3& user, int nakagami_m, CounterRng& rng) {
  LinkSet set;
  const double re2 = user.dot(user);
  for (std::size_t k = 0; k < positions.size(); ++k) {
    for (const auto& x : positions[k]) {
      if (x.dot(user) < re2) continue;
      set.links.push_back({static_cast<int>(k), (x - user).norm(), draw_fading(nakagami_m, rng)});
    }
  }
  sort_links(set);
  return set;
}

LinkSet sample_visible_links(const NetworkModel& model, CounterRng& rng) {
  LinkSet set;
  const int m = model.propagation.nakagami_m;
  for (std::size_t k = 0; k < model.size(); ++k) {
    const auto& c = model[k];
    const double r = c.radius_km;
    const double rim = std::acos(kRe / r);
    const double sin_rim = std::sin(rim);
    const double a = r * r + kRe * kRe, b = 2.0 * r * kRe;
    const double zmin = r - kRe;
    // orbits reaching above the horizon: |inclination - pi/2| < rim
    const int n_orbits = draw_poisson(c.lambda * sin_rim, rng);
    for (int i = 0; i < n_orbits; ++i) {
      const double comp = std::asin(sin_rim * rng.uniform());
      const double w2 = geometry::half_arc(rim, comp);
      const int n = draw_poisson(c.mu * w2 / kPi, rng);
      const double cc = std::cos(comp);
      for (int j = 0; j < n; ++j) {
        const double w = w2 * (2.0 * rng.uniform() - 1.0);
        const double d = std::sqrt(std::max(a - b * std::cos(w) * cc, zmin * zmin));
        set.links.push_back({static_cast<int>(k), d, draw_fading(m, rng)});
      }
    }
  }
  sort_links(set);
  return set;
}

SinrSample evaluate_sinr(const LinkSet& set, const NetworkModel& model, Access mode) {
  SinrSample out;
  out.mode = mode;
  out.serving_distance = kInf;
  out.nearest_interferer = kInf;
  const auto& links = set.links;
  std::size_t serving = links.size();
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (mode.kind == Access::Kind::open || static_cast<std::size_t>(links[i].type) == mode.type) {
      serving = i;
      break;
    }
  }
  if (serving == links.size()) return out;
  const double alpha = model.propagation.alpha;
  double interference = 0.0;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (i == serving) continue;
    const auto& l = links[i];
    interference += model[l.type].tx_power_w * l.fading * std::pow(l.distance, -alpha);
    out.nearest_interferer = std::min(out.nearest_interferer, l.distance);
  }
  const auto& s = links[serving];
  const auto& spec = model[s.type];
  const double signal = spec.tx_power_w * spec.gain * s.fading * std::pow(s.distance, -alpha);
  out.serving_type = static_cast<std::size_t>(s.type);
  out.serving_distance = s.distance;
  const double denom = model.propagation.noise_w + interference;
  out.sinr = denom > 0.0 ? signal / denom : kInf;
  return out;
}

SinrSample evaluate_sinr(const SampledNetwork& net, const NetworkModel& model, Access mode,
                         CounterRng& rng) {
  const geometry::Vec3 user{0.0, 0.0, kRe};
  return evaluate_sinr(observe(net, user, model.propagation.nakagami_m, rng), model, mode);
}

namespace {

constexpr std::size_t kChunk = 2048;

struct Tally {
  std::vector<std::uint64_t> covered;
  std::vector<std::uint64_t> served_by;
  std::uint64_t outages = 0;
  double capacity = 0.0;
  double capacity_sq = 0.0;
};

}  // namespace

std::vector<EstimateResult> estimate_modes(const NetworkModel& model, std::span<const Access> modes,
                                           std::span<const double> tau_db, std::size_t n_trials,
                                           std::uint64_t seed) {
  require_valid(model);
  if (n_trials < 1) throw std::invalid_argument("estimate: n_trials must be >= 1");
  for (const auto& mode : modes) {
    if (mode.kind == Access::Kind::closed && mode.type >= model.size()) {
      throw std::out_of_range("estimate: serving type out of range");
    }
  }
  std::vector<double> tau(tau_db.size());
  for (std::size_t i = 0; i < tau.size(); ++i) tau[i] = db_to_linear(tau_db[i]);

  const std::size_t chunks = (n_trials + kChunk - 1) / kChunk;
  const std::size_t M = modes.size();
  std::vector<std::vector<Tally>> tallies(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<Tally> t(M);
    for (auto& x : t) {
      x.covered.assign(tau.size(), 0);
      x.served_by.assign(model.size(), 0);
    }
    const std::size_t end = std::min(n_trials, (c + 1) * kChunk);
    for (std::size_t trial = c * kChunk; trial < end; ++trial) {
      CounterRng rng(seed, trial);
      const auto links = sample_visible_links(model, rng);
      for (std::size_t j = 0; j < M; ++j) {
        const auto s = evaluate_sinr(links, model, modes[j]);
        auto& x = t[j];
        if (!s.serving_type) {
          ++x.outages;
          continue;
        }
        ++x.served_by[*s.serving_type];
        for (std::size_t i = 0; i < tau.size(); ++i) x.covered[i] += s.sinr > tau[i];
        const double cap = std::log2(1.0 + s.sinr);
        x.capacity += cap;
        x.capacity_sq += cap * cap;
      }
    }
    tallies[c] = std::move(t);
  });

  const double n = static_cast<double>(n_trials);
  std::vector<EstimateResult> out(M);
  for (std::size_t j = 0; j < M; ++j) {
    std::vector<std::uint64_t> covered(tau.size(), 0), served(model.size(), 0);
    std::uint64_t outages = 0;
    double capacity = 0.0, capacity_sq = 0.0;
    for (const auto& chunk : tallies) {
      const auto& t = chunk[j];
      for (std::size_t i = 0; i < tau.size(); ++i) covered[i] += t.covered[i];
      for (std::size_t k = 0; k < served.size(); ++k) served[k] += t.served_by[k];
      outages += t.outages;
      capacity += t.capacity;
      capacity_sq += t.capacity_sq;
    }
    auto& r = out[j];
    r.trials = n_trials;
    for (std::size_t i = 0; i < tau.size(); ++i) {
      const double p = covered[i] / n;
      r.coverage.push_back(tau_db[i], p, std::sqrt(p * (1.0 - p) / n));
    }
    r.no_satellite_rate = outages / n;
    for (auto s : served) r.association.push_back(s / n);
    r.mean_capacity_bits = capacity / n;
    const double var = std::max(0.0, capacity_sq / n - r.mean_capacity_bits * r.mean_capacity_bits);
    r.capacity_stderr = std::sqrt(var / n);
  }
  return out;
}

EstimateResult estimate(const NetworkModel& model, Access mode, std::span<const double> tau_db,
                        std::size_t n_trials, std::uint64_t seed) {
  const Access modes[] = {mode};
  return std::move(estimate_modes(model, modes, tau_db, n_trials, seed).front());
}

NoSatelliteEstimate estimate_no_satellite(const NetworkModel& model, std::size_t n_trials,
                                          std::uint64_t seed) {
  require_valid(model);
  if (n_trials < 1) throw std::invalid_argument("estimate_no_satellite: n_trials must be >= 1");
  const std::size_t chunks = (n_trials + kChunk - 1) / kChunk;
  const std::size_t K = model.size();
  std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(K + 1, 0));
  parallel_for(chunks, [&](std::size_t c) {
    auto& cnt = counts[c];
    const std::size_t end = std::min(n_trials, (c + 1) * kChunk);
    for (std::size_t trial = c * kChunk; trial < end; ++trial) {
      CounterRng rng(seed, trial);
      bool any = false;
      for (std::size_t k = 0; k < K; ++k) {
        const auto& spec = model[k];
        const double rim = std::acos(kRe / spec.radius_km);
        const double sin_rim = std::sin(rim);
        const int n_orbits = draw_poisson(spec.lambda * sin_rim, rng);
        bool visible = false;
        for (int i = 0; i < n_orbits && !visible; ++i) {
          const double comp = std::asin(sin_rim * rng.uniform());
          visible = draw_poisson(spec.mu * geometry::half_arc(rim, comp) / kPi, rng) > 0;
        }
        if (!visible) ++cnt[k];
        any = any || visible;
      }
      if (!any) ++cnt[K];
    }
  });
  NoSatelliteEstimate out;
  out.trials = n_trials;
  std::vector<std::uint64_t> total(K + 1, 0);
  for (const auto& c : counts)
    for (std::size_t i = 0; i <= K; ++i) total[i] += c[i];
  for (std::size_t k = 0; k < K; ++k) out.per_type.push_back(total[k] / static_cast<double>(n_trials));
  out.any = total[K] / static_cast<double>(n_trials);
  return out;
}

std::vector<double> nearest_distance_samples(const NetworkModel& model, const geometry::Vec3& user,
                                             std::size_t n, std::uint64_t seed) {
  std::vector<double> out(n, kInf);
  const double re2 = user.dot(user);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t trial = c * kChunk; trial < end; ++trial) {
      CounterRng rng(seed, trial);
      const auto net = sample_network(model, rng);
      double best = kInf;
      for (const auto& orbits : net.types) {
        for (const auto& o : orbits) {
          const geometry::OrbitGeom g(o.radius, o.longitude, o.inclination);
          for (double w : o.anomalies) {
            const auto x = g.position(w);
            if (x.dot(user) < re2) continue;
            best = std::min(best, (x - user).norm());
          }
        }
      }
      out[trial] = best;
    }
  });
  return out;
}

IsotropyResult isotropy_check(const NetworkModel& model, std::size_t n, std::uint64_t seed) {
  if (n < 10000) throw std::invalid_argument("isotropy_check: n must be at least 1e4");
  const auto pole = nearest_distance_samples(model, geometry::surface_point(kPi / 2, 0.0), n, seed);
  const auto mid = nearest_distance_samples(model, geometry::surface_point(kPi / 4, 0.0), n,
                                            seed ^ 0x5bd1e9955bd1e995ull);
  const auto ks = stats::ks_two_sample(pole, mid);
  return {ks.statistic, ks.p_value, ks.p_value > 0.01};
}

}  // namespace leocox::mc
