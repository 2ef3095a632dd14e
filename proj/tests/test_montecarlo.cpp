#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include <boost/math/distributions/poisson.hpp>

#include "leocox/analytic.hpp"
#include "leocox/montecarlo.hpp"
#include "leocox/stats.hpp"

using namespace leocox;
using namespace leocox::mc;

namespace {

constexpr double re = kEarthRadiusKm;
constexpr double kInf = std::numeric_limits<double>::infinity();

NetworkModel network(std::vector<ConstellationSpec> specs, double noise = 0.0) {
  NetworkModel m;
  m.constellations = std::move(specs);
  m.propagation.noise_w = noise;
  return m;
}

struct Moments {
  double mean = 0.0, stderr_ = 0.0;
};

Moments moments(const std::vector<double>& v) {
  double s = 0.0, sq = 0.0;
  for (double x : v) {
    s += x;
    sq += x * x;
  }
  const double n = static_cast<double>(v.size());
  const double m = s / n;
  return {m, std::sqrt((sq / n - m * m) / n)};
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(CounterRng::philox(A4{0, 0, 0, 0}, A2{0, 0}) ==
        A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(CounterRng::philox(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(CounterRng::philox(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("CounterRng streams") {
  CounterRng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs_c |= x != c();
    differs_d |= x != d();
  }
  CHECK(differs_c);
  CHECK(differs_d);
  double s = 0.0;
  CounterRng u(1, 2);
  for (int i = 0; i < 100000; ++i) {
    const double v = u.uniform();
    CHECK_UNARY(v >= 0.0 && v < 1.0);
    s += v;
  }
  CHECK(s / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("statistical helpers") {
  CHECK(stats::kolmogorov_q(0.0) == 1.0);
  CHECK(stats::kolmogorov_q(1.0) == doctest::Approx(0.2699996716735).epsilon(1e-9));
  CHECK(stats::kolmogorov_q(1.36) == doctest::Approx(0.0494).epsilon(0.01));
  const std::vector<double> x = {1, 2, 3, 4, 5};
  CHECK(stats::ks_two_sample(x, x).statistic == 0.0);
  CHECK(stats::ks_two_sample(x, x).p_value == 1.0);
  const std::vector<double> y = {6, 7, 8, 9, 10};
  CHECK(stats::ks_two_sample(x, y).statistic == 1.0);
  const std::vector<double> z = {1, 2, kInf, kInf};
  CHECK(stats::ks_two_sample(x, z).statistic == doctest::Approx(0.5));
  CHECK(stats::chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("sample_network mean counts") {
  const auto m = network({{8, 12, 7000}, {4, 30, 7500}});
  std::vector<double> total(10000), orbits(10000);
  std::vector<double> hist(30, 0.0);
  for (std::size_t i = 0; i < total.size(); ++i) {
    CounterRng rng(3, i);
    const auto net = sample_network(m, rng);
    total[i] = static_cast<double>(net.satellite_count());
    const auto n0 = net.types[0].size();
    orbits[i] = static_cast<double>(n0);
    hist[std::min<std::size_t>(n0, 29)] += 1.0;
  }
  const auto t = moments(total);
  CHECK(std::abs(t.mean - (8 * 12 + 4 * 30)) < 4 * t.stderr_);

  // orbit count of type 1 against Poisson(8), pooling the tails
  const boost::math::poisson_distribution<double> pois(8.0);
  std::vector<double> obs, expct;
  double o_tail = 0.0;
  for (int k = 0; k < 30; ++k) {
    if (k < 2 || k > 16) {
      o_tail += hist[k];
      continue;
    }
    obs.push_back(hist[k]);
    expct.push_back(1e4 * boost::math::pdf(pois, k));
  }
  obs.push_back(o_tail);
  expct.push_back(1e4 * (boost::math::cdf(pois, 1) + boost::math::cdf(boost::math::complement(pois, 16))));
  CHECK(stats::chi_square_gof(obs, expct) > 0.01);
}

TEST_CASE("satellites lie on their orbit sphere") {
  const auto m = network({{20, 30, 6950}, {5, 10, 8000}});
  CounterRng rng(1, 1);
  const auto net = sample_network(m, rng);
  for (std::size_t k = 0; k < net.types.size(); ++k) {
    for (const auto& x : net.positions(k)) {
      CHECK(std::abs(x.norm() - m[k].radius_km) <= 1e-9 * m[k].radius_km);
    }
  }
}

TEST_CASE("mean visible count is lambda mu (1 - r_e / r) / 2") {
  const auto m = network({{10, 20, 7000}});
  const geometry::Vec3 user{0, 0, re};
  std::vector<double> counts(100000);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    CounterRng rng(8, i);
    counts[i] = static_cast<double>(observe(sample_network(m, rng), user, 1, rng).links.size());
  }
  const auto c = moments(counts);
  CHECK(std::abs(c.mean - 10 * 20 * (1 - re / 7000) / 2) < 4 * c.stderr_);
}

TEST_CASE("generalized sampler windows") {
  SUBCASE("zero lambda gives an empty type") {
    const OrbitLaw law{0.0, 10.0, 7000, 7000};
    CounterRng rng(1, 0);
    CHECK(sample_network_generalized(std::span(&law, 1), rng).satellite_count() == 0);
  }
  SUBCASE("point-mass radius window reproduces sample_network") {
    const auto m = network({{15, 12, 7000}});
    const OrbitLaw law{15, 12, 7000, 7000};
    CounterRng r1(5, 5), r2(5, 5);
    const auto a = sample_network(m, r1);
    const auto b = sample_network_generalized(std::span(&law, 1), r2);
    REQUIRE(a.types[0].size() == b.types[0].size());
    for (std::size_t i = 0; i < a.types[0].size(); ++i) {
      CHECK(a.types[0][i].inclination == b.types[0][i].inclination);
      CHECK(a.types[0][i].anomalies == b.types[0][i].anomalies);
    }
  }
  SUBCASE("inclination window pinned at pi/2") {
    const OrbitLaw law{30, 2, 7000, 7000, 0.0, kPi, kPi / 2, kPi / 2};
    CounterRng rng(2, 0);
    const auto net = sample_network_generalized(std::span(&law, 1), rng);
    for (const auto& o : net.types[0]) {
      CHECK(std::abs(o.inclination - kPi / 2) < 1e-15);
    }
  }
  SUBCASE("uniform radius window has the midpoint mean") {
    const OrbitLaw law{1000, 0.0, 6800, 7200};
    std::vector<double> radii;
    for (std::size_t i = 0; radii.size() < 100000; ++i) {
      CounterRng rng(4, i);
      const auto net = sample_network_generalized(std::span(&law, 1), rng);
      for (const auto& o : net.types[0]) {
        CHECK(o.radius >= 6800);
        CHECK(o.radius <= 7200);
        radii.push_back(o.radius);
      }
    }
    const auto r = moments(radii);
    CHECK(std::abs(r.mean - 7000) < 4 * r.stderr_);
  }
  SUBCASE("invalid windows are rejected") {
    const OrbitLaw below{1, 1, 6000, 7000};
    const OrbitLaw swapped{1, 1, 7200, 7000};
    const OrbitLaw lon{1, 1, 7000, 7000, 0.0, 4.0};
    for (const auto& law : {below, swapped, lon}) CHECK_THROWS_AS(law.validate(), std::invalid_argument);
  }
}

TEST_CASE("inclinations follow the sin/2 density") {
  const OrbitLaw law{2000, 0.0, 7000, 7000};
  std::vector<double> obs(20, 0.0), expct(20);
  std::size_t n = 0;
  for (std::size_t i = 0; n < 100000; ++i) {
    CounterRng rng(6, i);
    const auto net = sample_network_generalized(std::span(&law, 1), rng);
    for (const auto& o : net.types[0]) {
      obs[std::min<std::size_t>(19, static_cast<std::size_t>(o.inclination / kPi * 20))] += 1;
      ++n;
    }
  }
  for (int b = 0; b < 20; ++b) {
    expct[b] = n * 0.5 * (std::cos(kPi * b / 20) - std::cos(kPi * (b + 1) / 20));
  }
  CHECK(stats::chi_square_gof(obs, expct) > 0.01);
}

TEST_CASE("visible-link sampler matches the full sampler") {
  const auto m = network({{12, 25, 6900}, {6, 30, 7600}});
  const geometry::Vec3 user{0, 0, re};
  const std::size_t n = 20000;
  std::vector<double> near_a(n), near_b(n), cnt_a(n), cnt_b(n);
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng ra(1, i), rb(2, i);
    const auto a = observe(sample_network(m, ra), user, 1, ra);
    const auto b = sample_visible_links(m, rb);
    near_a[i] = a.links.empty() ? kInf : a.links.front().distance;
    near_b[i] = b.links.empty() ? kInf : b.links.front().distance;
    cnt_a[i] = static_cast<double>(a.links.size());
    cnt_b[i] = static_cast<double>(b.links.size());
    for (std::size_t j = 1; j < b.links.size(); ++j) CHECK(b.links[j].distance >= b.links[j - 1].distance);
  }
  CHECK(stats::ks_two_sample(near_a, near_b).p_value > 0.01);
  const auto ma = moments(cnt_a), mb = moments(cnt_b);
  CHECK(std::abs(ma.mean - mb.mean) < 4 * std::hypot(ma.stderr_, mb.stderr_));
}

TEST_CASE("evaluate_sinr conventions") {
  auto m = network({{1, 1, 7000, 2.0, 10.0}, {1, 1, 7000, 3.0}}, 1e-6);
  SUBCASE("single visible satellite is noise limited") {
    LinkSet s{{{0, 800.0, 0.7}}};
    const auto r = evaluate_sinr(s, m, Access::closed(0));
    REQUIRE(r.serving_type.has_value());
    CHECK(r.sinr == doctest::Approx(2.0 * 10.0 * 0.7 * std::pow(800.0, -3.0) / 1e-6));
    CHECK(r.serving_distance == 800.0);
  }
  SUBCASE("no visible satellite of the serving type is an outage") {
    LinkSet s{{{1, 700.0, 1.0}}};
    const auto r = evaluate_sinr(s, m, Access::closed(0));
    CHECK_FALSE(r.serving_type.has_value());
    CHECK(r.serving_distance == kInf);
  }
  SUBCASE("closed access sees nearer satellites of other types as interference") {
    LinkSet s{{{1, 650.0, 1.2}, {0, 900.0, 0.5}, {0, 1500.0, 2.0}}};
    const auto r = evaluate_sinr(s, m, Access::closed(0));
    CHECK(r.nearest_interferer < r.serving_distance);
    const double signal = 2.0 * 10.0 * 0.5 * std::pow(900.0, -3.0);
    const double interference = 3.0 * 1.2 * std::pow(650.0, -3.0) + 2.0 * 2.0 * std::pow(1500.0, -3.0);
    CHECK(r.sinr == doctest::Approx(signal / (1e-6 + interference)));
    const auto o = evaluate_sinr(s, m, Access::open());
    CHECK(*o.serving_type == 1);
    CHECK(o.nearest_interferer >= o.serving_distance);
  }
}

TEST_CASE("open serving distance never exceeds closed serving distance") {
  const auto m = network({{20, 20, 6950, 1, 100}, {20, 20, 7200}});
  const geometry::Vec3 user{0, 0, re};
  for (std::size_t i = 0; i < 2000; ++i) {
    CounterRng rng(10, i);
    const auto links = observe(sample_network(m, rng), user, 1, rng);
    const auto o = evaluate_sinr(links, m, Access::open());
    for (std::size_t k = 0; k < 2; ++k) {
      const auto c = evaluate_sinr(links, m, Access::closed(k));
      CHECK(o.serving_distance <= c.serving_distance);
    }
    CHECK(o.nearest_interferer >= o.serving_distance);
    CHECK(o.sinr >= 0.0);
  }
}

TEST_CASE("estimate") {
  const auto m = network({{30, 20, 6950, 1, 100}, {20, 30, 7100}});
  SUBCASE("a single trial gives 0 or 1") {
    const auto r = estimate(m, Access::open(), std::vector<double>{3.0}, 1, 7);
    CHECK((r.coverage[0].y == 0.0 || r.coverage[0].y == 1.0));
  }
  SUBCASE("coverage is nonincreasing in tau") {
    std::vector<double> tau;
    for (double t = -20; t <= 30; t += 2) tau.push_back(t);
    const auto r = estimate(m, Access::closed(0), tau, 5000, 3);
    for (std::size_t i = 1; i < r.coverage.size(); ++i) CHECK(r.coverage[i].y <= r.coverage[i - 1].y);
  }
  SUBCASE("results are bit-identical for any worker count") {
    const std::vector<double> tau = {-5, 0, 5, 10};
    setenv("LEOCOX_WORKERS", "1", 1);
    const auto a = estimate(m, Access::open(), tau, 10000, 99);
    setenv("LEOCOX_WORKERS", "4", 1);
    const auto b = estimate(m, Access::open(), tau, 10000, 99);
    unsetenv("LEOCOX_WORKERS");
    for (std::size_t i = 0; i < tau.size(); ++i) CHECK(a.coverage[i].y == b.coverage[i].y);
    CHECK(a.mean_capacity_bits == b.mean_capacity_bits);
    CHECK(a.association == b.association);
  }
  SUBCASE("shared realisations across modes") {
    const std::vector<double> tau = {0.0};
    const Access modes[] = {Access::closed(0), Access::open()};
    const auto both = estimate_modes(m, modes, tau, 3000, 5);
    CHECK(both[0].coverage[0].y == estimate(m, Access::closed(0), tau, 3000, 5).coverage[0].y);
    CHECK(both[1].coverage[0].y == estimate(m, Access::open(), tau, 3000, 5).coverage[0].y);
  }
  SUBCASE("argument checks") {
    CHECK_THROWS(estimate(m, Access::open(), std::vector<double>{0.0}, 0, 1));
    CHECK_THROWS(estimate(m, Access::closed(2), std::vector<double>{0.0}, 10, 1));
  }
}

TEST_CASE("empirical no-satellite rate matches the analytic value") {
  const auto m = network({{10, 10, re + 400}, {6, 15, re + 500}});
  const std::size_t n = 400000;
  const auto est = estimate_no_satellite(m, n, 77);
  const double p = analytic::no_satellite_open(m);
  CHECK(std::abs(est.any - p) < 3 * std::sqrt(p * (1 - p) / n));
  for (std::size_t k = 0; k < 2; ++k) {
    const double pk = analytic::no_satellite_closed(m[k]);
    CHECK(std::abs(est.per_type[k] - pk) < 3 * std::sqrt(pk * (1 - pk) / n));
  }
  const auto open = estimate(m, Access::open(), std::vector<double>{0.0}, n, 77);
  CHECK(std::abs(open.no_satellite_rate - p) < 3 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("isotropy check") {
  const auto m = network({{20, 20, 6950}});
  const auto user = geometry::surface_point(0.3, 1.0);
  const auto a = nearest_distance_samples(m, user, 2000, 5);
  const auto b = nearest_distance_samples(m, user, 2000, 5);
  CHECK(stats::ks_two_sample(a, b).statistic == 0.0);
  // at most 2 of 20 seeds may reject at the 1% level
  int rejected = 0;
  for (std::uint64_t seed = 10; seed < 30; ++seed) rejected += !isotropy_check(m, 10000, seed).passed;
  CHECK(rejected <= 2);
  CHECK_THROWS_AS(isotropy_check(m, 100, 1), std::invalid_argument);
}
