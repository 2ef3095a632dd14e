// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "leocox/analytic.hpp"
#include "leocox/constellation.hpp"
#include "leocox/geometry.hpp"
#include "leocox/montecarlo.hpp"
#include "leocox/stats.hpp"

using namespace leocox;
namespace an = leocox::analytic;
namespace cs = leocox::constellation;

namespace {

constexpr double re = kEarthRadiusKm;

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  failures += !ok;
}

void info(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0) {
  std::printf("    ");
  std::printf(fmt, a, b, c, d);
  std::printf("\n");
}

std::vector<double> tau_grid() {
  std::vector<double> t;
  for (double x = -10.0; x <= 20.0 + 1e-9; x += 2.5) t.push_back(x);
  return t;
}

NetworkModel model_of(std::vector<ConstellationSpec> specs, double alpha = 3.0, double noise = 0.0) {
  NetworkModel m;
  m.constellations = std::move(specs);
  m.propagation.alpha = alpha;
  m.propagation.noise_w = noise;
  return m;
}

struct Agreement {
  double worst_excess = -1.0;  // max of |a - mc| - tol
  double worst_abs = 0.0;
  void add(double a, double mc, double se) {
    const double tol = std::max(1e-2, 3 * se);
    worst_excess = std::max(worst_excess, std::abs(a - mc) - tol);
    worst_abs = std::max(worst_abs, std::abs(a - mc));
  }
  bool ok() const { return worst_excess <= 0.0; }
};

// Per-grid-point analytic curves, closed for every type and open.
struct Curves {
  std::vector<Curve> closed;
  Curve open;
};

bool dominates(const Curves& c) {
  for (const auto& cl : c.closed) {
    for (std::size_t i = 0; i < cl.size(); ++i) {
      if (c.open[i].y < cl[i].y - 1e-6) return false;
    }
  }
  return true;
}

// SINR threshold (dB) exceeded with probability `level`.
double percentile_db(const std::function<double(double)>& coverage_db, double level) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 40; ++i) {
    const double mid = 0.5 * (lo + hi);
    (coverage_db(mid) > level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double percentile_gap(const NetworkModel& m, double* closed_out = nullptr, double* open_out = nullptr) {
  const an::QuadratureSettings q{1e-7, 1e-10, 30};
  const double c = percentile_db([&](double t) { return an::coverage_closed(m, 0, db_to_linear(t), q); }, 0.9);
  const double o = percentile_db([&](double t) { return an::coverage_open(m, db_to_linear(t), q); }, 0.9);
  if (closed_out) *closed_out = c;
  if (open_out) *open_out = o;
  return o - c;
}

std::vector<Curves> dominance_grids;

void criterion1() {
  const auto tau = tau_grid();
  Agreement agr;
  for (double l2 : {20.0, 40.0, 60.0}) {
    const auto m = model_of({{40, 30, 6950, 1, 100}, {l2, 30, 6950, 1, 100}});
    const auto a = an::coverage_closed_curve(m, 0, tau);
    const auto e = mc::estimate(m, mc::Access::closed(0), tau, 1000000, 101 + static_cast<int>(l2));
    for (std::size_t i = 0; i < tau.size(); ++i) agr.add(a[i].y, e.coverage[i].y, *e.coverage[i].stderr_);
    Curves c{{a, an::coverage_closed_curve(m, 1, tau)}, an::coverage_open_curve(m, tau)};
    dominance_grids.push_back(std::move(c));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "closed-access analytic vs 1e6-trial MC, K=2, lambda2 in {20,40,60}: max |diff| %.4f", agr.worst_abs);
  report(1, agr.ok(), buf);
}

void criterion2() {
  const auto tau = tau_grid();
  Agreement agr;
  std::vector<NetworkModel> models = {
      model_of({{36, 20, re + 550, 1, 100}, {36, 20, re + 550, 1, 100}}),
      model_of({{36, 20, re + 550, 1, 100}, {36, 20, re + 550, 1, 100}, {36, 20, re + 550, 1, 100},
                {36, 20, re + 550, 1, 100}})};
  for (std::size_t j = 0; j < models.size(); ++j) {
    const auto& m = models[j];
    const auto a = an::coverage_open_curve(m, tau);
    const auto e = mc::estimate(m, mc::Access::open(), tau, 1000000, 201 + j);
    for (std::size_t i = 0; i < tau.size(); ++i) agr.add(a[i].y, e.coverage[i].y, *e.coverage[i].stderr_);
    Curves c{{}, a};
    for (std::size_t k = 0; k < m.size(); ++k) c.closed.push_back(an::coverage_closed_curve(m, k, tau));
    dominance_grids.push_back(std::move(c));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "open-access analytic vs 1e6-trial MC, K in {2,4}: max |diff| %.4f",
                agr.worst_abs);
  report(2, agr.ok(), buf);
}

void criterion3() {
  bool dom = true;
  for (const auto& c : dominance_grids) dom = dom && dominates(c);
  const std::vector<ConstellationSpec> four(4, ConstellationSpec{36, 20, re + 550, 1, 100});
  double c0 = 0, o0 = 0, c1 = 0, o1 = 0;
  const double gap_default = percentile_gap(model_of(four, 3.0, 0.0), &c0, &o0);
  const double gap = percentile_gap(model_of(four, 2.5, 4.4991e-07), &c1, &o1);
  info("alpha=3, noise=0: 90%% SINR closed %.2f dB, open %.2f dB, gap %.2f dB", c0, o0, gap_default);
  info("alpha=2.5, noise=4.4991e-07 W: 90%% SINR closed %.2f dB, open %.2f dB, gap %.2f dB", c1, o1, gap);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "open >= closed on all %zu grids; K=4 90th-percentile gap %.2f dB (target 2.5 +/- 1)",
                dominance_grids.size(), gap);
  report(3, dom && std::abs(gap - 2.5) <= 1.0, buf);
}

void criterion4() {
  const std::size_t n = 10000000;
  const auto sparse = model_of({ConstellationSpec::from_altitude(25, 22, 400)});
  const auto dense = model_of({ConstellationSpec::from_altitude(40, 22, 650)});
  const double pa = an::no_satellite_open(sparse);
  const double pm = mc::estimate_no_satellite(sparse, n, 401).any;
  const double se = std::sqrt(pa * (1 - pa) / n);
  const double qa = an::no_satellite_open(dense);
  const double qm = mc::estimate_no_satellite(dense, n, 402).any;
  info("lambda=25 mu=22 400 km: analytic %.3e, MC %.3e", pa, pm);
  info("lambda=40 mu=22 650 km: analytic %.3e, MC %.3e", qa, qm);
  const bool ok = pa >= 5e-4 && pa <= 2e-3 && pm >= 5e-4 && pm <= 2e-3 && std::abs(pa - pm) < 4 * se &&
                  qa < 1e-5 && qm < 1e-5;
  char buf[200];
  std::snprintf(buf, sizeof buf, "no-satellite probability %.2e in [5e-4, 2e-3]; dense shell %.1e < 1e-5", pa, qa);
  report(4, ok, buf);
}

void criterion5() {
  const std::size_t n = 200000;
  const std::vector<double> grid = {10, 20, 30, 40, 50};
  double worst = 0.0;
  bool mono = true;
  int seed = 500;
  for (int which = 0; which < 2; ++which) {
    double prev = -1.0;
    for (double v : grid) {
      const double lambda1 = which == 0 ? v : 30.0, mu1 = which == 0 ? 30.0 : v;
      const auto m = model_of({{lambda1, mu1, 7000}, {30, 30, 7000}});
      const double a = an::association_probability(m, 0);
      const auto e = mc::estimate(m, mc::Access::open(), std::vector<double>{0.0}, n, ++seed);
      worst = std::max(worst, std::abs(a - e.association[0]));
      mono = mono && a > prev;
      prev = a;
    }
  }
  const double hi = an::association_probability(model_of({{30, 30, 7000}, {30, 30, 7000}}), 0);
  const double lo = an::association_probability(model_of({{30, 30, 6900}, {30, 30, 7000}}), 0);
  info("P(A1) at r1=7000: %.4f, at r1=6900: %.4f", hi, lo);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "association sweeps over lambda1, mu1: max |analytic - MC| %.4f, monotone %s, lower orbit wins %s",
                worst, mono ? "yes" : "no", lo > hi ? "yes" : "no");
  report(5, worst <= 5e-3 && mono && lo > hi, buf);
}

void criterion6() {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> L(5, 60), M(5, 50), H(300, 1500);
  std::uniform_int_distribution<int> K(1, 4);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    NetworkModel m;
    const int k = K(gen);
    for (int j = 0; j < k; ++j) m.constellations.push_back(ConstellationSpec::from_altitude(L(gen), M(gen), H(gen)));
    double s = an::no_satellite_open(m);
    for (int j = 0; j < k; ++j) s += an::association_probability(m, j);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "association + no-satellite sums to 1 on 20 random models: max error %.2e", worst);
  report(6, worst <= 1e-6, buf);
}

void criterion7() {
  const auto cox = mc::isotropy_check(model_of({{36, 20, re + 550}}), 100000, 701);
  const auto shells = cs::load_shell_table(LEOCOX_SOURCE_DIR "/data/starlink_oneweb.csv");
  const std::vector<std::vector<geometry::Vec3>> walker = {cs::generate_walker(shells[0])};
  const auto w = cs::isotropy_check(walker, 100000, 702);
  char buf[200];
  std::snprintf(buf, sizeof buf, "KS pole vs 45 deg: Cox p = %.3f (passes), Walker 43 deg p = %.2e (fails)",
                cox.p_value, w.p_value);
  report(7, cox.passed && !w.passed, buf);
}

void criterion8() {
  const auto shells = cs::load_shell_table(LEOCOX_SOURCE_DIR "/data/starlink_oneweb.csv");
  std::vector<geometry::Vec3> starlink;
  double star_radius = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto sub = cs::co_channel_subset(cs::generate_walker(shells[i]), 8);
    starlink.insert(starlink.end(), sub.begin(), sub.end());
    star_radius += shells[i].radius_km() / 3;
  }
  const auto oneweb = cs::generate_walker(shells[3]);
  const double radii[] = {star_radius, shells[3].radius_km()};
  const double mus[] = {15, 54};
  const double gains[] = {100, 1};
  cs::DeterministicSystem sys{{starlink, oneweb}, model_of({{1, 1, star_radius, 1, 100}, {1, 1, radii[1], 1, 1}})};

  std::vector<double> tau;
  for (double t = -20; t <= 30; t += 1) tau.push_back(t);
  bool round_trip = true, gap_ok = true;
  double worst_gap = 0.0;
  for (double lat : {0.0, 30.0}) {
    NetworkModel cox = model_of({});
    for (std::size_t k = 0; k < 2; ++k) {
      const auto vis = cs::mean_visible(sys.types[k], lat, 20000, 801);
      const auto fit = cs::fit_cox(vis.mean, radii[k], cs::FitStrategy::fix_mu(mus[k]), lat);
      cox.constellations.push_back(fit.spec(1, gains[k]));
      NetworkModel one = model_of({fit.spec()});
      const std::size_t n = 100000;
      double s = 0, sq = 0;
      for (std::size_t i = 0; i < n; ++i) {
        mc::CounterRng rng(803 + k, i);
        const double c = static_cast<double>(mc::sample_visible_links(one, rng).links.size());
        s += c;
        sq += c * c;
      }
      const double mean = s / n, se = std::sqrt((sq / n - mean * mean) / n);
      const bool ok = std::abs(mean - vis.mean) <= 3 * std::hypot(se, vis.stderr_);
      round_trip = round_trip && ok && std::abs(cs::mean_visible(fit.spec()) - vis.mean) <= 1e-9 * vis.mean;
      info("lat %.0f type %.0f: Walker mean visible %.2f, fitted Cox MC %.2f", lat, k + 1.0, vis.mean, mean);
    }
    const auto cmp = cs::compare_coverage(sys, cox, 0, lat, tau, 200000, 810);
    info("lat %.0f: Starlink closed-access gap %.3f dB", lat, cmp.max_gap_db);
    worst_gap = std::max(worst_gap, cmp.max_gap_db);
    gap_ok = gap_ok && cmp.max_gap_db < 1.5;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "moment-matching round trip %s; Walker vs fitted Cox coverage gap %.2f dB < 1.5",
                round_trip ? "within 3 stderr" : "outside 3 stderr", worst_gap);
  report(8, round_trip && gap_ok, buf);
}

void criterion9() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::string> broken;
  auto expect = [&](bool ok, const char* what) {
    if (!ok) broken.push_back(what);
  };

  const ConstellationSpec spec{30, 25, 6950};
  {
    double prev = 1.0;
    const auto lo = spec.radius_km - re, hi = std::sqrt(spec.radius_km * spec.radius_km - re * re);
    bool mono = true, cont = true;
    for (int i = 0; i <= 400; ++i) {
      const double v = lo + (hi - lo) * i / 400.0;
      const double f = an::nearest_ccdf(spec, v);
      mono = mono && f <= prev + 1e-12;
      if (i > 0) cont = cont && prev - f < 0.05;
      prev = f;
    }
    expect(mono, "nearest-distance CCDF monotone");
    expect(cont, "nearest-distance CCDF continuous");
    expect(std::abs(an::nearest_ccdf(spec, lo) - 1.0) < 1e-9, "CCDF is 1 at the minimum distance");
    expect(std::abs(an::nearest_ccdf(spec, hi) - an::no_satellite_closed(spec)) < 1e-7, "CCDF meets no-satellite at the horizon");
  }
  {
    const PropagationConfig prop;
    double prev = 1.0;
    bool ok = true;
    for (double s : {0.0, 1e6, 1e7, 1e8, 1e9, 1e10, 1e11}) {
      const double l = an::laplace_cross_interference(spec, s, prop);
      ok = ok && l >= 0.0 && l <= 1.0 && l <= prev + 1e-12;
      prev = l;
    }
    expect(ok, "interference Laplace transform in [0, 1] and nonincreasing");
  }
  {
    auto m = model_of({{30, 25, 6950, 1, 100}, {20, 30, 7200, 1, 1}});
    auto scaled = m;
    for (auto& c : scaled.constellations) c.tx_power_w *= 37.0;
    bool ok = true;
    for (double t : {-5.0, 0.0, 5.0, 10.0}) {
      ok = ok && std::abs(an::coverage_closed(m, 0, db_to_linear(t)) - an::coverage_closed(scaled, 0, db_to_linear(t))) < 1e-6;
      ok = ok && std::abs(an::coverage_open(m, db_to_linear(t)) - an::coverage_open(scaled, db_to_linear(t))) < 1e-6;
    }
    expect(ok, "coverage invariant to common power scaling at zero noise");
  }
  {
    bool ok = true;
    for (double x : {0.0, 0.3, 1.0, 2.5}) ok = ok && std::abs(fading_ccdf(x, 1) - std::exp(-x)) < 1e-15;
    for (int m : {1, 2, 4}) {
      for (double s : {0.2, 1.0, 5.0}) ok = ok && std::abs(fading_laplace(s, m) - std::pow(1 + s / m, -m)) < 1e-13;
    }
    expect(ok, "fading identities");
  }
  {
    const mc::OrbitLaw law{2000, 0.0, 7000, 7000};
    std::vector<double> obs(20, 0.0), exp(20);
    std::size_t n = 0;
    for (std::size_t i = 0; n < 100000; ++i) {
      mc::CounterRng rng(901, i);
      const auto net = mc::sample_network_generalized(std::span(&law, 1), rng);
      for (const auto& o : net.types[0]) {
        obs[std::min<std::size_t>(19, static_cast<std::size_t>(o.inclination / kPi * 20))] += 1;
        ++n;
      }
    }
    for (int b = 0; b < 20; ++b) exp[b] = n * 0.5 * (std::cos(kPi * b / 20) - std::cos(kPi * (b + 1) / 20));
    expect(stats::chi_square_gof(obs, exp) > 0.01, "inclination chi-square");

    std::vector<double> lon(20, 0.0), lexp(20, n / 20.0);
    std::vector<double> ano(20, 0.0);
    std::size_t na = 0;
    const auto m = model_of({{8, 10, 7000}});
    for (std::size_t i = 0; na < 100000; ++i) {
      mc::CounterRng rng(902, i);
      const auto net = mc::sample_network(m, rng);
      for (const auto& o : net.types[0]) {
        for (double w : o.anomalies) {
          ano[std::min<std::size_t>(19, static_cast<std::size_t>(w / (2 * kPi) * 20))] += 1;
          ++na;
        }
      }
    }
    std::vector<double> aexp(20, na / 20.0);
    n = 0;
    for (std::size_t i = 0; n < 100000; ++i) {
      mc::CounterRng rng(903, i);
      const auto net = mc::sample_network_generalized(std::span(&law, 1), rng);
      for (const auto& o : net.types[0]) {
        lon[std::min<std::size_t>(19, static_cast<std::size_t>(o.longitude / kPi * 20))] += 1;
        ++n;
      }
    }
    std::fill(lexp.begin(), lexp.end(), n / 20.0);
    expect(stats::chi_square_gof(lon, lexp) > 0.01, "longitude chi-square");
    expect(stats::chi_square_gof(ano, aexp) > 0.01, "anomaly chi-square");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& b : broken) std::printf("    broken: %s\n", b.c_str());
  char buf[200];
  std::snprintf(buf, sizeof buf, "property suite: %zu broken invariants, %.1f s", broken.size(), secs);
  report(9, broken.empty() && secs < 600.0, buf);
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void()>>> all = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4}, {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}};
  for (const auto& [id, fn] : all) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
    std::printf("    (%.1f s)\n", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
