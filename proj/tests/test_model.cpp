#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "leocox/model.hpp"

using namespace leocox;

namespace {

bool has_error(const ValidationReport& r, const std::string& needle) {
  for (const auto& e : r.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

NetworkModel two_types() {
  NetworkModel m;
  m.constellations = {ConstellationSpec::from_altitude(40, 30, 550, 1, 100),
                      ConstellationSpec::from_altitude(20, 30, 550)};
  return m;
}

}  // namespace

TEST_CASE("fading_ccdf") {
  for (int m : {1, 2, 5}) CHECK(fading_ccdf(0.0, m) == 1.0);
  CHECK(fading_ccdf(1.0, 1) == doctest::Approx(0.367879441171).epsilon(1e-11));
  CHECK(fading_ccdf(0.5, 3) == doctest::Approx(std::exp(-1.5) * (1 + 1.5 + 1.125)).epsilon(1e-14));
  CHECK_THROWS_AS(fading_ccdf(1.0, 0), std::domain_error);

  std::mt19937_64 gen(1);
  std::exponential_distribution<double> X(0.5);
  for (int i = 0; i < 20; ++i) {
    const double x = X(gen);
    CHECK(fading_ccdf(x, 1) == std::exp(-x));
  }
}

TEST_CASE("fading_ccdf is the Gamma(m, 1/m) tail") {
  for (int m : {1, 2, 3, 4, 7}) {
    const boost::math::gamma_distribution<double> g(m, 1.0 / m);
    double prev = 1.0;
    for (double x = 0.0; x < 6.0; x += 0.25) {
      const double v = fading_ccdf(x, m);
      CHECK(v == doctest::Approx(boost::math::cdf(boost::math::complement(g, x))).epsilon(1e-12));
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("fading_laplace") {
  CHECK(fading_laplace(0.0, 1) == 1.0);
  CHECK(fading_laplace(1.0, 1) == 0.5);
  CHECK(fading_laplace(2.0, 4) == doctest::Approx(std::pow(1.5, -4)).epsilon(1e-14));
  for (double s : {0.1, 0.7, 3.0, 17.0}) CHECK(fading_laplace(s, 1) * (1.0 + s) == 1.0);

  boost::math::quadrature::exp_sinh<double> integrator;
  for (int m : {2, 4, 6}) {
    const boost::math::gamma_distribution<double> g(m, 1.0 / m);
    for (double s : {0.5, 2.0, 10.0}) {
      const double ref = integrator.integrate([&](double x) { return std::exp(-s * x) * boost::math::pdf(g, x); });
      CHECK(fading_laplace(s, m) == doctest::Approx(ref).epsilon(1e-9));
    }
  }
}

TEST_CASE("dB conversions") {
  CHECK(db_to_linear(20.0) == doctest::Approx(100.0));
  CHECK(db_to_linear(-3.0) == doctest::Approx(0.501187233627));
  CHECK(linear_to_db(db_to_linear(7.5)) == doctest::Approx(7.5));
}

TEST_CASE("validate") {
  CHECK(validate(two_types()).ok());

  NetworkModel empty;
  CHECK_FALSE(validate(empty).ok());
  CHECK_THROWS_AS(require_valid(empty), std::invalid_argument);

  auto low = two_types();
  low.constellations[0].radius_km = 6000;
  CHECK(has_error(validate(low), "radius <= r_e"));

  auto a2 = two_types();
  a2.propagation.alpha = 2.0;
  CHECK(has_error(validate(a2), "alpha must exceed 2"));

  auto bad = two_types();
  bad.constellations[1].lambda = 0.0;
  bad.constellations[1].mu = -1.0;
  bad.constellations[0].tx_power_w = 0.0;
  bad.constellations[0].gain = 0.5;
  bad.propagation.noise_w = -1.0;
  bad.propagation.nakagami_m = 0;
  CHECK(validate(bad).errors.size() == 6);

  NetworkModel sparse;
  sparse.constellations = {ConstellationSpec::from_altitude(10, 20, 400)};
  const auto r = validate(sparse);
  CHECK(r.ok());
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("Curve requires increasing abscissae") {
  Curve c;
  c.push_back(0.0, 1.0);
  c.push_back(1.0, 0.5, 0.01);
  CHECK(c.size() == 2);
  CHECK(c[1].stderr_.value() == 0.01);
  CHECK_THROWS_AS(c.push_back(1.0, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(c.push_back(0.5, 0.4), std::invalid_argument);
}

TEST_CASE("ConstellationSpec altitude helpers") {
  const auto s = ConstellationSpec::from_altitude(25, 22, 400);
  CHECK(s.radius_km == 6800.0);
  CHECK(s.altitude_km() == 400.0);
}
