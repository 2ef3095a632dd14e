#include "leocox/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace leocox {

void Curve::push_back(double x, double y, std::optional<double> stderr_) {
  if (!points_.empty() && !(x > points_.back().x)) {
    throw std::invalid_argument("Curve abscissae must be strictly increasing");
  }
  points_.push_back({x, y, stderr_});
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double fading_ccdf(double x, int m) {
  if (m < 1) throw std::domain_error("fading_ccdf: nakagami m must be >= 1");
  if (x <= 0.0) return 1.0;
  const double mx = m * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < m; ++k) {
    term *= mx / k;
    sum += term;
  }
  return std::exp(-mx) * sum;
}

double fading_laplace(double s, int m) {
  if (m < 1) throw std::domain_error("fading_laplace: nakagami m must be >= 1");
  if (m == 1) return 1.0 / (1.0 + s);
  return std::pow(1.0 + s / m, -static_cast<double>(m));
}

ValidationReport validate(const NetworkModel& model) {
  ValidationReport report;
  if (model.constellations.empty()) {
    report.errors.emplace_back("network must contain at least one constellation type");
  }
  for (std::size_t k = 0; k < model.constellations.size(); ++k) {
    const auto& c = model.constellations[k];
    const auto tag = "constellation " + std::to_string(k + 1) + ": ";
    if (!(c.lambda > 0.0)) report.errors.push_back(tag + "lambda must be positive");
    if (!(c.mu > 0.0)) report.errors.push_back(tag + "mu must be positive");
    if (!(c.radius_km > kEarthRadiusKm)) report.errors.push_back(tag + "radius <= r_e");
    if (!(c.tx_power_w > 0.0)) report.errors.push_back(tag + "tx power must be positive");
    if (!(c.gain >= 1.0)) report.errors.push_back(tag + "gain must be >= 1 (0 dB)");
    if (c.lambda * c.mu < 500.0 && c.radius_km > kEarthRadiusKm && c.altitude_km() < 500.0) {
      report.warnings.push_back(tag +
                                "sparse low constellation, no-satellite probability is not negligible");
    }
  }
  const auto& p = model.propagation;
  if (!(p.alpha > 2.0)) report.errors.emplace_back("alpha must exceed 2");
  if (!(p.noise_w >= 0.0)) report.errors.emplace_back("noise power must be non-negative");
  if (p.nakagami_m < 1) report.errors.emplace_back("nakagami m must be >= 1");
  return report;
}

void require_valid(const NetworkModel& model) {
  const auto report = validate(model);
  if (report.ok()) return;
  std::ostringstream os;
  os << "invalid network model:";
  for (const auto& e : report.errors) os << "\n  " << e;
  throw std::invalid_argument(os.str());
}

}  // namespace leocox
