#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "leocox/geometry.hpp"

namespace leocox {

/// One Cox constellation type: orbits form a Poisson process with mean
/// `lambda` orbits, each orbit carries a Poisson number of satellites with
/// mean `mu`, all at radius `radius_km`.
struct ConstellationSpec {
  double lambda = 0.0;
  double mu = 0.0;
  double radius_km = 0.0;
  double tx_power_w = 1.0;
  double gain = 1.0;  ///< linear serving-link antenna gain

  double altitude_km() const { return radius_km - kEarthRadiusKm; }

  static ConstellationSpec from_altitude(double lambda, double mu, double altitude_km,
                                         double tx_power_w = 1.0, double gain = 1.0) {
    return {lambda, mu, kEarthRadiusKm + altitude_km, tx_power_w, gain};
  }
};

struct PropagationConfig {
  double alpha = 3.0;    ///< path-loss exponent
  double noise_w = 0.0;  ///< sigma^2
  int nakagami_m = 1;
};

struct NetworkModel {
  std::vector<ConstellationSpec> constellations;
  PropagationConfig propagation;

  std::size_t size() const { return constellations.size(); }
  const ConstellationSpec& operator[](std::size_t k) const { return constellations[k]; }
};

struct CurvePoint {
  double x;
  double y;
  std::optional<double> stderr_;
};

/// Ordered samples of a one-dimensional result (coverage vs. tau, CCDFs...).
class Curve {
 public:
  Curve() = default;

  /// Appends a point; x must be strictly larger than the previous abscissa.
  void push_back(double x, double y, std::optional<double> stderr_ = std::nullopt);

  const std::vector<CurvePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const CurvePoint& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<CurvePoint> points_;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// P(H > x) for unit-mean Nakagami-m power fading.
double fading_ccdf(double x, int m);

/// E[exp(-s H)] for unit-mean Nakagami-m power fading.
double fading_laplace(double s, int m);

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

ValidationReport validate(const NetworkModel& model);

/// Throws std::invalid_argument listing every error when the model is invalid.
void require_valid(const NetworkModel& model);

}  // namespace leocox
