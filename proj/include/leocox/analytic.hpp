#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "leocox/model.hpp"
#include "leocox/quadrature.hpp"

namespace leocox::analytic {

using QuadratureSettings = quad::Settings;

/// Distribution of the distance D_k from the typical user to the nearest
/// visible satellite of one constellation type (D_k = infinity when none is
/// visible).
class NearestDistanceLaw {
 public:
  explicit NearestDistanceLaw(const ConstellationSpec& spec, QuadratureSettings settings = {});

  const ConstellationSpec& spec() const { return spec_; }

  double min_distance() const { return spec_.radius_km - kEarthRadiusKm; }
  double max_distance() const { return horizon_; }

  /// P(D > v). Piecewise: 1 below r - r_e, the cap-void probability on the
  /// visible band, and the no-satellite probability beyond the horizon.
  double ccdf(double v) const;

  /// Density of D on the visible band, zero outside.
  double pdf(double v) const;

  /// Cap-void probability parameterised by the cap rim angle xi.
  double ccdf_at_rim(double xi) const;

  /// The factor g(v) with pdf = lambda F(v) g(v), reparameterised by the rim
  /// angle: returns (mu / pi) * integral of the serving-orbit kernel, so that
  /// lambda g(v) dv = lambda * this * sin(xi) dxi.
  double serving_kernel_at_rim(double xi) const;

  /// P(D = infinity).
  double no_satellite() const { return no_satellite_; }

 private:
  double rim_of(double v) const;

  ConstellationSpec spec_;
  QuadratureSettings settings_;
  double horizon_;
  double max_comp_;
  double no_satellite_;
};

double nearest_ccdf(const ConstellationSpec& spec, double v, const QuadratureSettings& q = {});
double nearest_pdf(const ConstellationSpec& spec, double v, const QuadratureSettings& q = {});

double no_satellite_closed(const ConstellationSpec& spec, const QuadratureSettings& q = {});
double no_satellite_open(const NetworkModel& model, const QuadratureSettings& q = {});

/// Laplace transform of the aggregate interference from all visible
/// satellites of one type (unit interference gain), evaluated at s.
double laplace_cross_interference(const ConstellationSpec& spec, double s,
                                  const PropagationConfig& prop,
                                  const QuadratureSettings& q = {});

/// SINR coverage P(SINR > tau) of the type-k typical user under closed
/// access (served by its own type only). Requires Rayleigh fading (m = 1).
/// Throws quad::QuadratureError carrying the partial estimate when the
/// outer integral fails to converge.
double coverage_closed(const NetworkModel& model, std::size_t k, double tau,
                       const QuadratureSettings& q = {});
quad::Result coverage_closed_estimate(const NetworkModel& model, std::size_t k, double tau,
                                      const QuadratureSettings& q = {});

/// SINR coverage of the typical user under open access (nearest visible
/// satellite of any type serves).
double coverage_open(const NetworkModel& model, double tau, const QuadratureSettings& q = {});
quad::Result coverage_open_estimate(const NetworkModel& model, double tau,
                                    const QuadratureSettings& q = {});

/// Coverage curves over a tau grid given in dB.
Curve coverage_closed_curve(const NetworkModel& model, std::size_t k,
                            std::span<const double> tau_db, const QuadratureSettings& q = {});
Curve coverage_open_curve(const NetworkModel& model, std::span<const double> tau_db,
                          const QuadratureSettings& q = {});

/// Probability that the nearest visible satellite is of type k.
double association_probability(const NetworkModel& model, std::size_t k,
                               const QuadratureSettings& q = {});

/// Probability that type k offers the largest average received power
/// p g D^-alpha among visible satellites.
double association_probability_power(const NetworkModel& model, std::size_t k,
                                     const QuadratureSettings& q = {});

/// Ergodic capacity E[log2(1 + SINR)] in bits per channel use, from a
/// coverage function of linear tau.
double ergodic_capacity(const std::function<double(double)>& coverage,
                        const QuadratureSettings& q = {});

}  // namespace leocox::analytic
