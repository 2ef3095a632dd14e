#include "leocox/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace leocox::geometry {

namespace {

void require_above_earth(double r, const char* what) {
  if (!(r > kEarthRadiusKm)) {
    throw std::domain_error(std::string(what) + ": radius " + std::to_string(r) +
                            " km must exceed the earth radius");
  }
}

}  // namespace

Vec3 surface_point(double latitude, double longitude) {
  const double c = std::cos(latitude);
  return {kEarthRadiusKm * c * std::cos(longitude), kEarthRadiusKm * c * std::sin(longitude),
          kEarthRadiusKm * std::sin(latitude)};
}

OrbitGeom::OrbitGeom(double radius, double longitude, double inclination)
    : radius_(radius), longitude_(longitude), inclination_(inclination) {
  require_above_earth(radius, "OrbitGeom");
  if (longitude < 0.0 || longitude >= kPi) {
    throw std::domain_error("OrbitGeom: longitude must lie in [0, pi)");
  }
  if (inclination < 0.0 || inclination > kPi) {
    throw std::domain_error("OrbitGeom: inclination must lie in [0, pi]");
  }
}

Vec3 OrbitGeom::position(double omega) const {
  // node direction a and in-plane normal b, X = r (cos w a + sin w b)
  const double ct = std::cos(longitude_), st = std::sin(longitude_);
  const double ci = std::cos(inclination_), si = std::sin(inclination_);
  const double cw = std::cos(omega), sw = std::sin(omega);
  return {radius_ * (cw * ct - sw * st * ci), radius_ * (cw * st + sw * ct * ci),
          radius_ * sw * si};
}

double CapSpec::cos_rim() const { return cos_xi(sphere_radius, max_distance); }

double user_satellite_distance(double r, double inclination, double omega) {
  require_above_earth(r, "user_satellite_distance");
  const double re = kEarthRadiusKm;
  const double d2 = r * r - 2.0 * r * re * std::sin(omega) * std::sin(inclination) + re * re;
  return std::sqrt(std::max(d2, (r - re) * (r - re)));
}

double distance_from_closest_approach(double r, double comp, double omega) {
  const double re = kEarthRadiusKm;
  const double d2 = r * r - 2.0 * r * re * std::cos(omega) * std::cos(comp) + re * re;
  return std::sqrt(std::max(d2, (r - re) * (r - re)));
}

double cos_xi(double r, double d) {
  const double re = kEarthRadiusKm;
  const double lo = r - re, hi = r + re;
  // a few ulps of slack so callers can pass computed band edges
  const double slack = 1e-12 * hi;
  if (d < lo - slack || d > hi + slack) {
    throw std::domain_error("cos_xi: distance " + std::to_string(d) + " outside [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return std::clamp((r * r + re * re - d * d) / (2.0 * re * r), -1.0, 1.0);
}

double cap_orbit_arc_angle(double r, double inclination, double d) {
  require_above_earth(r, "cap_orbit_arc_angle");
  const double c = cos_xi(r, d);
  const double s = std::abs(std::sin(inclination));
  if (!(s > c)) return 0.0;
  // 1 - c^2 csc^2 = (s - c)(s + c) / s^2; atan2 keeps the rim well conditioned
  const double num = std::sqrt((s - c) * (s + c));
  return std::atan2(num, c);
}

VisibilityLimits visibility_limits(double r) {
  require_above_earth(r, "visibility_limits");
  const double re = kEarthRadiusKm;
  return {std::sqrt((r - re) * (r + re)), std::acos(re / r)};
}

OmegaWindow omega_window(double r, double comp, double z) {
  const double re = kEarthRadiusKm;
  const VisibilityLimits lim = visibility_limits(r);
  const double zc = std::clamp(z, r - re, lim.max_distance);
  const double rim = std::acos(std::clamp(cos_xi(r, zc), re / r, 1.0));
  const double c = std::abs(comp);
  return {half_arc(rim, c), half_arc(lim.max_complementary_inclination, c)};
}

}  // namespace leocox::geometry
