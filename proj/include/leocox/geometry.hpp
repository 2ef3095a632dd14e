#pragma once

#include <cmath>

namespace leocox {

/// Earth radius in km. The typical user sits at (0, 0, kEarthRadiusKm).
inline constexpr double kEarthRadiusKm = 6400.0;

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace leocox

namespace leocox::geometry {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a.x, s * a.y, s * a.z}; }

/// Surface point at the given geocentric latitude/longitude (radians).
Vec3 surface_point(double latitude, double longitude);

/// Circular orbit centred at the origin. Longitude is the ascending-node
/// angle measured from the x-axis, inclination is the angle between the
/// orbital plane and the equator.
class OrbitGeom {
 public:
  OrbitGeom(double radius, double longitude, double inclination);

  double radius() const { return radius_; }
  double longitude() const { return longitude_; }
  double inclination() const { return inclination_; }

  /// Position of the point at on-orbit anomaly `omega`, measured from the
  /// ascending node inside the orbital plane.
  Vec3 position(double omega) const;

 private:
  double radius_;
  double longitude_;
  double inclination_;
};

/// Spherical cap on the sphere of radius `sphere_radius`: points within
/// `max_distance` of the typical user.
struct CapSpec {
  double sphere_radius;
  double max_distance;

  /// Cosine of the polar angle of the cap rim.
  double cos_rim() const;
};

/// Distance from the typical user to the point at anomaly `omega` of an
/// orbit with radius `r` and inclination `inclination`.
double user_satellite_distance(double r, double inclination, double omega);

/// Distance in the complementary-inclination parameterisation:
/// sqrt(r^2 - 2 r r_e cos(omega) cos(comp) + r_e^2), where omega is measured
/// from the orbit's point of closest approach to the user.
double distance_from_closest_approach(double r, double complementary_inclination, double omega);

/// cos(xi) = (r^2 + r_e^2 - d^2) / (2 r_e r) for d in [r - r_e, r + r_e].
double cos_xi(double r, double d);

/// Half of the central angle of the arc cut from an orbit by the cap C(r, d).
/// Returns 0 when the orbit misses the cap. The arc length is 2 r times this.
double cap_orbit_arc_angle(double r, double inclination, double d);

struct VisibilityLimits {
  double max_distance;                    ///< sqrt(r^2 - r_e^2), zero elevation
  double max_complementary_inclination;   ///< arccos(r_e / r)
};

VisibilityLimits visibility_limits(double r);

/// Anomaly window on an orbit of complementary inclination `comp`, with
/// anomalies measured from the point of closest approach. `exclusion` bounds
/// the part of the orbit inside the cap C(r, z); `visible` bounds the part
/// above the horizon. Both are clamped to zero when the orbit misses the
/// corresponding cap.
struct OmegaWindow {
  double exclusion;
  double visible;
};

OmegaWindow omega_window(double r, double complementary_inclination, double z);

/// Half-arc angle arccos(cos(rim) / cos(comp)) evaluated through
/// atan2(sqrt(sin(rim - comp) sin(rim + comp)), cos(rim)). `gap` must be
/// rim - comp computed without cancellation by the caller; non-positive gaps
/// return 0.
inline double half_arc(double rim, double comp, double gap) {
  if (gap <= 0.0) return 0.0;
  const double prod = std::sin(gap) * std::sin(rim + comp);
  return std::atan2(std::sqrt(prod > 0.0 ? prod : 0.0), std::cos(rim));
}

inline double half_arc(double rim, double comp) { return half_arc(rim, comp, rim - comp); }

}  // namespace leocox::geometry
