#include "leocox/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "leocox/geometry.hpp"
#include "leocox/parallel.hpp"

namespace leocox::analytic {

namespace {

constexpr double kRe = kEarthRadiusKm;

// Per-type geometry shared by every integrand. Angles below are
// complementary inclinations (0 = orbit plane containing the user).
struct TypeGeom {
  double r, lambda, mu, power, gain;
  double rim_max;  // arccos(r_e / r)
  double zmin;     // r - r_e
  double horizon;  // sqrt(r^2 - r_e^2)

  explicit TypeGeom(const ConstellationSpec& s)
      : r(s.radius_km), lambda(s.lambda), mu(s.mu), power(s.tx_power_w), gain(s.gain),
        rim_max(std::acos(kRe / s.radius_km)), zmin(s.radius_km - kRe),
        horizon(std::sqrt((s.radius_km - kRe) * (s.radius_km + kRe))) {}

  // Cap rim angle for distance z, clamped to [0, rim_max]. Uses
  // 1 - cos(xi) = (z - zmin)(z + zmin) / (2 r r_e) to stay accurate near zmin.
  double rim_of(double z) const {
    if (z <= zmin) return 0.0;
    if (z >= horizon) return rim_max;
    const double one_minus_cos = (z - zmin) * (z + zmin) / (2.0 * r * kRe);
    return std::min(rim_max, 2.0 * std::asin(std::sqrt(0.5 * one_minus_cos)));
  }

  double distance_of(double xi) const {
    const double s = std::sin(0.5 * xi);
    return std::sqrt(zmin * zmin + 4.0 * r * kRe * s * s);
  }
};

struct Fading {
  double alpha;
  int m;

  // 1 - L_H(sp / d^alpha) given d^2
  double one_minus_laplace(double sp, double d2) const {
    const double x = sp * std::pow(d2, -0.5 * alpha);
    if (m == 1) return x / (1.0 + x);
    return -std::expm1(-m * std::log1p(x / m));
  }
};

// Integral over anomalies in [w_lo, w_hi] of 1 - L_H(sp / fbar(w)^alpha) on an
// orbit whose complementary inclination has cosine cos_comp.
double arc_interference(const TypeGeom& t, const Fading& fad, double cos_comp, double w_lo,
                        double w_hi, double sp) {
  if (sp <= 0.0 || w_hi <= w_lo) return 0.0;
  const double a = t.r * t.r + kRe * kRe, b = 2.0 * t.r * kRe * cos_comp;
  return quad::gauss_legendre(
      quad::gauss_legendre_64(),
      [&](double w) { return fad.one_minus_laplace(sp, a - b * std::cos(w)); }, w_lo, w_hi);
}

// Exponent of one orbit crossing the cap of rim xi: the empty exclusion arc
// plus interference from the visible remainder. gap = xi - comp.
double cap_orbit_exponent(const TypeGeom& t, const Fading& fad, double xi, double comp,
                          double gap, double sp) {
  const double w1 = geometry::half_arc(xi, comp, gap);
  const double w2 = geometry::half_arc(t.rim_max, comp, gap + (t.rim_max - xi));
  return t.mu / kPi * (w1 + arc_interference(t, fad, std::cos(comp), w1, w2, sp));
}

// Exponent of one orbit outside the cap: interference from its visible arc.
// gap = rim_max - comp.
double band_orbit_exponent(const TypeGeom& t, const Fading& fad, double comp, double gap,
                           double sp) {
  const double w2 = geometry::half_arc(t.rim_max, comp, gap);
  return t.mu / kPi * arc_interference(t, fad, std::cos(comp), 0.0, w2, sp);
}

struct Accum {
  double error = 0.0;
  bool converged = true;

  double take(const quad::Result& r) {
    error += r.error;
    converged = converged && r.converged;
    return r.value;
  }
};

// -log of the orbit-process PGFL for type t when its satellites inside the
// cap of rim xi are excluded and the rest interfere with scaled power sp.
// xi = 0 gives the unconditioned interference Laplace exponent, xi = rim_max
// with sp = 0 the no-satellite exponent.
double orbit_pgfl_exponent(const TypeGeom& t, const Fading& fad, double xi, double sp,
                           const quad::Settings& q, Accum& acc) {
  double cap = 0.0, band = 0.0;
  if (xi > 0.0) {
    cap = acc.take(quad::integrate_sqrt_endpoint(
        [&](double comp, double gap) {
          return -std::expm1(-cap_orbit_exponent(t, fad, xi, comp, gap, sp)) * std::cos(comp);
        },
        0.0, xi, q));
  }
  if (sp > 0.0 && xi < t.rim_max) {
    band = acc.take(quad::integrate_sqrt_endpoint(
        [&](double comp, double gap) {
          return -std::expm1(-band_orbit_exponent(t, fad, comp, gap, sp)) * std::cos(comp);
        },
        xi, t.rim_max, q));
  }
  return t.lambda * (cap + band);
}

// Serving-orbit factor: integral over orbits through the cap rim of the
// conditional void/interference term weighted by the 1/sqrt kernel.
double serving_orbit_integral(const TypeGeom& t, const Fading& fad, double xi, double sp,
                              const quad::Settings& q, Accum& acc) {
  if (xi <= 0.0) return 0.0;
  return acc.take(quad::integrate_sqrt_endpoint(
      [&](double comp, double gap) {
        const double e = cap_orbit_exponent(t, fad, xi, comp, gap, sp);
        const double root = std::sqrt(std::sin(gap) * std::sin(xi + comp));
        return std::exp(-e) * std::cos(comp) / root;
      },
      0.0, xi, q));
}

// Scales the middle-level absolute tolerance by the exponent prefactor.
quad::Settings middle_settings(const quad::Settings& q, double lambda) {
  auto m = quad::nested(q, 0.1);
  m.abs_tol /= std::max(1.0, lambda);
  return m;
}

void require_rayleigh(const NetworkModel& model, const char* what) {
  if (model.propagation.nakagami_m != 1) {
    throw std::domain_error(std::string(what) +
                            ": analytic coverage is only available for Rayleigh fading (m = 1)");
  }
}

// Integrates f(xi) over [0, rim_max] of the serving type, split at the rim
// angles that correspond to the given serving distances.
template <class F>
quad::Result integrate_over_rim(const TypeGeom& serving, std::vector<double> break_distances, F&& f,
                                const quad::Settings& q) {
  std::vector<double> cuts{0.0};
  std::sort(break_distances.begin(), break_distances.end());
  for (double z : break_distances) {
    if (z > serving.zmin && z < serving.horizon) cuts.push_back(serving.rim_of(z));
  }
  cuts.push_back(serving.rim_max);
  quad::Result total;
  quad::Settings piece = q;
  piece.abs_tol = q.abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    const auto r = quad::integrate(f, cuts[i], cuts[i + 1], piece);
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
    total.evaluations += r.evaluations;
  }
  return total;
}

quad::Result checked(quad::Result r, const char* what) {
  if (!r.converged) {
    throw quad::QuadratureError(std::string(what) + ": quadrature did not converge (estimate " +
                                    std::to_string(r.value) + " +/- " + std::to_string(r.error) + ")",
                                r);
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Nearest-distance law

NearestDistanceLaw::NearestDistanceLaw(const ConstellationSpec& spec, QuadratureSettings settings)
    : spec_(spec), settings_(settings) {
  if (!(spec.radius_km > kRe)) throw std::domain_error("NearestDistanceLaw: radius <= r_e");
  const auto lim = geometry::visibility_limits(spec.radius_km);
  horizon_ = lim.max_distance;
  max_comp_ = lim.max_complementary_inclination;
  no_satellite_ = ccdf_at_rim(max_comp_);
}

double NearestDistanceLaw::rim_of(double v) const { return TypeGeom(spec_).rim_of(v); }

double NearestDistanceLaw::ccdf_at_rim(double xi) const {
  if (xi <= 0.0) return 1.0;
  const double mu = spec_.mu;
  const auto q = middle_settings(settings_, spec_.lambda);
  const auto r = quad::integrate_sqrt_endpoint(
      [&](double comp, double gap) {
        return -std::expm1(-mu / kPi * geometry::half_arc(xi, comp, gap)) * std::cos(comp);
      },
      0.0, xi, q);
  return std::exp(-spec_.lambda * r.value);
}

double NearestDistanceLaw::serving_kernel_at_rim(double xi) const {
  if (xi <= 0.0) return 0.0;
  const double mu = spec_.mu;
  const auto q = middle_settings(settings_, spec_.mu);
  const auto r = quad::integrate_sqrt_endpoint(
      [&](double comp, double gap) {
        const double root = std::sqrt(std::sin(gap) * std::sin(xi + comp));
        return std::exp(-mu / kPi * geometry::half_arc(xi, comp, gap)) * std::cos(comp) / root;
      },
      0.0, xi, q);
  return mu / kPi * r.value;
}

double NearestDistanceLaw::ccdf(double v) const {
  if (v < min_distance()) return 1.0;
  if (v > horizon_) return no_satellite_;
  return ccdf_at_rim(rim_of(v));
}

double NearestDistanceLaw::pdf(double v) const {
  if (v <= min_distance() || v > horizon_) return 0.0;
  const double xi = rim_of(v);
  return spec_.lambda * ccdf_at_rim(xi) * serving_kernel_at_rim(xi) * v /
         (spec_.radius_km * kRe);
}

double nearest_ccdf(const ConstellationSpec& spec, double v, const QuadratureSettings& q) {
  return NearestDistanceLaw(spec, q).ccdf(v);
}

double nearest_pdf(const ConstellationSpec& spec, double v, const QuadratureSettings& q) {
  return NearestDistanceLaw(spec, q).pdf(v);
}

double no_satellite_closed(const ConstellationSpec& spec, const QuadratureSettings& q) {
  return NearestDistanceLaw(spec, q).no_satellite();
}

double no_satellite_open(const NetworkModel& model, const QuadratureSettings& q) {
  double p = 1.0;
  for (const auto& c : model.constellations) p *= no_satellite_closed(c, q);
  return p;
}

// ---------------------------------------------------------------------------
// Interference and coverage

double laplace_cross_interference(const ConstellationSpec& spec, double s,
                                  const PropagationConfig& prop, const QuadratureSettings& q) {
  if (s < 0.0) throw std::domain_error("laplace_cross_interference: s must be non-negative");
  if (s == 0.0) return 1.0;
  const TypeGeom t(spec);
  const Fading fad{prop.alpha, prop.nakagami_m};
  Accum acc;
  return std::exp(-orbit_pgfl_exponent(t, fad, 0.0, s * t.power, middle_settings(q, t.lambda), acc));
}

quad::Result coverage_closed_estimate(const NetworkModel& model, std::size_t k, double tau,
                                      const QuadratureSettings& q) {
  require_valid(model);
  require_rayleigh(model, "coverage_closed");
  if (k >= model.size()) throw std::out_of_range("coverage_closed: type index out of range");
  if (!(tau > 0.0)) throw std::domain_error("coverage_closed: tau must be positive");

  std::vector<TypeGeom> types;
  for (const auto& c : model.constellations) types.emplace_back(c);
  const TypeGeom& serving = types[k];
  const Fading fad{model.propagation.alpha, model.propagation.nakagami_m};
  const double noise = model.propagation.noise_w;
  const double scale = tau / (serving.power * serving.gain);

  auto integrand = [&](double xi) {
    const double z = serving.distance_of(xi);
    const double s = scale * std::pow(z, fad.alpha);
    double exponent = noise * s;
    Accum acc;
    for (std::size_t l = 0; l < types.size(); ++l) {
      if (l == k) continue;
      exponent += orbit_pgfl_exponent(types[l], fad, 0.0, s * types[l].power,
                                      middle_settings(q, types[l].lambda), acc);
    }
    const double sp = s * serving.power;
    const auto mq = middle_settings(q, serving.lambda);
    exponent += orbit_pgfl_exponent(serving, fad, xi, sp, mq, acc);
    if (exponent > 745.0) return 0.0;
    const double kernel = serving_orbit_integral(serving, fad, xi, sp, mq, acc);
    return serving.lambda * serving.mu / kPi * std::sin(xi) * std::exp(-exponent) * kernel;
  };
  return integrate_over_rim(serving, {}, integrand, q);
}

double coverage_closed(const NetworkModel& model, std::size_t k, double tau,
                       const QuadratureSettings& q) {
  return checked(coverage_closed_estimate(model, k, tau, q), "coverage_closed").value;
}

quad::Result coverage_open_estimate(const NetworkModel& model, double tau,
                                    const QuadratureSettings& q) {
  require_valid(model);
  require_rayleigh(model, "coverage_open");
  if (!(tau > 0.0)) throw std::domain_error("coverage_open: tau must be positive");

  std::vector<TypeGeom> types;
  for (const auto& c : model.constellations) types.emplace_back(c);
  const Fading fad{model.propagation.alpha, model.propagation.nakagami_m};
  const double noise = model.propagation.noise_w;

  quad::Result total;
  for (std::size_t k = 0; k < types.size(); ++k) {
    const TypeGeom& serving = types[k];
    const double scale = tau / (serving.power * serving.gain);
    auto integrand = [&](double xi) {
      const double z = serving.distance_of(xi);
      const double s = scale * std::pow(z, fad.alpha);
      double exponent = noise * s;
      Accum acc;
      // every type's satellites closer than z are absent under nearest-any association
      for (std::size_t l = 0; l < types.size(); ++l) {
        const double xi_l = l == k ? xi : types[l].rim_of(z);
        exponent += orbit_pgfl_exponent(types[l], fad, xi_l, s * types[l].power,
                                        middle_settings(q, types[l].lambda), acc);
        if (exponent > 745.0) return 0.0;
      }
      const double kernel = serving_orbit_integral(serving, fad, xi, s * serving.power,
                                                   middle_settings(q, serving.lambda), acc);
      return serving.lambda * serving.mu / kPi * std::sin(xi) * std::exp(-exponent) * kernel;
    };
    std::vector<double> breaks;
    for (std::size_t l = 0; l < types.size(); ++l) {
      if (l == k) continue;
      breaks.push_back(types[l].zmin);
      breaks.push_back(types[l].horizon);
    }
    quad::Settings per_type = q;
    per_type.abs_tol = q.abs_tol / static_cast<double>(types.size());
    const auto r = integrate_over_rim(serving, breaks, integrand, per_type);
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
    total.evaluations += r.evaluations;
  }
  return total;
}

double coverage_open(const NetworkModel& model, double tau, const QuadratureSettings& q) {
  return checked(coverage_open_estimate(model, tau, q), "coverage_open").value;
}

namespace {

Curve curve_over(std::span<const double> tau_db, const std::function<double(double)>& eval) {
  std::vector<double> values(tau_db.size());
  parallel_for(tau_db.size(), [&](std::size_t i) { values[i] = eval(db_to_linear(tau_db[i])); });
  Curve c;
  for (std::size_t i = 0; i < tau_db.size(); ++i) c.push_back(tau_db[i], values[i]);
  return c;
}

}  // namespace

Curve coverage_closed_curve(const NetworkModel& model, std::size_t k,
                            std::span<const double> tau_db, const QuadratureSettings& q) {
  return curve_over(tau_db, [&](double tau) { return coverage_closed(model, k, tau, q); });
}

Curve coverage_open_curve(const NetworkModel& model, std::span<const double> tau_db,
                          const QuadratureSettings& q) {
  return curve_over(tau_db, [&](double tau) { return coverage_open(model, tau, q); });
}

// ---------------------------------------------------------------------------
// Association

namespace {

// distance_scale[m] multiplies the type-k distance before evaluating the
// type-m CCDF (1 for nearest association, eta^(1/alpha) for max power).
double association_impl(const NetworkModel& model, std::size_t k,
                        const std::vector<double>& distance_scale, const QuadratureSettings& q,
                        const char* what) {
  require_valid(model);
  if (k >= model.size()) throw std::out_of_range(std::string(what) + ": type index out of range");
  std::vector<NearestDistanceLaw> laws;
  for (const auto& c : model.constellations) laws.emplace_back(c, q);
  const TypeGeom serving(model[k]);
  const auto& own = laws[k];

  std::vector<double> breaks;
  for (std::size_t m = 0; m < laws.size(); ++m) {
    if (m == k) continue;
    breaks.push_back(laws[m].min_distance() / distance_scale[m]);
    breaks.push_back(laws[m].max_distance() / distance_scale[m]);
  }
  auto integrand = [&](double xi) {
    double v = serving.distance_of(xi);
    double prod = own.ccdf_at_rim(xi);
    for (std::size_t m = 0; m < laws.size() && prod > 0.0; ++m) {
      if (m != k) prod *= laws[m].ccdf(v * distance_scale[m]);
    }
    if (prod == 0.0) return 0.0;
    return serving.lambda * std::sin(xi) * own.serving_kernel_at_rim(xi) * prod;
  };
  return checked(integrate_over_rim(serving, breaks, integrand, q), what).value;
}

}  // namespace

double association_probability(const NetworkModel& model, std::size_t k,
                               const QuadratureSettings& q) {
  return association_impl(model, k, std::vector<double>(model.size(), 1.0), q,
                          "association_probability");
}

double association_probability_power(const NetworkModel& model, std::size_t k,
                                     const QuadratureSettings& q) {
  if (k >= model.size()) {
    throw std::out_of_range("association_probability_power: type index out of range");
  }
  const double alpha = model.propagation.alpha;
  const double own = model[k].tx_power_w * model[k].gain;
  std::vector<double> scale;
  for (const auto& c : model.constellations) {
    scale.push_back(std::pow(c.tx_power_w * c.gain / own, 1.0 / alpha));
  }
  return association_impl(model, k, scale, q, "association_probability_power");
}

// ---------------------------------------------------------------------------

double ergodic_capacity(const std::function<double(double)>& coverage,
                        const QuadratureSettings& q) {
  // r = -ln(1 - u) maps [0, inf) onto [0, 1)
  auto integrand = [&](double u) {
    const double r = -std::log1p(-u);
    const double tau = std::expm1(r * std::log(2.0));
    return coverage(tau) / (1.0 - u);
  };
  return checked(quad::integrate(integrand, 0.0, 1.0, q), "ergodic_capacity").value;
}

}  // namespace leocox::analytic
