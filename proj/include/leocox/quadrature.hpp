#pragma once

// Gauss-Legendre and adaptive Gauss-Kronrod integration used by the
// analytic module. Everything here is reentrant: the only shared state is
// the immutable node tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace leocox::quad {

struct Settings {
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  int max_depth = 30;  ///< maximum bisection depth of any subinterval
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  int evaluations = 0;
};

/// Thrown when an integral does not reach its tolerance; carries the best
/// available estimate.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, Result partial)
      : std::runtime_error(what), partial_(partial) {}
  const Result& partial() const { return partial_; }

 private:
  Result partial_;
};

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule computed by Newton iteration on P_n.
GaussLegendreRule make_gauss_legendre(int n);

/// Shared 64-point rule.
const GaussLegendreRule& gauss_legendre_64();

template <class F>
double gauss_legendre(const GaussLegendreRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  int depth;
};

template <class F>
Segment kronrod15(F& f, double a, double b, int depth) {
  const double center = 0.5 * (a + b), half = 0.5 * (b - a);
  const double fc = f(center);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double s = f1[j] + f2[j];
    resk += kWgk[j] * s;
    resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * s;
  }
  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  resasc *= std::abs(half);
  resabs *= std::abs(half);
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, resk * half, err, depth};
}

}  // namespace detail

/// Globally adaptive G7-K15 integration of f over [a, b]. Stops when the
/// summed error estimate is below max(abs_tol, rel_tol |I|). Never throws;
/// inspect Result::converged.
template <class F>
Result integrate(F&& f, double a, double b, const Settings& settings) {
  Result out;
  if (a == b) return out;
  std::vector<detail::Segment> segs;
  segs.reserve(64);
  segs.push_back(detail::kronrod15(f, a, b, 0));
  out.evaluations = 15;
  double total = segs[0].value, err = segs[0].error;
  const auto by_error = [](const detail::Segment& x, const detail::Segment& y) { return x.error < y.error; };
  constexpr std::size_t kMaxSegments = 4000;
  while (err > std::max(settings.abs_tol, settings.rel_tol * std::abs(total))) {
    std::pop_heap(segs.begin(), segs.end(), by_error);
    const detail::Segment worst = segs.back();
    if (worst.depth >= settings.max_depth || segs.size() >= kMaxSegments) {
      std::push_heap(segs.begin(), segs.end(), by_error);
      out.converged = false;
      break;
    }
    segs.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::kronrod15(f, worst.a, mid, worst.depth + 1);
    const auto right = detail::kronrod15(f, mid, worst.b, worst.depth + 1);
    out.evaluations += 30;
    segs.push_back(left);
    std::push_heap(segs.begin(), segs.end(), by_error);
    segs.push_back(right);
    std::push_heap(segs.begin(), segs.end(), by_error);
    // resum to avoid drift from repeated add/subtract
    total = 0.0;
    err = 0.0;
    for (const auto& s : segs) {
      total += s.value;
      err += s.error;
    }
  }
  out.value = total;
  out.error = err;
  return out;
}

/// Integrates f(x, b - x) over [a, b] where f may carry a square-root
/// singularity (or a sqrt-type zero) at b. Uses x = b - (b - a)(1 - cos t),
/// t in [0, pi/2], so b - x = 2 (b - a) sin^2(t/2) is passed to f exactly.
template <class F>
Result integrate_sqrt_endpoint(F&& f, double a, double b, const Settings& settings) {
  const double w = b - a;
  if (w <= 0.0) return {};
  auto g = [&](double t) {
    const double st = std::sin(0.5 * t);
    const double gap = 2.0 * w * st * st;
    return f(b - gap, gap) * w * std::sin(t);
  };
  return integrate(g, 0.0, 0.5 * 3.14159265358979323846, settings);
}

/// Fixed-rule counterpart of integrate_sqrt_endpoint.
template <class F>
double gauss_legendre_sqrt_endpoint(const GaussLegendreRule& rule, F&& f, double a, double b) {
  const double w = b - a;
  if (w <= 0.0) return 0.0;
  auto g = [&](double t) {
    const double st = std::sin(0.5 * t);
    const double gap = 2.0 * w * st * st;
    return f(b - gap, gap) * w * std::sin(t);
  };
  return gauss_legendre(rule, g, 0.0, 0.5 * 3.14159265358979323846);
}

/// Settings for an integral nested inside another one.
inline Settings nested(const Settings& s, double scale = 0.1) {
  return {s.rel_tol * scale, s.abs_tol * scale, s.max_depth};
}

}  // namespace leocox::quad
