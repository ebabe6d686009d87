#include "qpcircle/system.hpp"

#include <cmath>
#include <cstdio>

#include "qpcircle/util.hpp"

namespace qpcircle {

double QpfSystem::fibre(double theta, double x) const {
  if (circle_map) return circle_map(theta, x);
  return wrap(lift(theta, x));
}

double QpfSystem::fibre_derivative(double theta, double x) const {
  if (!derivative)
    throw unsupported_error("fibre_derivative: system '" + name +
                            "' is homeomorphism-only");
  return derivative(theta, x);
}

namespace {

// Monotone solve of lift(theta, xhat) = target. The lift increases and
// commutes with integer translation, so an integer bracket always exists.
double invert_lift(const QpfSystem& sys, double theta, double target) {
  double base = sys.lift(theta, 0.0);
  // lift(theta, k) = base + k: bracket [k0, k0 + 1] with k0 = floor(target - base).
  double k0 = std::floor(target - base);
  double lo = k0, hi = k0 + 1.0;
  double flo = base + k0 - target;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double fm = sys.lift(theta, mid) - target;
    if ((fm <= 0.0) == (flo <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-15) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double QpfSystem::fibre_inverse(double theta, double x) const {
  if (inverse) return inverse(theta, x);
  return wrap(invert_lift(*this, theta, x));
}

double fibre_iterate(const QpfSystem& sys, double theta, double x, std::int64_t n) {
  if (n >= 0) {
    double th = theta;
    for (std::int64_t j = 0; j < n; ++j) {
      x = sys.fibre(th, x);
      th = wrap(th + sys.omega);
    }
    return x;
  }
  double th = theta;
  for (std::int64_t j = 0; j < -n; ++j) {
    th = wrap(th - sys.omega);
    x = sys.fibre_inverse(th, x);
  }
  return x;
}

double iterate_derivative(const QpfSystem& sys, double theta, double x, std::int64_t n) {
  CompensatedSum logs;
  if (n >= 0) {
    double th = theta;
    for (std::int64_t j = 0; j < n; ++j) {
      logs.add(std::log(sys.fibre_derivative(th, x)));
      x = sys.fibre(th, x);
      th = wrap(th + sys.omega);
    }
  } else {
    double th = theta;
    for (std::int64_t j = 0; j < -n; ++j) {
      th = wrap(th - sys.omega);
      x = sys.fibre_inverse(th, x);
      logs.add(-std::log(sys.fibre_derivative(th, x)));
    }
  }
  return std::exp(logs.value());
}

QpfSystem with_shifted_lift(QpfSystem sys, int m) {
  auto base = sys.lift;
  sys.lift = [base, m](double theta, double xhat) {
    return base(theta, xhat) + m;
  };
  // The projection is unchanged; keep the original circle path.
  if (!sys.circle_map) {
    sys.circle_map = [base](double theta, double x) { return wrap(base(theta, x)); };
  }
  sys.nominal_increment += m;
  return sys;
}

QpfSystem from_circle_map(double omega, std::function<double(double, double)> map,
                          double nominal_increment, const std::string& name) {
  QpfSystem sys;
  sys.omega = wrap(omega);
  sys.name = name;
  sys.nominal_increment = nominal_increment;
  sys.continuity_lift = true;
  sys.circle_map = map;
  double nominal = nominal_increment;
  sys.lift = [map, nominal](double theta, double xhat) {
    double frac = wrap(xhat);
    double y = map(theta, frac);
    double d = y - frac;
    // Representative of the displacement within (-1/2, +1/2] of nominal.
    double m = std::round(nominal - d);
    d += m;
    if (std::abs(d - nominal) >= 0.5 * (1.0 - 1e-12))
      throw domain_error(
          "continuity lift: fibre map moves a point by >= 1/2 relative to "
          "the declared increment");
    return xhat + d;
  };
  return sys;
}

SpotCheckReport spot_check(const QpfSystem& sys, int grid) {
  char buf[160];
  for (int i = 0; i < grid; ++i) {
    double theta = double(i) / grid;
    double prev = sys.lift(theta, 0.0) - 1.0;
    for (int j = 0; j < grid; ++j) {
      double x = double(j) / grid;
      double lifted = sys.lift(theta, x);
      if (std::abs(sys.lift(theta, x + 1.0) - lifted - 1.0) > 1e-9) {
        std::snprintf(buf, sizeof buf,
                      "lift equivariance fails at theta=%g x=%g", theta, x);
        return {false, buf};
      }
      if (circle_dist(wrap(lifted), sys.fibre(theta, x)) > 1e-9) {
        std::snprintf(buf, sizeof buf,
                      "lift does not project to the fibre map at theta=%g x=%g",
                      theta, x);
        return {false, buf};
      }
      if (lifted <= prev) {
        std::snprintf(buf, sizeof buf,
                      "lift not strictly increasing at theta=%g x=%g", theta, x);
        return {false, buf};
      }
      prev = lifted;
      if (sys.is_diffeomorphism()) {
        double d = sys.fibre_derivative(theta, x);
        if (!(d > 0.0)) {
          std::snprintf(buf, sizeof buf,
                        "fibre derivative not positive at theta=%g x=%g", theta, x);
          return {false, buf};
        }
      }
      double y = sys.fibre(theta, x);
      if (circle_dist(sys.fibre_inverse(theta, y), x) > 1e-10) {
        std::snprintf(buf, sizeof buf,
                      "inverse round-trip fails at theta=%g x=%g", theta, x);
        return {false, buf};
      }
    }
  }
  return {true, "ok"};
}

}  // namespace qpcircle
