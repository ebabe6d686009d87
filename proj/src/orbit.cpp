#include "qpcircle/orbit.hpp"

#include <cmath>
#include <string>

namespace qpcircle {

LiftWalker::LiftWalker(const QpfSystem& s, double theta0, double x0)
    : sys(s), theta(wrap(theta0)), x(wrap(x0)), frac_start(x) {}

void LiftWalker::step() {
  double y = sys.lift(theta, x);
  double xn = wrap(y);
  winding += std::llround(y - xn);
  x = xn;
  theta = wrap(theta + sys.omega);
}

LiftedOrbit unwrap_orbit(const QpfSystem& sys, double theta, double xhat0,
                         std::int64_t n) {
  if (n < 0) throw domain_error("unwrap_orbit: step count must be >= 0");
  LiftedOrbit orbit;
  orbit.theta0 = wrap(theta);
  orbit.xhat0 = xhat0;
  orbit.samples.reserve(std::size_t(n) + 1);
  orbit.canonical.reserve(std::size_t(n) + 1);

  double x = wrap(xhat0);
  double whole = xhat0 - x;  // exact: xhat0 and its fractional part share bits
  std::int64_t winding = 0;
  double th = orbit.theta0;
  double prev_d = sys.nominal_increment;

  orbit.samples.push_back(xhat0);
  orbit.canonical.push_back(x);

  for (std::int64_t j = 0; j < n; ++j) {
    if (sys.continuity_lift) {
      double y = sys.fibre(th, x);
      double raw = y - x;
      std::int64_t k = std::llround(prev_d - raw);
      double d = raw + double(k);
      if (std::abs(d - prev_d) >= 0.5 * (1.0 - 1e-12))
        throw domain_error("unwrap_orbit: ambiguous unwrapping at step " +
                           std::to_string(j) +
                           " (per-step jump >= 1/2 relative to the declared increment)");
      winding += k;
      x = y;
      prev_d = d;
    } else {
      double y = sys.lift(th, x);
      double xn = sys.fibre(th, x);
      if (circle_dist(wrap(y), xn) > 1e-9)
        throw domain_error("unwrap_orbit: lift does not project to the circle map at step " +
                           std::to_string(j));
      winding += std::llround(y - xn);
      x = xn;
    }
    th = wrap(th + sys.omega);
    orbit.samples.push_back(whole + double(winding) + x);
    orbit.canonical.push_back(x);
  }
  return orbit;
}

}  // namespace qpcircle
