#include "qpcircle/circle.hpp"

#include <cmath>

#include "qpcircle/util.hpp"

namespace qpcircle {

double wrap(double x) {
  if (!std::isfinite(x)) throw domain_error("wrap: non-finite input");
  double r = x - std::floor(x);
  return r < 1.0 ? r : 0.0;
}

double circle_dist(double a, double b) {
  double d = std::abs(a - b);
  return d <= 0.5 ? d : 1.0 - d;
}

double circle_delta(double from, double to) {
  double d = to - from;
  if (d < -0.5) d += 1.0;
  if (d >= 0.5) d -= 1.0;
  return d;
}

double dist_to_integer(double x) {
  double f = std::abs(x - std::round(x));
  return f;
}

bool cyclic_ccw(double a, double b, double c) {
  double ab = wrap(b - a);
  double ac = wrap(c - a);
  return ab > 0.0 && ac > 0.0 && ab < ac;
}

CirclePoint::CirclePoint(double canonical) : v_(canonical) {
  if (!(canonical >= 0.0 && canonical < 1.0))
    throw domain_error("CirclePoint: value not in [0,1)");
}

CircleInterval::CircleInterval(double center, double half_width)
    : center_(wrap(center)), half_width_(half_width) {
  if (!(half_width > 0.0 && half_width < 0.5))
    throw domain_error("CircleInterval: half width must lie in (0, 1/2)");
}

bool CircleInterval::contains(double x) const {
  return circle_dist(wrap(x), center_) < half_width_;
}

bool CircleInterval::contains_interval(const CircleInterval& j, double slack) const {
  return circle_dist(j.center_, center_) <= half_width_ - j.half_width_ + slack;
}

CircleInterval CircleInterval::middle(double alpha) const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw domain_error("CircleInterval::middle: alpha must lie in (0, 1]");
  return CircleInterval(center_, half_width_ * alpha);
}

CircleInterval CircleInterval::translated(double dx) const {
  return CircleInterval(wrap(center_ + dx), half_width_);
}

std::optional<CircleInterval> CircleInterval::intersect(const CircleInterval& a,
                                                        const CircleInterval& b) {
  if (a.length() + b.length() >= 1.0)
    throw domain_error("CircleInterval::intersect: combined length must be < 1");
  double d = circle_delta(a.center_, b.center_);
  double lo = std::max(-a.half_width_, d - b.half_width_);
  double hi = std::min(a.half_width_, d + b.half_width_);
  if (hi - lo <= 0.0) return std::nullopt;
  return CircleInterval(wrap(a.center_ + 0.5 * (lo + hi)), 0.5 * (hi - lo));
}

bool arcs_overlap(const Arc& a, const Arc& b) {
  return wrap(b.lo - a.lo) < a.len || wrap(a.lo - b.lo) < b.len;
}

}  // namespace qpcircle
