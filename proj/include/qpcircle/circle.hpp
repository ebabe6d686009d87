#pragma once

#include <optional>

#include "qpcircle/errors.hpp"

namespace qpcircle {

/// Canonical representative of x on R/Z, in [0, 1).
/// A result that rounds to exactly 1.0 (tiny negative inputs) maps to 0.
/// Throws domain_error for non-finite input.
double wrap(double x);

/// min(|a - b|, 1 - |a - b|) for canonical a, b.
double circle_dist(double a, double b);

/// Signed representative of (to - from) in [-1/2, 1/2).
double circle_delta(double from, double to);

/// Distance from x to the nearest integer.
double dist_to_integer(double x);

/// True when b lies strictly inside the counterclockwise arc from a to c.
/// Degenerate triples (any two arguments equal mod 1) are never "inside".
bool cyclic_ccw(double a, double b, double c);

/// A point of the circle, stored canonically. Thin wrapper used where the
/// canonical-representative contract matters; numeric kernels pass bare
/// doubles with the same convention.
class CirclePoint {
public:
  CirclePoint() = default;
  explicit CirclePoint(double canonical);
  static CirclePoint from(double any_real) { return CirclePoint(wrap(any_real)); }
  double value() const { return v_; }

private:
  double v_ = 0.0;
};

/// Open arc given by center and half-width, 0 < half_width < 1/2.
class CircleInterval {
public:
  CircleInterval(double center, double half_width);

  double center() const { return center_; }
  double half_width() const { return half_width_; }
  double length() const { return 2.0 * half_width_; }
  double lower() const { return wrap(center_ - half_width_); }
  double upper() const { return wrap(center_ + half_width_); }

  bool contains(double x) const;
  /// J subset of this interval (closure-tolerant by slack >= 0).
  bool contains_interval(const CircleInterval& j, double slack = 0.0) const;

  /// Symmetric middle part of relative length alpha in (0, 1].
  CircleInterval middle(double alpha) const;
  CircleInterval translated(double dx) const;

  /// Overlap arc, or nullopt when the open intervals are disjoint.
  /// Requires length() + other.length() < 1 so the overlap is one arc.
  static std::optional<CircleInterval> intersect(const CircleInterval& a,
                                                 const CircleInterval& b);

private:
  double center_;
  double half_width_;
};

/// Arc with an orientation: starts at lo, extends counterclockwise by len,
/// 0 < len < 1. The image of an interval under an orientation-preserving
/// circle map is always of this form.
struct Arc {
  double lo = 0.0;
  double len = 0.0;

  double hi() const { return wrap(lo + len); }
  double mid() const { return wrap(lo + 0.5 * len); }
  bool contains(double x) const { return wrap(x - lo) < len; }
};

bool arcs_overlap(const Arc& a, const Arc& b);

}  // namespace qpcircle
