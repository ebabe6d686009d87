#pragma once

#include <cstdint>
#include <vector>

#include "qpcircle/system.hpp"

namespace qpcircle {

/// Forward orbit of a lifted starting point. samples[j] is the lifted
/// value after j steps; canonical[j] is the matching circle orbit,
/// computed through the exact same fibre-map arithmetic as direct circle
/// iteration, so projecting the orbit and iterating the circle map agree
/// bit for bit.
struct LiftedOrbit {
  double theta0 = 0.0;
  double xhat0 = 0.0;
  std::vector<double> samples;
  std::vector<double> canonical;

  std::int64_t steps() const { return std::int64_t(samples.size()) - 1; }
};

/// Iterates the lift n times from (theta, xhat0). Closed-form lifts are
/// validated by projection consistency at every step; continuity lifts
/// additionally enforce the unwrapping window (each displacement within
/// (-1/2, +1/2) of the previous one, the first anchored to the declared
/// nominal increment), failing with the step index.
LiftedOrbit unwrap_orbit(const QpfSystem& sys, double theta, double xhat0,
                         std::int64_t n);

/// Streaming lifted iteration for long orbits: winding numbers accumulate
/// in an integer so displacement totals stay exact over millions of steps.
struct LiftWalker {
  explicit LiftWalker(const QpfSystem& sys, double theta0, double x0);

  void step();

  const QpfSystem& sys;
  double theta;
  double x;                 // canonical fibre coordinate
  std::int64_t winding = 0; // accumulated integer part of the displacement
  double frac_start;        // x at construction

  /// Lifted displacement accumulated so far, exact split as winding + frac.
  double displacement() const { return double(winding) + (x - frac_start); }
};

}  // namespace qpcircle
