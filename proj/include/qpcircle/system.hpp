#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qpcircle/circle.hpp"

namespace qpcircle {

enum class Smoothness { homeomorphism, diffeomorphism };

/// Skew product T(theta, x) = (theta + omega, fibre map at theta applied
/// to x) over the irrational rotation by omega. Fibre maps are
/// orientation-preserving circle homeomorphisms; the lift is the single
/// source of truth and must satisfy lift(theta, xhat + 1) = lift(theta,
/// xhat) + 1 and strict monotonicity in xhat.
struct QpfSystem {
  double omega = 0.0;
  Smoothness smoothness = Smoothness::homeomorphism;

  /// (theta, xhat) -> lifted image; theta canonical, xhat any real.
  std::function<double(double, double)> lift;
  /// (theta, x) -> DT_theta(x) > 0, canonical x; empty for homeomorphisms.
  std::function<double(double, double)> derivative;
  /// (theta, x) -> preimage of x under the fibre map at theta; optional,
  /// a monotone solve on the lift fills in when absent.
  std::function<double(double, double)> inverse;
  /// Optional direct circle map; defaults to wrap(lift). Set for systems
  /// whose lift was synthesized from a bare circle map, so that direct
  /// iteration and unwrapped iteration share one arithmetic path.
  std::function<double(double, double)> circle_map;

  /// Declared per-step displacement scale. Continuity-based unwrapping
  /// anchors its first step to this value.
  double nominal_increment = 0.0;
  /// True when the lift was synthesized from a bare circle map by the
  /// continuity rule rather than given in closed form.
  bool continuity_lift = false;

  std::string name;
  std::vector<std::pair<std::string, double>> params;

  bool is_diffeomorphism() const { return smoothness == Smoothness::diffeomorphism; }

  /// Fibre map at theta, canonical in and out.
  double fibre(double theta, double x) const;
  /// DT_theta(x); throws unsupported_error for homeomorphism-only systems.
  double fibre_derivative(double theta, double x) const;
  /// Inverse fibre map at theta; monotone bisection/Newton fallback.
  double fibre_inverse(double theta, double x) const;
};

/// T^n restricted to the fibre over theta, signed n (negative iterates go
/// through the inverse fibre maps; T^{-1}(theta, x) = (theta - omega,
/// inverse fibre at theta - omega)).
double fibre_iterate(const QpfSystem& sys, double theta, double x, std::int64_t n);

/// D(T^n)_theta(x) by the chain rule along the orbit, signed n.
double iterate_derivative(const QpfSystem& sys, double theta, double x, std::int64_t n);

/// Same system with the lift replaced by lift + m. Rotation numbers and
/// jumping data must not change; used by the lift-independence tests.
QpfSystem with_shifted_lift(QpfSystem sys, int m);

/// Wraps a bare circle map into a system by the continuity rule: the lift
/// displacement is chosen within (-1/2, +1/2) of nominal_increment.
QpfSystem from_circle_map(double omega, std::function<double(double, double)> map,
                          double nominal_increment, const std::string& name);

struct SpotCheckReport {
  bool ok = true;
  std::string message;
};

/// Samples a (theta, x) grid and checks the structural invariants: lift
/// equivariance, projection consistency, monotonicity, derivative
/// positivity, inverse round-trip.
SpotCheckReport spot_check(const QpfSystem& sys, int grid = 64);

}  // namespace qpcircle
