#pragma once

#include <cstdint>
#include <optional>

#include "qpcircle/system.hpp"

namespace qpcircle {

enum class RotationMethod { pointwise, integrated };

struct RotationEstimate {
  double value = 0.0;       // in [0, 1)
  std::int64_t iterations = 0;
  RotationMethod method = RotationMethod::pointwise;
  /// Circle distance between the n-step and the n/2-step estimates
  /// (Cauchy-style convergence indicator, not an error bound).
  double residual = 0.0;
};

/// Fibrewise rotation number from one orbit: wrap of the mean lifted
/// displacement over n steps. Independent of theta0, xhat0 and of the lift
/// choice; convergence is uniform, which the residual tracks.
RotationEstimate rotation_number_pointwise(const QpfSystem& sys, double theta0,
                                           double xhat0, std::int64_t n);

/// Grid-averaged variant: mean over an m-point uniform theta grid of the
/// n-step lifted displacement of xhat = 0, divided by n. The grid sum runs
/// in fixed index order so reruns are bit-identical.
RotationEstimate rotation_number_integrated(const QpfSystem& sys, int grid,
                                            std::int64_t n);

struct LyapunovEstimate {
  double value = 0.0;       // (1/n)-normalized vertical exponent
  std::int64_t iterations = 0;
  double per_orbit_spread = 0.0;  // max - min over the sampled orbits
};

/// Birkhoff average of log DT along orbits started from `samples` equally
/// spaced fibre points above (theta0, x0). Requires a diffeomorphism.
LyapunovEstimate lyapunov_exponent(const QpfSystem& sys, double theta0,
                                   double x0, std::int64_t n, int samples);

/// The combinatorial data of a p,q-invariant graph: p-periodic components,
/// q-valued each, with winding number k and jumping number l. Predicts the
/// rotation number wrap((k/q) omega + l/(pq)).
struct GraphSignature {
  long long p = 1;
  long long q = 1;
  long long k = 0;
  long long l = 0;

  static GraphSignature make(long long p, long long q, long long k, long long l);
};

double predicted_rotation_number(const GraphSignature& sig, double omega);

/// Exhaustive scan over q <= max_q, |k| < 2q with gcd(k, q) = 1,
/// p <= max_p, 0 <= l < pq with gcd(l, p) = 1 for a signature whose
/// predicted rotation number lies within tol of rho (circle distance).
/// Ties break lexicographically by (q, p, |k|, l).
std::optional<GraphSignature> detect_rational_dependence(double rho, double omega,
                                                         long long max_q,
                                                         long long max_p,
                                                         double tol);

}  // namespace qpcircle
