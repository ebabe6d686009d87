#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qpcircle/circle.hpp"

namespace qpcircle {

/// A closed curve on the torus that wraps q times horizontally before
/// closing up, stored as lift samples on the uniform grid
/// theta_hat_j = j * q / M over [0, q), M a multiple of q. The closure
/// relation gamma(theta_hat + q) = gamma(theta_hat) + k is built into
/// evaluation, so the samples alone determine the curve on all of R.
struct QCurve {
  int q = 1;
  std::int64_t declared_k = 0;
  std::vector<double> samples;

  int samples_per_wrap() const { return int(samples.size()) / q; }

  /// Piecewise-linear lift value at any real theta_hat.
  double eval(double theta_hat) const;
};

QCurve qcurve_from_function(int q, std::int64_t k, int samples_per_wrap,
                            const std::function<double(double)>& lift);

struct CurveCheck {
  bool ok = true;
  std::string reason;
};

/// Structural validation: grid shape, continuity (adjacent samples and the
/// closure seam move by less than seam_tol), self-avoidance
/// (gamma(theta_hat + l) - gamma(theta_hat) stays at least int_tol away
/// from the integers for 0 < l < q, checked on the grid), k != 0 when
/// q > 1, and gcd(q, k) = 1.
CurveCheck validate_qcurve(const QCurve& c, double seam_tol = 0.25,
                           double int_tol = 1e-7);

/// Throws domain_error with the check's reason on failure.
void require_valid_qcurve(const QCurve& c, double seam_tol = 0.25,
                          double int_tol = 1e-7);

struct WindingNumber {
  int q = 1;
  std::int64_t k = 0;
};

/// Recovers k as round(gamma(q) - gamma(0)) with gamma(q) linearly
/// extrapolated past the last sample. Throws domain_error when the seam
/// mismatch exceeds seam_tol, when the recovered k disagrees with the
/// declared one, or when (q, k) violates coprimality.
WindingNumber winding_number(const QCurve& c, double seam_tol = 0.25);

/// True when the two curves, as point sets on the torus, stay at least
/// int_tol apart in the fibre direction everywhere. Both curves must wrap
/// the same number of times.
bool curves_disjoint(const QCurve& a, const QCurve& b, double int_tol = 1e-9);

}  // namespace qpcircle
