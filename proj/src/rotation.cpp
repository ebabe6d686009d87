#include "qpcircle/rotation.hpp"

#include <cmath>
#include <tuple>
#include <vector>

#include "qpcircle/orbit.hpp"
#include "qpcircle/util.hpp"

namespace qpcircle {

RotationEstimate rotation_number_pointwise(const QpfSystem& sys, double theta0,
                                           double xhat0, std::int64_t n) {
  if (n < 2) throw domain_error("rotation_number_pointwise: need n >= 2");
  LiftWalker walker(sys, theta0, xhat0);
  std::int64_t half = n / 2;
  double disp_half = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    walker.step();
    if (j + 1 == half) disp_half = walker.displacement();
  }
  RotationEstimate est;
  est.method = RotationMethod::pointwise;
  est.iterations = n;
  est.value = wrap(walker.displacement() / double(n));
  est.residual = circle_dist(est.value, wrap(disp_half / double(half)));
  return est;
}

RotationEstimate rotation_number_integrated(const QpfSystem& sys, int grid,
                                            std::int64_t n) {
  if (grid < 1) throw domain_error("rotation_number_integrated: need grid >= 1");
  if (n < 2) throw domain_error("rotation_number_integrated: need n >= 2");
  std::int64_t half = n / 2;
  std::vector<double> disp(grid), disp_half(grid);
  parallel_for(std::size_t(grid), [&](std::size_t i) {
    LiftWalker walker(sys, double(i) / grid, 0.0);
    for (std::int64_t j = 0; j < n; ++j) {
      walker.step();
      if (j + 1 == half) disp_half[i] = walker.displacement();
    }
    disp[i] = walker.displacement();
  });
  CompensatedSum full, partial;
  for (int i = 0; i < grid; ++i) {
    full.add(disp[i]);
    partial.add(disp_half[i]);
  }
  RotationEstimate est;
  est.method = RotationMethod::integrated;
  est.iterations = n;
  est.value = wrap(full.value() / double(grid) / double(n));
  est.residual =
      circle_dist(est.value, wrap(partial.value() / double(grid) / double(half)));
  return est;
}

LyapunovEstimate lyapunov_exponent(const QpfSystem& sys, double theta0, double x0,
                                   std::int64_t n, int samples) {
  if (!sys.is_diffeomorphism())
    throw unsupported_error("lyapunov_exponent: system '" + sys.name +
                            "' is homeomorphism-only");
  if (n < 1) throw domain_error("lyapunov_exponent: need n >= 1");
  if (samples < 1) throw domain_error("lyapunov_exponent: need samples >= 1");
  std::vector<double> per_orbit(samples);
  parallel_for(std::size_t(samples), [&](std::size_t s) {
    double theta = wrap(theta0);
    double x = wrap(x0 + double(s) / samples);
    CompensatedSum logs;
    for (std::int64_t j = 0; j < n; ++j) {
      logs.add(std::log(sys.fibre_derivative(theta, x)));
      x = sys.fibre(theta, x);
      theta = wrap(theta + sys.omega);
    }
    per_orbit[s] = logs.value() / double(n);
  });
  LyapunovEstimate est;
  est.iterations = n;
  double lo = per_orbit[0], hi = per_orbit[0];
  CompensatedSum mean;
  for (double v : per_orbit) {
    mean.add(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  est.value = mean.value() / samples;
  est.per_orbit_spread = hi - lo;
  return est;
}

GraphSignature GraphSignature::make(long long p, long long q, long long k,
                                    long long l) {
  if (p < 1 || q < 1) throw domain_error("GraphSignature: p, q must be >= 1");
  if (gcd_ll(k, q) != 1)
    throw domain_error("GraphSignature: k must be coprime to q");
  if (gcd_ll(l, p) != 1)
    throw domain_error("GraphSignature: l must be coprime to p");
  return GraphSignature{p, q, k, l};
}

double predicted_rotation_number(const GraphSignature& sig, double omega) {
  return wrap((double(sig.k) / double(sig.q)) * wrap(omega) +
              double(sig.l) / double(sig.p * sig.q));
}

std::optional<GraphSignature> detect_rational_dependence(double rho, double omega,
                                                         long long max_q,
                                                         long long max_p,
                                                         double tol) {
  if (max_q < 1 || max_p < 1)
    throw domain_error("detect_rational_dependence: max_q, max_p must be >= 1");
  rho = wrap(rho);
  std::optional<GraphSignature> best;
  double best_dist = tol;
  for (long long q = 1; q <= max_q; ++q) {
    for (long long p = 1; p <= max_p; ++p) {
      for (long long k = -(2 * q - 1); k <= 2 * q - 1; ++k) {
        if (gcd_ll(k, q) != 1) continue;
        for (long long l = 0; l < p * q; ++l) {
          if (gcd_ll(l, p) != 1) continue;
          GraphSignature cand{p, q, k, l};
          double d = circle_dist(rho, predicted_rotation_number(cand, omega));
          bool better = false;
          if (d <= best_dist) {
            if (!best) {
              better = true;
            } else {
              // strict improvement, or lexicographic (q, p, |k|, l) tie-break
              if (d < best_dist) {
                better = true;
              } else {
                auto key = [](const GraphSignature& s) {
                  return std::tuple(s.q, s.p, std::llabs(s.k), s.l);
                };
                better = key(cand) < key(*best);
              }
            }
          }
          if (better) {
            best = cand;
            best_dist = d;
          }
        }
      }
    }
  }
  return best;
}

}  // namespace qpcircle
