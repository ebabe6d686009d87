#include "qpcircle/variation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qpcircle/errors.hpp"
#include "qpcircle/util.hpp"

namespace qpcircle {

namespace {

// Graph over an interval, given as uniform samples with both endpoints
// included; u in [0, 1] is the relative position across the interval.
double interp_graph(const std::vector<double>& samples, double u) {
  const int m = int(samples.size()) - 1;
  double pos = std::clamp(u, 0.0, 1.0) * m;
  int j = int(pos);
  if (j >= m) j = m - 1;
  const double frac = pos - j;
  const double a = samples[std::size_t(j)];
  const double b = samples[std::size_t(j) + 1];
  return wrap(a + circle_delta(a, b) * frac);
}

// Edge orbits of the strip between two graphs over I, one signed step at a
// time. Strip t lives over I shifted by sign * t * omega.
struct StripCache {
  const QpfSystem* sys;
  CircleInterval I;
  int quad;
  int dir;
  std::vector<double> base;                // relative grid thetas over I
  std::vector<std::vector<double>> lo, hi; // [step][grid point]

  StripCache(const QpfSystem& s, const CircleInterval& interval,
             const std::vector<double>& phi, const std::vector<double>& psi,
             int quad_points, int direction)
      : sys(&s), I(interval), quad(quad_points), dir(direction) {
    base.resize(std::size_t(quad) + 1);
    lo.emplace_back(std::size_t(quad) + 1);
    hi.emplace_back(std::size_t(quad) + 1);
    for (int u = 0; u <= quad; ++u) {
      const double rel = double(u) / quad;
      base[std::size_t(u)] = rel;
      lo[0][std::size_t(u)] = interp_graph(phi, rel);
      hi[0][std::size_t(u)] = interp_graph(psi, rel);
    }
  }

  int steps() const { return int(lo.size()); }

  double theta_at(int t, int u) const {
    return wrap(I.lower() + base[std::size_t(u)] * I.length() +
                dir * t * sys->omega);
  }

  void extend() {
    const int t = steps();
    std::vector<double> nlo(std::size_t(quad) + 1), nhi(std::size_t(quad) + 1);
    for (int u = 0; u <= quad; ++u) {
      if (dir > 0) {
        const double th = theta_at(t - 1, u);
        nlo[std::size_t(u)] = sys->fibre(th, lo[std::size_t(t) - 1][std::size_t(u)]);
        nhi[std::size_t(u)] = sys->fibre(th, hi[std::size_t(t) - 1][std::size_t(u)]);
      } else {
        const double th = theta_at(t, u);
        nlo[std::size_t(u)] = sys->fibre_inverse(th, lo[std::size_t(t) - 1][std::size_t(u)]);
        nhi[std::size_t(u)] = sys->fibre_inverse(th, hi[std::size_t(t) - 1][std::size_t(u)]);
      }
    }
    lo.push_back(std::move(nlo));
    hi.push_back(std::move(nhi));
  }

  Arc arc_at_grid(int t, int u) const {
    const double a = lo[std::size_t(t)][std::size_t(u)];
    return Arc{a, wrap(hi[std::size_t(t)][std::size_t(u)] - a)};
  }

  Arc arc_interp(int t, double theta) const {
    const double lower = wrap(I.lower() + dir * t * sys->omega);
    double pos = wrap(theta - lower) / I.length() * quad;
    pos = std::clamp(pos, 0.0, double(quad));
    int u = int(pos);
    if (u >= quad) u = quad - 1;
    const double frac = pos - u;
    const double a0 = lo[std::size_t(t)][std::size_t(u)];
    const double a1 = lo[std::size_t(t)][std::size_t(u) + 1];
    const double b0 = hi[std::size_t(t)][std::size_t(u)];
    const double b1 = hi[std::size_t(t)][std::size_t(u) + 1];
    const double a = wrap(a0 + circle_delta(a0, a1) * frac);
    const double b = wrap(b0 + circle_delta(b0, b1) * frac);
    return Arc{a, wrap(b - a)};
  }

  bool strips_overlap(int t1, int t2) const {
    const CircleInterval i1 = I.translated(dir * t1 * sys->omega);
    const CircleInterval i2 = I.translated(dir * t2 * sys->omega);
    if (circle_dist(i1.center(), i2.center()) >= I.length()) return false;
    for (int u = 0; u <= quad; ++u) {
      const double th1 = theta_at(t1, u);
      if (i2.contains(th1) &&
          arcs_overlap(arc_at_grid(t1, u), arc_interp(t2, th1)))
        return true;
      const double th2 = theta_at(t2, u);
      if (i1.contains(th2) &&
          arcs_overlap(arc_at_grid(t2, u), arc_interp(t1, th2)))
        return true;
    }
    return false;
  }
};

void check_graph_samples(const std::vector<double>& g, const char* which) {
  if (g.size() < 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "distortion: graph %s needs at least two samples",
                  which);
    throw domain_error(buf);
  }
  for (double v : g)
    if (!std::isfinite(v) || v < 0.0 || v >= 1.0)
      throw domain_error("distortion: graph samples must be canonical circle points");
}

}  // namespace

double fibre_log_derivative_variation(const QpfSystem& sys, double theta,
                                      int x_grid) {
  if (x_grid < 2) throw domain_error("variation: need at least two x cells");
  double total = 0.0;
  double prev = std::log(sys.fibre_derivative(theta, 0.0));
  for (int i = 1; i <= x_grid; ++i) {
    const double x = wrap(double(i) / x_grid);
    const double cur = std::log(sys.fibre_derivative(theta, x));
    total += std::abs(cur - prev);
    prev = cur;
  }
  return total;
}

VariationEstimate variation(const QpfSystem& sys, int theta_grid, int max_x_grid) {
  if (theta_grid < 1) throw domain_error("variation: need at least one fibre");
  VariationEstimate est;
  est.theta_grid = theta_grid;
  double prev_value = -1.0;
  for (int m = 256; m <= std::max(256, max_x_grid); m *= 2) {
    std::vector<double> per_fibre(static_cast<std::size_t>(theta_grid));
    parallel_for(std::size_t(theta_grid), [&](std::size_t j) {
      const double theta = (double(j) + 0.5) / theta_grid;
      per_fibre[j] = fibre_log_derivative_variation(sys, theta, m);
    });
    CompensatedSum acc;
    double worst = 0.0;
    for (double v : per_fibre) {
      acc.add(v);
      worst = std::max(worst, v);
    }
    est.value = acc.value() / theta_grid;
    est.max_fibre = worst;
    est.x_grid = m;
    est.trace.emplace_back(m, est.value);
    if (prev_value >= 0.0 &&
        std::abs(est.value - prev_value) <= 1e-3 * std::max(1.0, std::abs(est.value)))
      break;
    prev_value = est.value;
  }
  return est;
}

DistortionBound distortion_integral(const QpfSystem& sys, const CircleInterval& I,
                                    const std::vector<double>& phi,
                                    const std::vector<double>& psi, int n,
                                    double s, int quad,
                                    std::optional<double> total_variation) {
  check_graph_samples(phi, "phi");
  check_graph_samples(psi, "psi");
  if (n == 0) throw domain_error("distortion: need a nonzero iterate count");
  if (!(s > 0.0)) throw domain_error("distortion: exponent s must be positive");
  if (quad < 2) throw domain_error("distortion: need at least two quadrature cells");

  const int dir = n > 0 ? 1 : -1;
  const int N = std::abs(n);
  StripCache cache(sys, I, phi, psi, quad, dir);
  while (cache.steps() < N) cache.extend();
  for (int t1 = 0; t1 + 1 < N; ++t1)
    for (int t2 = t1 + 1; t2 < N; ++t2)
      if (cache.strips_overlap(t1, t2)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "strip images %+d and %+d overlap",
                      dir * t1, dir * t2);
        throw hypothesis_error(buf);
      }

  DistortionBound out;
  out.iterations = n;
  out.s = s;
  out.variation_used =
      total_variation ? *total_variation : variation(sys).value;

  CompensatedSum acc;
  for (int u = 0; u < quad; ++u) {
    const double rel = (double(u) + 0.5) / quad;
    const double theta = wrap(I.lower() + rel * I.length());
    const double xphi = interp_graph(phi, rel);
    const double xpsi = interp_graph(psi, rel);
    const double dpsi = iterate_derivative(sys, theta, xpsi, n);
    const double dphi = iterate_derivative(sys, theta, xphi, n);
    acc.add(std::pow(dpsi / dphi, s));
  }
  out.lhs = acc.value() / quad * I.length();
  out.rhs = I.length() * std::exp(-s * out.variation_used / I.length());
  out.margin = out.lhs - out.rhs;
  return out;
}

int max_disjoint_iterates(const QpfSystem& sys, const CircleInterval& I,
                          const std::vector<double>& phi,
                          const std::vector<double>& psi, int horizon,
                          int quad) {
  check_graph_samples(phi, "phi");
  check_graph_samples(psi, "psi");
  if (horizon == 0) return 0;
  const int dir = horizon > 0 ? 1 : -1;
  const int H = std::abs(horizon);
  StripCache cache(sys, I, phi, psi, quad, dir);
  for (int t = 1; t <= H; ++t) {
    cache.extend();
    for (int prev = 0; prev < t; ++prev)
      if (cache.strips_overlap(prev, t)) return t - 1;
  }
  return H;
}

}  // namespace qpcircle
