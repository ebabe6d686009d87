#include "qpcircle/qcurve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qpcircle/errors.hpp"
#include "qpcircle/util.hpp"

namespace qpcircle {

namespace {

void check_shape(const QCurve& c) {
  if (c.q < 1) throw domain_error("curve: q must be >= 1");
  const std::size_t m = c.samples.size();
  if (m < std::size_t(2 * c.q) || m % std::size_t(c.q) != 0)
    throw domain_error(
        "curve: sample count must be a multiple of q with at least two "
        "samples per wrap");
  for (double v : c.samples)
    if (!std::isfinite(v)) throw domain_error("curve: non-finite sample");
}

}  // namespace

double QCurve::eval(double theta_hat) const {
  if (!std::isfinite(theta_hat))
    throw domain_error("curve evaluated at non-finite theta_hat");
  const int m = int(samples.size());
  const double wraps = std::floor(theta_hat / q);
  double t = theta_hat - wraps * q;
  if (t >= q) t = 0.0;
  const double u = t * (double(m) / q);
  int i0 = int(u);
  if (i0 >= m) i0 = m - 1;
  const double frac = u - i0;
  const double y0 = samples[std::size_t(i0)];
  const double y1 = (i0 + 1 == m) ? samples[0] + double(declared_k)
                                  : samples[std::size_t(i0) + 1];
  return wraps * double(declared_k) + y0 + (y1 - y0) * frac;
}

QCurve qcurve_from_function(int q, std::int64_t k, int samples_per_wrap,
                            const std::function<double(double)>& lift) {
  if (q < 1 || samples_per_wrap < 2)
    throw domain_error("curve: q >= 1 and at least two samples per wrap required");
  QCurve c;
  c.q = q;
  c.declared_k = k;
  const int m = q * samples_per_wrap;
  c.samples.resize(std::size_t(m));
  for (int j = 0; j < m; ++j)
    c.samples[std::size_t(j)] = lift(double(j) * q / m);
  return c;
}

CurveCheck validate_qcurve(const QCurve& c, double seam_tol, double int_tol) {
  CurveCheck r;
  auto fail = [&r](const std::string& why) {
    r.ok = false;
    r.reason = why;
    return r;
  };

  try {
    check_shape(c);
  } catch (const domain_error& e) {
    return fail(e.what());
  }

  const int m = int(c.samples.size());
  for (int j = 0; j < m; ++j) {
    const double next = (j + 1 == m) ? c.samples[0] + double(c.declared_k)
                                     : c.samples[std::size_t(j) + 1];
    const double gap = std::abs(next - c.samples[std::size_t(j)]);
    if (gap > seam_tol) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "curve: jump %.3g between samples %d and %d exceeds %.3g",
                    gap, j, (j + 1) % m, seam_tol);
      return fail(buf);
    }
  }

  if (c.q > 1 && c.declared_k == 0)
    return fail("curve: a q-curve with q > 1 cannot have winding number 0");
  if (gcd_ll(c.declared_k, c.q) != 1)
    return fail("curve: q and k must be relatively prime");

  // Between grid points the curve is linear, so gamma(t+l) - gamma(t) is
  // piecewise linear with breakpoints on the sample lattice.  It meets an
  // integer iff it comes within int_tol of one at a breakpoint or its floor
  // changes across a segment.
  const int spw = c.samples_per_wrap();
  const auto lifted = [&](int idx) {
    const int w = idx / m;
    return c.samples[std::size_t(idx - w * m)] + double(w) * double(c.declared_k);
  };
  for (int l = 1; l < c.q; ++l) {
    for (int j = 0; j < m; ++j) {
      const double g0 = lifted(j + l * spw) - lifted(j);
      const double g1 = lifted(j + 1 + l * spw) - lifted(j + 1);
      if (dist_to_integer(g0) <= int_tol || std::floor(g0) != std::floor(g1)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "curve: self-intersection, gamma(t+%d) - gamma(t) meets "
                      "an integer near grid index %d",
                      l, j);
        return fail(buf);
      }
    }
  }
  return r;
}

void require_valid_qcurve(const QCurve& c, double seam_tol, double int_tol) {
  CurveCheck r = validate_qcurve(c, seam_tol, int_tol);
  if (!r.ok) throw domain_error(r.reason);
}

WindingNumber winding_number(const QCurve& c, double seam_tol) {
  check_shape(c);
  const std::size_t m = c.samples.size();
  const double last = c.samples[m - 1];
  const double extrapolated = last + (last - c.samples[m - 2]);
  const std::int64_t k = std::llround(extrapolated - c.samples[0]);
  const double mismatch = std::abs(c.samples[0] + double(k) - extrapolated);
  if (mismatch > seam_tol) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "malformed curve: seam mismatch %.3g exceeds %.3g", mismatch,
                  seam_tol);
    throw domain_error(buf);
  }
  if (k != c.declared_k)
    throw domain_error("malformed curve: measured winding disagrees with the declared k");
  if (c.q > 1 && k == 0)
    throw domain_error("winding number: q > 1 requires k != 0");
  if (gcd_ll(k, c.q) != 1)
    throw domain_error("winding number: q and k must be relatively prime");
  return WindingNumber{c.q, k};
}

bool curves_disjoint(const QCurve& a, const QCurve& b, double int_tol) {
  if (a.q != b.q)
    throw domain_error("curves_disjoint: curves must wrap the same number of times");
  const int q = a.q;
  // Union of both sample lattices over one closed loop.  Integer shifts of
  // theta_hat preserve each lattice, so b.eval(t + l) - a.eval(t) is linear
  // between consecutive union points and a floor change flags a crossing.
  std::vector<double> ts;
  ts.reserve(a.samples.size() + b.samples.size());
  for (std::size_t j = 0; j < a.samples.size(); ++j)
    ts.push_back(double(j) * q / double(a.samples.size()));
  for (std::size_t j = 0; j < b.samples.size(); ++j)
    ts.push_back(double(j) * q / double(b.samples.size()));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  for (int l = 0; l < q; ++l) {
    double prev = b.eval(double(l)) - a.eval(0.0);
    for (std::size_t i = 0; i <= ts.size(); ++i) {
      const double t = (i == ts.size()) ? double(q) : ts[i];
      const double h = b.eval(t + double(l)) - a.eval(t);
      if (dist_to_integer(h) <= int_tol) return false;
      if (std::floor(h) != std::floor(prev)) return false;
      prev = h;
    }
  }
  return true;
}

}  // namespace qpcircle
