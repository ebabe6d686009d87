#include "qpcircle/tube.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "qpcircle/circle.hpp"
#include "qpcircle/errors.hpp"
#include "qpcircle/qcurve.hpp"

namespace qpcircle {

namespace {

void check_tube_shape(const Tube& t) {
  const int G = t.fibres();
  if (G < 2) throw domain_error("tube: need at least two fibres");
  if (t.p < 1 || t.q < 1) throw domain_error("tube: p and q must be >= 1");
  if (int(t.arcs.size()) != G)
    throw domain_error("tube: grid and arc row counts disagree");
  for (int j = 0; j < G; ++j) {
    if (int(t.arcs[std::size_t(j)].size()) != t.p)
      throw domain_error("tube: sub-tube count varies across fibres");
    for (int i = 0; i < t.p; ++i) {
      if (int(t.arcs[std::size_t(j)][std::size_t(i)].size()) != t.q)
        throw domain_error("tube: arcs per sub-tube vary across fibres");
      for (const Arc& a : t.arcs[std::size_t(j)][std::size_t(i)]) {
        if (!std::isfinite(a.lo) || !std::isfinite(a.len) || a.lo < 0.0 ||
            a.lo >= 1.0 || a.len <= 0.0 || a.len >= 1.0)
          throw domain_error("tube: arcs must be nonempty proper intervals "
                             "with canonical endpoints");
      }
    }
  }
}

std::vector<Arc> fibre_arcs(const Tube& t, int j) {
  std::vector<Arc> all;
  all.reserve(std::size_t(t.p) * std::size_t(t.q));
  for (int i = 0; i < t.p; ++i)
    for (int s = 0; s < t.q; ++s)
      all.push_back(t.arcs[std::size_t(j)][std::size_t(i)][std::size_t(s)]);
  return all;
}

// Arcs of one sub-tube at an off-grid base point, by endpoint interpolation
// along the strand; across the grid seam slot s continues as slot s+1.
std::vector<Arc> interp_arcs(const Tube& t, int i, double theta) {
  const int G = t.fibres();
  double pos = wrap(theta) * G;
  int j0 = int(pos);
  if (j0 >= G) j0 = G - 1;
  const double frac = pos - j0;
  const int j1 = (j0 + 1) % G;
  std::vector<Arc> out(std::size_t(t.q));
  for (int s = 0; s < t.q; ++s) {
    const Arc& a = t.arcs[std::size_t(j0)][std::size_t(i)][std::size_t(s)];
    const Arc& b = (j1 == 0)
                       ? t.arcs[0][std::size_t(i)][std::size_t((s + 1) % t.q)]
                       : t.arcs[std::size_t(j1)][std::size_t(i)][std::size_t(s)];
    const double lo = wrap(a.lo + circle_delta(a.lo, b.lo) * frac);
    const double hi = wrap(a.hi() + circle_delta(a.hi(), b.hi()) * frac);
    out[std::size_t(s)] = Arc{lo, wrap(hi - lo)};
  }
  return out;
}

int uf_find(std::vector<int>& parent, int x) {
  while (parent[std::size_t(x)] != x) {
    parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
    x = parent[std::size_t(x)];
  }
  return x;
}

void uf_union(std::vector<int>& parent, int a, int b) {
  parent[std::size_t(uf_find(parent, a))] = uf_find(parent, b);
}

}  // namespace

Tube make_tube_around_graph(const QpfSystem& sys, const MultiGraph& g,
                            const std::function<double(double)>& half_width,
                            double tol) {
  const std::vector<GraphPart> parts = decompose_graph(sys, g, tol, 0);
  if (parts.size() != 1) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "tube: graph splits into %d invariant parts; build tubes "
                  "around one part at a time",
                  int(parts.size()));
    throw domain_error(buf);
  }
  const GraphPart& part = parts[0];
  const int p = int(part.signature.p);
  const int q = int(part.signature.q);
  const int G = int(part.graph.grid.size());

  Tube t;
  t.p = p;
  t.q = q;
  t.grid = part.graph.grid;
  t.arcs.assign(std::size_t(G),
                std::vector<std::vector<Arc>>(std::size_t(p),
                                              std::vector<Arc>(std::size_t(q))));

  for (int j = 0; j < G; ++j) {
    const double eps = half_width(t.grid[std::size_t(j)]);
    if (!(eps > 0.0) || eps > 0.25)
      throw domain_error("tube: half-width must lie in (0, 1/4]");
    double min_gap = 1.0;
    const auto& row = part.graph.values[std::size_t(j)];
    const int n = int(row.size());
    if (n > 1)
      for (int u = 0; u < n; ++u)
        min_gap = std::min(min_gap,
                           wrap(row[std::size_t((u + 1) % n)] - row[std::size_t(u)]));
    if (2.0 * eps >= min_gap) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "tube: half-width %.3g does not separate branches at "
                    "fibre %d (smallest gap %.3g)",
                    eps, j, min_gap);
      throw domain_error(buf);
    }
    for (int i = 0; i < p; ++i) {
      const QCurve& c = part.curves[std::size_t(part.dynamic_order[std::size_t(i)])];
      for (int s = 0; s < q; ++s) {
        const double v = wrap(c.samples[std::size_t(j + s * G)]);
        t.arcs[std::size_t(j)][std::size_t(i)][std::size_t(s)] =
            Arc{wrap(v - eps), 2.0 * eps};
      }
    }
  }
  return t;
}

Tube make_tube_around_graph(const QpfSystem& sys, const MultiGraph& g,
                            double half_width, double tol) {
  return make_tube_around_graph(
      sys, g, [half_width](double) { return half_width; }, tol);
}

MultiGraph tube_boundary_graph(const Tube& t, bool upper) {
  check_tube_shape(t);
  MultiGraph g;
  g.grid = t.grid;
  g.values.resize(std::size_t(t.fibres()));
  for (int j = 0; j < t.fibres(); ++j)
    for (int i = 0; i < t.p; ++i)
      for (int s = 0; s < t.q; ++s) {
        const Arc& a = t.arcs[std::size_t(j)][std::size_t(i)][std::size_t(s)];
        g.values[std::size_t(j)].push_back(upper ? a.hi() : a.lo);
      }
  return g;
}

TubeReport verify_tube(const QpfSystem& sys, const Tube& t, double tol) {
  TubeReport r;
  try {
    check_tube_shape(t);
  } catch (const error& e) {
    r.reason = e.what();
    return r;
  }
  const int G = t.fibres();
  const int p = t.p;
  const int q = t.q;
  const int npq = p * q;

  r.intervals_ok = true;
  for (int j = 0; j < G && r.intervals_ok; ++j) {
    const std::vector<Arc> all = fibre_arcs(t, j);
    for (int a = 0; a < npq && r.intervals_ok; ++a)
      for (int b = a + 1; b < npq; ++b)
        if (arcs_overlap(all[std::size_t(a)], all[std::size_t(b)])) {
          char buf[96];
          std::snprintf(buf, sizeof buf, "arcs overlap at fibre %d", j);
          r.reason = buf;
          r.intervals_ok = false;
          break;
        }
  }
  if (!r.intervals_ok) return r;

  r.connected_ok = true;
  for (int i = 0; i < p && r.connected_ok; ++i) {
    std::vector<int> parent(std::size_t(G) * std::size_t(q));
    for (int x = 0; x < G * q; ++x) parent[std::size_t(x)] = x;
    for (int j = 0; j < G; ++j) {
      const int jn = (j + 1) % G;
      for (int s = 0; s < q; ++s)
        for (int s2 = 0; s2 < q; ++s2)
          if (arcs_overlap(t.arcs[std::size_t(j)][std::size_t(i)][std::size_t(s)],
                           t.arcs[std::size_t(jn)][std::size_t(i)][std::size_t(s2)]))
            uf_union(parent, j * q + s, jn * q + s2);
    }
    int pieces = 0;
    for (int x = 0; x < G * q; ++x)
      if (uf_find(parent, x) == x) ++pieces;
    if (pieces != 1) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "sub-tube %d splits into %d pieces over the base",
                    i, pieces);
      r.reason = buf;
      r.connected_ok = false;
    }
  }
  if (!r.connected_ok) return r;

  double max_defect = 0.0;
  for (int j = 0; j < G; ++j) {
    const double theta = t.grid[std::size_t(j)];
    const double theta_next = wrap(theta + sys.omega);
    for (int i = 0; i < p; ++i) {
      const std::vector<Arc> target = interp_arcs(t, (i + 1) % p, theta_next);
      for (int s = 0; s < q; ++s) {
        const Arc& a = t.arcs[std::size_t(j)][std::size_t(i)][std::size_t(s)];
        const double lo_img = sys.fibre(theta, a.lo);
        const double hi_img = sys.fibre(theta, a.hi());
        const Arc img{lo_img, wrap(hi_img - lo_img)};
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int s2 = 0; s2 < q; ++s2) {
          const double d = circle_dist(img.mid(), target[std::size_t(s2)].mid());
          if (d < best_d) {
            best_d = d;
            best = s2;
          }
        }
        const Arc& tgt = target[std::size_t(best)];
        max_defect = std::max(max_defect, circle_dist(img.lo, tgt.lo));
        max_defect = std::max(max_defect, circle_dist(img.hi(), tgt.hi()));
      }
    }
  }
  r.max_defect = max_defect;
  r.invariance_ok = max_defect <= tol;
  if (!r.invariance_ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "image arcs miss the next sub-tube (defect %.3g, tol %.3g)",
                  max_defect, tol);
    r.reason = buf;
    return r;
  }

  try {
    // Winding and jumping from midpoint strands; this is where the q arcs
    // per fibre are tied together into lifted curves.
    std::vector<QCurve> strand(static_cast<std::size_t>(p));
    std::int64_t winding = 0;
    double max_half = 0.0;
    for (int i = 0; i < p; ++i) {
      QCurve c;
      c.q = q;
      c.samples.resize(std::size_t(q) * std::size_t(G));
      double acc = t.arcs[0][std::size_t(i)][0].mid();
      double prev = acc;
      c.samples[0] = acc;
      for (int step = 1; step <= q * G; ++step) {
        const int j = step % G;
        const int s = (step / G) % q;
        const double m = t.arcs[std::size_t(j)][std::size_t(i)][std::size_t(s)].mid();
        const double d = circle_delta(prev, m);
        if (std::abs(d) > 0.25)
          throw domain_error("tube: midpoint strand moves more than a quarter "
                             "turn per grid step; grid too coarse");
        acc += d;
        prev = m;
        if (step < q * G) c.samples[std::size_t(step)] = acc;
      }
      const double k_real = acc - c.samples[0];
      const std::int64_t k = std::llround(k_real);
      if (std::abs(k_real - double(k)) > 1e-6)
        throw domain_error("tube: midpoint strand closed with a non-integer winding");
      if (i == 0)
        winding = k;
      else if (k != winding)
        throw domain_error("tube: sub-tubes disagree on the winding number");
      c.declared_k = k;
      strand[std::size_t(i)] = std::move(c);
      for (int s = 0; s < q; ++s)
        max_half = std::max(max_half,
                            0.5 * t.arcs[0][std::size_t(i)][std::size_t(s)].len);
    }

    std::vector<std::pair<double, int>> order;
    order.reserve(std::size_t(npq));
    for (int i = 0; i < p; ++i)
      for (int s = 0; s < q; ++s)
        order.emplace_back(t.arcs[0][std::size_t(i)][std::size_t(s)].mid(), i);
    std::sort(order.begin(), order.end());

    std::vector<int> label(std::size_t(p), -1);
    std::vector<QCurve> by_label(static_cast<std::size_t>(p));
    std::vector<double> anchors;
    std::vector<int> component_of;
    int next_label = 0;
    for (const auto& [value, i] : order) {
      if (label[std::size_t(i)] < 0) {
        label[std::size_t(i)] = next_label++;
        by_label[std::size_t(label[std::size_t(i)])] = strand[std::size_t(i)];
      }
      anchors.push_back(value);
      component_of.push_back(label[std::size_t(i)]);
    }

    const std::int64_t l = jumping_from_anchored_curves(
        sys, by_label, anchors, component_of, t.grid[0], max_half + tol);
    r.signature = GraphSignature::make(p, q, winding, l);
  } catch (const error& e) {
    r.reason = e.what();
    return r;
  }

  r.pass = true;
  return r;
}

}  // namespace qpcircle
