#include "qpcircle/multigraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "qpcircle/circle.hpp"
#include "qpcircle/errors.hpp"

namespace qpcircle {

namespace {

// Minimal-total-distance cyclic matching between two cyclically ordered
// fibres of equal size: the optimal order-preserving assignment on the
// circle is one of the n cyclic shifts.
int best_cyclic_shift(const std::vector<double>& a, const std::vector<double>& b) {
  const int n = int(a.size());
  int best = 0;
  double best_cost = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n; ++s) {
    double cost = 0.0;
    for (int i = 0; i < n; ++i)
      cost += circle_dist(a[std::size_t(i)], b[std::size_t((i + s) % n)]);
    if (cost < best_cost) {
      best_cost = cost;
      best = s;
    }
  }
  return best;
}

double min_fibre_gap(const std::vector<double>& sorted_vals) {
  const int n = int(sorted_vals.size());
  if (n < 2) return 1.0;
  double best = 1.0;
  for (int i = 0; i < n; ++i) {
    const double gap =
        wrap(sorted_vals[std::size_t((i + 1) % n)] - sorted_vals[std::size_t(i)]);
    best = std::min(best, gap);
  }
  return best;
}

// Interpolation on a graph whose fibres are already sorted. Result stays in
// the index order of the lower fibre.
InterpolatedFibre interp_sorted(const MultiGraph& g, double theta) {
  const int G = g.fibres();
  const int n = g.branches();
  double pos = wrap(theta) * G;
  int j0 = int(pos);
  if (j0 >= G) j0 = G - 1;
  const double frac = pos - j0;
  const int j1 = (j0 + 1) % G;
  const auto& a = g.values[std::size_t(j0)];
  const auto& b = g.values[std::size_t(j1)];
  const int s = best_cyclic_shift(a, b);
  InterpolatedFibre out;
  out.base_index = j0;
  out.values.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    const double from = a[std::size_t(i)];
    const double to = b[std::size_t((i + s) % n)];
    out.values[std::size_t(i)] = wrap(from + circle_delta(from, to) * frac);
  }
  return out;
}

MultiGraph sorted_copy(const MultiGraph& g) {
  MultiGraph s = g;
  sort_fibres(s);
  return s;
}

void check_graph_shape(const MultiGraph& g) {
  const int G = g.fibres();
  if (G < 2) throw domain_error("multigraph: need at least two fibres");
  if (int(g.values.size()) != G)
    throw domain_error("multigraph: grid and value row counts disagree");
  const int n = g.branches();
  if (n < 1) throw domain_error("multigraph: need at least one branch");
  for (int j = 0; j < G; ++j) {
    if (int(g.values[std::size_t(j)].size()) != n)
      throw domain_error("multigraph: branch count varies across fibres");
    for (double v : g.values[std::size_t(j)])
      if (!std::isfinite(v) || v < 0.0 || v >= 1.0)
        throw domain_error("multigraph: values must be canonical circle points");
  }
}

struct Monodromy {
  MultiGraph gs;             // sorted fibres
  int anchor = 0;
  std::vector<int> shift;    // shift[j]: matching fibre j -> j+1 (mod G)
  std::vector<int> prefix;   // walk-order cumulative shift, prefix[0] = 0
  long long total = 0;       // monodromy shift around the base circle
  int components = 0;        // gcd(n, total)
  int q = 1;                 // n / components
  double min_gap = 1.0;
};

Monodromy build_monodromy(const MultiGraph& g, int anchor, double tol) {
  check_graph_shape(g);
  Monodromy m;
  m.gs = sorted_copy(g);
  const int G = m.gs.fibres();
  const int n = m.gs.branches();
  if (anchor < 0 || anchor >= G)
    throw domain_error("multigraph: anchor fibre out of range");
  m.anchor = anchor;

  for (int j = 0; j < G; ++j)
    m.min_gap = std::min(m.min_gap, min_fibre_gap(m.gs.values[std::size_t(j)]));
  if (n > 1 && m.min_gap <= 2.0 * tol)
    throw domain_error(
        "multigraph: fibre values nearly collide; refine the grid or move "
        "the anchor fibre");

  m.shift.resize(std::size_t(G));
  for (int j = 0; j < G; ++j)
    m.shift[std::size_t(j)] =
        best_cyclic_shift(m.gs.values[std::size_t(j)], m.gs.values[std::size_t((j + 1) % G)]);

  m.prefix.assign(std::size_t(G) + 1, 0);
  for (int t = 0; t < G; ++t)
    m.prefix[std::size_t(t) + 1] =
        (m.prefix[std::size_t(t)] + m.shift[std::size_t((anchor + t) % G)]) % n;
  m.total = m.prefix[std::size_t(G)];
  m.components = int(gcd_ll(n, m.total));
  m.q = n / m.components;
  return m;
}

// Follows the strand starting at anchor position `start` once around each of
// its q base wraps, returning the lift samples (q * G of them) and the
// accumulated integer winding.
QCurve follow_strand(const Monodromy& m, int start, std::int64_t* winding_out) {
  const int G = m.gs.fibres();
  const int n = m.gs.branches();
  QCurve c;
  c.q = m.q;
  c.samples.resize(std::size_t(m.q) * std::size_t(G));
  int idx = start;
  double x = m.gs.values[std::size_t(m.anchor)][std::size_t(start)];
  c.samples[0] = x;
  for (int t = 0; t < m.q * G; ++t) {
    const int j = (m.anchor + t) % G;
    const int jn = (j + 1) % G;
    const int idx2 = (idx + m.shift[std::size_t(j)]) % n;
    const double from = m.gs.values[std::size_t(j)][std::size_t(idx)];
    const double to = m.gs.values[std::size_t(jn)][std::size_t(idx2)];
    const double d = circle_delta(from, to);
    if (std::abs(d) > 0.25)
      throw domain_error(
          "multigraph: strand moves more than a quarter turn per grid step; "
          "grid too coarse for orbit tracking");
    x += d;
    idx = idx2;
    if (t + 1 < m.q * G) c.samples[std::size_t(t) + 1] = x;
  }
  if (idx != start)
    throw domain_error("multigraph: strand following did not close up");
  const double k_real = x - c.samples[0];
  const std::int64_t k = std::llround(k_real);
  if (std::abs(k_real - double(k)) > 1e-6)
    throw domain_error("multigraph: strand closed with a non-integer winding");
  c.declared_k = k;
  if (winding_out) *winding_out = k;
  return c;
}

}  // namespace

MultiGraph make_uniform_grid_graph(int grid_size, int branches) {
  if (grid_size < 2 || branches < 1)
    throw domain_error("multigraph: need grid_size >= 2 and branches >= 1");
  MultiGraph g;
  g.grid.resize(std::size_t(grid_size));
  for (int j = 0; j < grid_size; ++j) g.grid[std::size_t(j)] = double(j) / grid_size;
  g.values.assign(std::size_t(grid_size), std::vector<double>(std::size_t(branches), 0.0));
  return g;
}

MultiGraph make_translation_graph(int grid_size, std::int64_t k, int q,
                                  std::int64_t l, int p) {
  if (q < 1 || p < 1) throw domain_error("translation graph: p, q must be >= 1");
  if (gcd_ll(k, q) != 1)
    throw domain_error("translation graph: k and q must be relatively prime");
  if (gcd_ll(l, p) != 1)
    throw domain_error("translation graph: l and p must be relatively prime");
  const int n = p * q;
  MultiGraph g = make_uniform_grid_graph(grid_size, n);
  for (int j = 0; j < grid_size; ++j) {
    const double theta = g.grid[std::size_t(j)];
    for (int jj = 1; jj <= q; ++jj)
      for (int i = 1; i <= p; ++i) {
        const int b = (i - 1) + (jj - 1) * p;
        g.values[std::size_t(j)][std::size_t(b)] =
            wrap(double(k) / q * theta + double(i - 1 + (jj - 1) * p) / (p * q));
      }
  }
  return g;
}

void sort_fibres(MultiGraph& g) {
  for (auto& row : g.values) std::sort(row.begin(), row.end());
}

InterpolatedFibre interpolate_fibre(const MultiGraph& g, double theta) {
  check_graph_shape(g);
  return interp_sorted(sorted_copy(g), theta);
}

InvarianceReport check_invariance(const QpfSystem& sys, const MultiGraph& g,
                                  double tol) {
  check_graph_shape(g);
  const MultiGraph gs = sorted_copy(g);
  const int G = gs.fibres();
  const int n = gs.branches();

  std::vector<double> defect(std::size_t(G), 0.0);
  parallel_for(std::size_t(G), [&](std::size_t j) {
    const double theta = gs.grid[j];
    std::vector<double> img(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) img[std::size_t(i)] = sys.fibre(theta, gs.values[j][std::size_t(i)]);
    const InterpolatedFibre target = interp_sorted(gs, wrap(theta + sys.omega));
    const int s = best_cyclic_shift(img, target.values);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      worst = std::max(worst, circle_dist(img[std::size_t(i)],
                                          target.values[std::size_t((i + s) % n)]));
    defect[j] = worst;
  });

  InvarianceReport r;
  r.tol = tol;
  CompensatedSum mean;
  for (int j = 0; j < G; ++j) {
    mean.add(defect[std::size_t(j)]);
    if (defect[std::size_t(j)] > r.max_defect) {
      r.max_defect = defect[std::size_t(j)];
      r.worst_theta = gs.grid[std::size_t(j)];
    }
  }
  r.mean_defect = mean.value() / G;
  r.pass = r.max_defect <= tol;
  return r;
}

std::int64_t jumping_from_anchored_curves(const QpfSystem& sys,
                                          const std::vector<QCurve>& curves,
                                          const std::vector<double>& anchors,
                                          const std::vector<int>& component_of,
                                          double theta_anchor, double match_tol) {
  const int p = int(curves.size());
  const int pq = int(anchors.size());
  if (p < 1 || pq < 1 || pq % p != 0 || int(component_of.size()) != pq)
    throw domain_error("jumping number: malformed anchor data");
  const int q = pq / p;
  for (int t = 0; t < pq; ++t)
    if (component_of[std::size_t(t)] != t % p)
      throw domain_error(
          "jumping number: anchor ordering does not alternate through the "
          "components (grid too coarse?)");
  for (const QCurve& c : curves)
    if (c.q != q)
      throw domain_error("jumping number: component wrap count disagrees with q");

  const double yhat = sys.lift(wrap(theta_anchor), anchors[0]);

  // The image of the first anchored lift lies on exactly one lifted copy of
  // one component; copies of component i are gamma_i(. + s) + t for
  // integer t and s in [0, q).
  int best_i = -1, best_s = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  double best_val = 0.0;
  for (int i = 0; i < p; ++i)
    for (int s = 0; s < q; ++s) {
      const double val = curves[std::size_t(i)].eval(sys.omega + double(s));
      const double d = dist_to_integer(yhat - val);
      if (d < best_dist) {
        second = best_dist;
        best_dist = d;
        best_i = i;
        best_s = s;
        best_val = val;
      } else if (d < second) {
        second = d;
      }
    }
  if (best_i < 0 || best_dist > match_tol)
    throw domain_error(
        "jumping number: image point does not land on any lifted component "
        "copy within tolerance");
  if (p * q > 1 && second <= match_tol)
    throw domain_error("jumping number: ambiguous copy match; refine the grid");

  const std::int64_t t_int = std::llround(yhat - best_val);
  const double crossing = curves[std::size_t(best_i)].eval(double(best_s)) + double(t_int);
  const double xstar = wrap(crossing);

  int t_star = -1;
  double d_star = std::numeric_limits<double>::infinity();
  for (int t = 0; t < pq; ++t) {
    const double d = circle_dist(anchors[std::size_t(t)], xstar);
    if (d < d_star) {
      d_star = d;
      t_star = t;
    }
  }
  if (t_star < 0 || d_star > match_tol)
    throw domain_error("jumping number: image copy does not cross the anchor "
                       "fibre at a recorded anchor");
  if (component_of[std::size_t(t_star)] != best_i)
    throw domain_error("jumping number: inconsistent component bookkeeping");

  // Anchors in ascending order realize the x^1_1 < x^2_1 < ... convention,
  // so the matched index is m + n p directly.
  return t_star;
}

std::vector<GraphPart> decompose_graph(const QpfSystem& sys, const MultiGraph& g,
                                       double tol, int anchor) {
  const InvarianceReport inv = check_invariance(sys, g, tol);
  if (!inv.pass) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "decompose_graph: input graph is not invariant (max defect "
                  "%.3g at theta %.6f, tol %.3g)",
                  inv.max_defect, inv.worst_theta, tol);
    throw domain_error(buf);
  }

  Monodromy m = build_monodromy(g, anchor, tol);
  const int G = m.gs.fibres();
  const int n = m.gs.branches();
  const int C = m.components;
  const double theta_a = m.gs.grid[std::size_t(anchor)];

  std::vector<QCurve> curves(static_cast<std::size_t>(C));
  std::int64_t winding = 0;
  for (int c = 0; c < C; ++c) {
    std::int64_t k = 0;
    curves[std::size_t(c)] = follow_strand(m, c, &k);
    if (c == 0)
      winding = k;
    else if (k != winding)
      throw domain_error(
          "decompose_graph: components disagree on the winding number; "
          "orbit tracking inconsistent");
  }

  // Induced dynamics on components: orientation preservation forces a
  // rotation c -> c + d of the cyclic component arrangement.
  const InterpolatedFibre target = interp_sorted(m.gs, wrap(theta_a + sys.omega));
  const int t0 = ((target.base_index - anchor) % G + G) % G;
  const int pshift = m.prefix[std::size_t(t0)];
  const double match_tol = std::max(tol, 1e-12);
  int d = -1;
  for (int u = 0; u < n; ++u) {
    const double y = sys.fibre(theta_a, m.gs.values[std::size_t(anchor)][std::size_t(u)]);
    int v = -1;
    double vd = std::numeric_limits<double>::infinity();
    for (int w = 0; w < n; ++w) {
      const double dd = circle_dist(target.values[std::size_t(w)], y);
      if (dd < vd) {
        vd = dd;
        v = w;
      }
    }
    if (n > 1 && vd > 0.5 * m.min_gap)
      throw domain_error("decompose_graph: image point does not match any "
                         "branch; grid too coarse");
    const int comp_src = u % C;
    const int comp_img = (((v - pshift) % n + n) % n) % C;
    const int du = ((comp_img - comp_src) % C + C) % C;
    if (u == 0)
      d = du;
    else if (du != d)
      throw domain_error(
          "decompose_graph: component dynamics is not a rotation; orbit "
          "tracking inconsistent (grid too coarse?)");
  }

  const int parts_count = int(gcd_ll(C, d));
  const int p = C / parts_count;

  std::vector<GraphPart> parts;
  parts.reserve(std::size_t(parts_count));
  for (int r = 0; r < parts_count; ++r) {
    // Components of this part are the residues r mod gcd(C, d); their (i)
    // labels follow first appearance in the ascending anchor order.
    std::vector<int> comp_label(std::size_t(C), -1);
    std::vector<QCurve> part_curves;
    std::vector<double> anchors;
    std::vector<int> component_of;
    part_curves.reserve(std::size_t(p));
    for (int u = 0; u < n; ++u) {
      const int c = u % C;
      if (((c - r) % parts_count + parts_count) % parts_count != 0) continue;
      if (comp_label[std::size_t(c)] < 0) {
        comp_label[std::size_t(c)] = int(part_curves.size());
        part_curves.push_back(curves[std::size_t(c)]);
      }
      anchors.push_back(m.gs.values[std::size_t(anchor)][std::size_t(u)]);
      component_of.push_back(comp_label[std::size_t(c)]);
    }

    GraphPart part;
    part.graph.grid = m.gs.grid;
    part.graph.values.resize(std::size_t(G));
    for (int j = 0; j < G; ++j) {
      const int tj = ((j - anchor) % G + G) % G;
      const int pj = m.prefix[std::size_t(tj)];
      for (int u = 0; u < n; ++u) {
        const int c = (((u - pj) % n + n) % n) % C;
        if (((c - r) % parts_count + parts_count) % parts_count == 0)
          part.graph.values[std::size_t(j)].push_back(m.gs.values[std::size_t(j)][std::size_t(u)]);
      }
    }

    const std::int64_t l = jumping_from_anchored_curves(
        sys, part_curves, anchors, component_of, theta_a,
        std::max(match_tol, 0.25 * m.min_gap));
    part.signature = GraphSignature::make(p, m.q, winding, l);

    int c0 = -1;
    for (int c = 0; c < C; ++c)
      if (comp_label[std::size_t(c)] == 0) c0 = c;
    part.dynamic_order.resize(std::size_t(p));
    int cc = c0;
    for (int t = 0; t < p; ++t) {
      part.dynamic_order[std::size_t(t)] = comp_label[std::size_t(cc)];
      cc = (cc + d) % C;
    }

    part.curves = std::move(part_curves);
    parts.push_back(std::move(part));
  }
  return parts;
}

std::int64_t jumping_number(const QpfSystem& sys, const MultiGraph& g,
                            double tol, int anchor) {
  const std::vector<GraphPart> parts = decompose_graph(sys, g, tol, anchor);
  if (parts.size() != 1)
    throw domain_error(
        "jumping number: graph splits into several invariant parts; "
        "decompose first and query one part");
  return parts[0].signature.l;
}

double sample_graph_measure(const MultiGraph& g,
                            const std::function<double(double, double)>& f,
                            int samples, Rng& rng) {
  check_graph_shape(g);
  if (samples < 1) throw domain_error("graph measure: need at least one sample");
  const MultiGraph gs = sorted_copy(g);
  const int n = gs.branches();
  CompensatedSum acc;
  for (int s = 0; s < samples; ++s) {
    const double theta = rng.next_double();
    const InterpolatedFibre fib = interp_sorted(gs, theta);
    double branch_mean = 0.0;
    for (int i = 0; i < n; ++i) branch_mean += f(theta, fib.values[std::size_t(i)]);
    acc.add(branch_mean / n);
  }
  return acc.value() / samples;
}

double measure_invariance_defect(const QpfSystem& sys, const MultiGraph& g,
                                 const std::function<double(double, double)>& f,
                                 int samples, Rng& rng) {
  check_graph_shape(g);
  if (samples < 1) throw domain_error("graph measure: need at least one sample");
  const MultiGraph gs = sorted_copy(g);
  const int n = gs.branches();
  CompensatedSum plain, pushed;
  for (int s = 0; s < samples; ++s) {
    const double theta = rng.next_double();
    const double theta_next = wrap(theta + sys.omega);
    const InterpolatedFibre fib = interp_sorted(gs, theta);
    double mean_plain = 0.0, mean_pushed = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = fib.values[std::size_t(i)];
      mean_plain += f(theta, v);
      mean_pushed += f(theta_next, sys.fibre(theta, v));
    }
    plain.add(mean_plain / n);
    pushed.add(mean_pushed / n);
  }
  return std::abs(plain.value() - pushed.value()) / samples;
}

}  // namespace qpcircle
