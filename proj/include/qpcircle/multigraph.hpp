#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qpcircle/qcurve.hpp"
#include "qpcircle/rotation.hpp"
#include "qpcircle/system.hpp"
#include "qpcircle/util.hpp"

namespace qpcircle {

/// Multi-valued graph sampled on a uniform theta grid: values[j] holds the
/// n fibre points over grid[j] = j / fibres(). Fibre points must be
/// pairwise distinct; most operations canonicalize each fibre to ascending
/// order internally, so the stored order only needs to be consistent.
struct MultiGraph {
  std::vector<double> grid;
  std::vector<std::vector<double>> values;

  int fibres() const { return int(grid.size()); }
  int branches() const { return values.empty() ? 0 : int(values[0].size()); }
};

MultiGraph make_uniform_grid_graph(int grid_size, int branches);

/// The explicit p,q-invariant graph of the rigid translation family:
/// branch (i, j) is wrap((k/q) theta + (i - 1 + (j - 1) p) / (pq)) for
/// 1 <= i <= p, 1 <= j <= q. Requires gcd(k, q) = gcd(l, p) = 1; l only
/// selects the dynamics, not the point set, and is checked for coherence.
MultiGraph make_translation_graph(int grid_size, std::int64_t k, int q,
                                  std::int64_t l, int p);

/// Ascending order within each fibre.
void sort_fibres(MultiGraph& g);

/// Fibre values at an off-grid theta: the surrounding grid fibres are
/// matched branch-to-branch by the best cyclic shift and interpolated
/// along the shorter circle arc. Values come back indexed like the lower
/// fibre (cyclically ordered, not re-sorted); base_index names that fibre.
struct InterpolatedFibre {
  std::vector<double> values;
  int base_index = 0;
};
InterpolatedFibre interpolate_fibre(const MultiGraph& g, double theta);

struct InvarianceReport {
  bool pass = false;
  double tol = 0.0;
  double max_defect = 0.0;
  double mean_defect = 0.0;
  double worst_theta = 0.0;
};

/// Set-wise invariance test of T_theta({values at theta}) against the
/// interpolated values at theta + omega. Matching is the minimal-cost
/// cyclic assignment; the defect per fibre is the largest matched circle
/// distance.
InvarianceReport check_invariance(const QpfSystem& sys, const MultiGraph& g,
                                  double tol);

/// One indecomposable piece of a decomposition: a p,q-invariant graph with
/// its signature and the p sampled q-curves it consists of. Curves are
/// anchored so that parameter 0 sits over the anchor fibre used in the
/// decomposition.
struct GraphPart {
  MultiGraph graph;
  GraphSignature signature;
  // One lifted curve per component, indexed by first appearance along the
  // anchor fibre; dynamic_order[t] is the curve index of the t-th component
  // in iteration order (the image of curve dynamic_order[t] is curve
  // dynamic_order[(t + 1) % p]).
  std::vector<QCurve> curves;
  std::vector<int> dynamic_order;
};

/// Splits an invariant n-valued graph into its p,q-invariant parts by
/// strand-following: adjacent fibres are matched by cyclic shifts, the
/// monodromy around the base circle fixes q and the component count, and
/// the induced rotation on components fixes p. Winding numbers come from
/// the followed lifts, jumping numbers from the anchor-fibre ordering.
/// The union of the returned parts is the input graph fibre by fibre and
/// (number of parts) * p * q = n.
std::vector<GraphPart> decompose_graph(const QpfSystem& sys, const MultiGraph& g,
                                       double tol = 1e-6, int anchor = 0);

/// Jumping number of a graph that forms a single invariant part. The
/// decomposition runs internally; a graph that splits further is refused.
std::int64_t jumping_number(const QpfSystem& sys, const MultiGraph& g,
                            double tol = 1e-6, int anchor = 0);

/// Shared lift-matching step of the jumping-number computation, also used
/// for tubes. curves[i] is the anchored lift of component i; anchors holds
/// the pq anchor values in ascending order with component_of[t] naming the
/// component of the t-th anchor (components numbered by first appearance,
/// so component_of starts 0, 1, ..., p-1 and repeats). theta_anchor is the
/// base fibre of curve parameter 0; match_tol bounds the copy matching.
std::int64_t jumping_from_anchored_curves(const QpfSystem& sys,
                                          const std::vector<QCurve>& curves,
                                          const std::vector<double>& anchors,
                                          const std::vector<int>& component_of,
                                          double theta_anchor, double match_tol);

/// Monte-Carlo estimate of the associated measure applied to f: the mean
/// over uniformly drawn theta of the branch average of f(theta, value).
double sample_graph_measure(const MultiGraph& g,
                            const std::function<double(double, double)>& f,
                            int samples, Rng& rng);

/// |integral of f composed with T minus integral of f| under the sampled
/// graph measure, both sides estimated from the same theta draws.
double measure_invariance_defect(const QpfSystem& sys, const MultiGraph& g,
                                 const std::function<double(double, double)>& f,
                                 int samples, Rng& rng);

}  // namespace qpcircle
