#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qpcircle/multigraph.hpp"
#include "qpcircle/system.hpp"

namespace qpcircle {

// Open invariant tube: p sub-tubes cycled by the map, each crossing every
// fibre in q disjoint open intervals. Arcs are stored per fibre, per
// sub-tube, in strand order: arcs[j][i][s] connects to arcs[j+1][i][s] and,
// across the seam, arcs[G-1][i][s] connects to arcs[0][i][(s+1) % q].
struct Tube {
  int p = 1;
  int q = 1;
  std::vector<double> grid;
  std::vector<std::vector<std::vector<Arc>>> arcs;

  int fibres() const { return int(grid.size()); }
};

// Builds a tube as a neighbourhood of a connected invariant multigraph with
// fibre-dependent half-width. Throws if the graph decomposes into more than
// one minimal part or if the half-width does not separate the branches.
Tube make_tube_around_graph(const QpfSystem& sys, const MultiGraph& g,
                            const std::function<double(double)>& half_width,
                            double tol = 1e-6);
Tube make_tube_around_graph(const QpfSystem& sys, const MultiGraph& g,
                            double half_width, double tol = 1e-6);

// Boundary multigraph made of the lower (or upper) endpoints of every arc.
MultiGraph tube_boundary_graph(const Tube& t, bool upper);

struct TubeReport {
  bool pass = false;
  bool intervals_ok = false;
  bool connected_ok = false;
  bool invariance_ok = false;
  double max_defect = 0.0;
  GraphSignature signature;
  std::string reason;
};

// Checks the defining tube properties: per fibre the arcs are nonempty and
// pairwise disjoint, each sub-tube is connected, and the image of sub-tube i
// matches sub-tube (i+1) mod p up to tol. When the structure holds, the
// winding and jumping data of the tube are extracted from the arc midpoints
// and reported as a graph signature.
TubeReport verify_tube(const QpfSystem& sys, const Tube& t, double tol = 1e-6);

}  // namespace qpcircle
