#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qpcircle/circle.hpp"
#include "qpcircle/system.hpp"

namespace qpcircle {

// Open box I x K in the torus; combinatorics of its iterates drive the
// wandering-set estimates.
struct Box {
  CircleInterval I;
  CircleInterval K;
};

// Return times with respect to the symmetric middle part of I of relative
// length alpha: all n in [-horizon, horizon] (including 0) whose base
// rotation shift satisfies dist_to_integer(n omega) <= (1-alpha)/2 * |I|.
std::vector<std::int64_t> return_times(const Box& box, double alpha,
                                       double omega, std::int64_t horizon);

// Cached edge orbits of a box: the slice of T^n(box) over any base point of
// I + n omega, built incrementally in both time directions.
class BoxOrbits {
 public:
  BoxOrbits(const QpfSystem& sys, const Box& box, int grid = 64);

  const Box& box() const { return box_; }
  const QpfSystem& system() const { return *sys_; }
  int grid() const { return grid_; }

  // Slice over the u-th base grid point of I + n omega (no interpolation).
  Arc slice_at_grid(std::int64_t n, int u);
  // Interpolated slice over theta, which must lie in I + n omega.
  Arc slice(std::int64_t n, double theta);

  // Smallest n in 1..up_to with T^n(box) meeting the box on the sampling
  // grid, or nullopt if the box looks wandering up to that horizon.
  std::optional<std::int64_t> first_self_intersection(std::int64_t up_to);

 private:
  void ensure(std::int64_t n);

  const QpfSystem* sys_;
  Box box_;
  int grid_;
  struct Edges {
    std::vector<double> lo, hi;
    bool smooth = true;
  };
  std::map<std::int64_t, Edges> edges_;
};

struct CyclicOrder {
  bool comparable = false;  // J lies in every I + n omega
  bool separated = false;   // slices pairwise disjoint at all sampled fibres
  bool constant = false;    // same cyclic order at all sampled fibres
  std::vector<std::int64_t> order;  // times in ccw slice order, starting at times[0]
};

// Cyclic order of the slices of T^n(box) for the given times over the
// interval J, sampled on a few fibres.
CyclicOrder ordering(BoxOrbits& orbits, const std::vector<std::int64_t>& times,
                     const CircleInterval& J, int fibres = 8);

// Closest-return test with respect to the middle-alpha part of I: the
// slices of -n, 0, n are in constant cyclic order, and no shorter return k
// sits between 0 and n (or between n and 0 for the mirrored orientation).
bool is_closest_return(BoxOrbits& orbits, double alpha, std::int64_t n,
                       int fibres = 8);

struct ReturnBound {
  std::int64_t n = 0;
  double measure = 0.0;  // lambda(T^n box) + lambda(T^-n box) by quadrature
  double bound = 0.0;    // |K| |I_beta| exp(-V / (2 |I_beta|))
  double beta = 0.0;
  double variation_used = 0.0;
};

// Lower bound on the measure of the n-th forward plus backward image of a
// box at a closest return time.
ReturnBound closest_return_bound(const QpfSystem& sys, const Box& box,
                                 std::int64_t n, double alpha, int quad = 64,
                                 std::optional<double> total_variation = {});

// Sum of the image measures over n in [-range, range] (diffeomorphisms
// only); for a wandering box this cannot exceed 1.
double image_measure_sum(const QpfSystem& sys, const Box& box,
                         std::int64_t range, int quad = 64);

struct BoxCombinatorics {
  Box box;
  double alpha = 0.5;
  std::int64_t horizon = 0;
  std::vector<std::int64_t> returns;
  std::vector<std::int64_t> closest;
  std::vector<ReturnBound> bounds;  // one per positive closest return (diffeo only)
};

// Verifies the box is wandering on the grid up to 2*horizon (throws
// wandering_violation otherwise), then scans for returns and closest
// returns and, for differentiable systems, evaluates the measure bounds.
BoxCombinatorics analyze_box(const QpfSystem& sys, const Box& box, double alpha,
                             std::int64_t horizon, int grid = 64);

struct ProbeResult {
  std::optional<std::int64_t> hit;
  std::int64_t horizon = 0;
};

// Searches for the smallest |n| >= 1 with T^n(source) meeting the target
// box on the sampling grid; forward iterates win ties.
ProbeResult transitivity_probe(const QpfSystem& sys, const Box& source,
                               const Box& target, std::int64_t horizon,
                               int grid = 64);

}  // namespace qpcircle
