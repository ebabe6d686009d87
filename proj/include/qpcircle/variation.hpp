#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qpcircle/circle.hpp"
#include "qpcircle/system.hpp"

namespace qpcircle {

// Total variation of log DT_theta around one fibre circle, sampled on a
// uniform grid of x_grid cells.
double fibre_log_derivative_variation(const QpfSystem& sys, double theta,
                                      int x_grid);

struct VariationEstimate {
  double value = 0.0;      // base-circle average of the fibre variation
  double max_fibre = 0.0;  // largest fibre variation seen at the final grid
  int theta_grid = 0;
  int x_grid = 0;
  std::vector<std::pair<int, double>> trace;  // (x_grid, value) per refinement
};

// Averages the fibre variation over the base circle, doubling the x grid
// until the value settles or max_x_grid is reached.
VariationEstimate variation(const QpfSystem& sys, int theta_grid = 64,
                            int max_x_grid = 4096);

struct DistortionBound {
  double lhs = 0.0;             // integral over I of the derivative ratio^s
  double rhs = 0.0;             // |I| exp(-s V / |I|)
  double margin = 0.0;          // lhs - rhs
  double variation_used = 0.0;
  int iterations = 0;
  double s = 0.0;
};

// Lower distortion bound for the strip spanned by two graphs phi <= psi over
// the interval I, both given as uniform samples across I (endpoints
// included). The strip and its images up to step n-1 must be pairwise
// disjoint; violations raise hypothesis_error.
DistortionBound distortion_integral(const QpfSystem& sys,
                                    const CircleInterval& I,
                                    const std::vector<double>& phi,
                                    const std::vector<double>& psi, int n,
                                    double s, int quad = 256,
                                    std::optional<double> total_variation = {});

// Largest m <= horizon with the strip images T^0, ..., T^m pairwise
// disjoint (signs of the steps follow the sign of horizon).
int max_disjoint_iterates(const QpfSystem& sys, const CircleInterval& I,
                          const std::vector<double>& phi,
                          const std::vector<double>& psi, int horizon,
                          int quad = 64);

}  // namespace qpcircle
