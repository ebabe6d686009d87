#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpcircle/system.hpp"
#include "qpcircle/util.hpp"

namespace qpcircle {

struct TrajectoryDump {
  std::vector<double> theta;
  std::vector<double> x;  // chart coordinate, canonical circle points
};

// Long orbit of the critical Harper map in its projective chart.
TrajectoryDump harper_trajectory(double omega, std::int64_t n,
                                 std::int64_t skip = 0, double theta0 = 0.0,
                                 double x0 = 0.5);

struct ReconstructedGraph {
  std::vector<double> centers;     // bin centers on the base circle
  std::vector<double> values;      // circular median of the visits per bin
  std::vector<double> dispersion;  // mean circle distance to the median
  std::vector<std::int64_t> counts;
};

// Occupation-measure reconstruction of an invariant graph from long
// orbits, under the hypothesis that the invariant measure is carried by a
// single measurable graph. Throws if some bin receives no visits.
ReconstructedGraph reconstruct_invariant_graph(const QpfSystem& sys, int bins,
                                               std::int64_t n, int ensemble,
                                               std::int64_t skip, Rng& rng);

// Median over bins of the distance between the pushed-forward median and
// the median at the image bin.
double graph_invariance_defect(const QpfSystem& sys,
                               const ReconstructedGraph& g);

struct HarperDiagnostics {
  double rotation_number = 0.0;
  double rotation_residual = 0.0;  // circle distance to 1/2
  double lyapunov = 0.0;
  double lyapunov_spread = 0.0;
  double symmetry_residual = 0.0;  // defect of the half-shift antisymmetry
  std::int64_t iterates = 0;
};

// Rotation number, fibre Lyapunov exponent and the half-shift symmetry
// check for the critical Harper map at the given driving frequency.
HarperDiagnostics harper_diagnostics(double omega, std::int64_t n);

// gnuplot scripts for the two standard pictures; both render the chart
// coordinate back to arctan(x) on the vertical axis.
std::string trajectory_plot_script(const std::string& csv_path,
                                   const std::string& png_path);
std::string graph_plot_script(const std::string& csv_path,
                              const std::string& png_path);

}  // namespace qpcircle
