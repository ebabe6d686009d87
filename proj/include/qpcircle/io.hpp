#pragma once

#include <string>

#include "qpcircle/harper.hpp"
#include "qpcircle/multigraph.hpp"
#include "qpcircle/qcurve.hpp"
#include "qpcircle/tube.hpp"

namespace qpcircle {

// Multigraph: "theta,branch,value" rows, theta ascending on a uniform grid
// starting at 0, branches 0..n-1 per fibre.
void write_multigraph_csv(const std::string& path, const MultiGraph& g);
MultiGraph read_multigraph_csv(const std::string& path);

// Tube: "# p=P q=Q" metadata line, then "theta,branch,value,side" with
// branch = sub-tube * q + slot and side in {lo, hi}.
void write_tube_csv(const std::string& path, const Tube& t);
Tube read_tube_csv(const std::string& path);

// Lifted curve: "# q=Q k=K" metadata line, then "theta_hat,value" with the
// parameter running over [0, q) and unwrapped lift values.
void write_qcurve_csv(const std::string& path, const QCurve& c);
QCurve read_qcurve_csv(const std::string& path);

// Orbit dump: "theta,x".
void write_trajectory_csv(const std::string& path, const TrajectoryDump& d);

// Graph reconstruction: "theta,value,dispersion,count".
void write_reconstruction_csv(const std::string& path,
                              const ReconstructedGraph& g);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qpcircle
