#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>

#include "qpcircle/catalog.hpp"
#include "qpcircle/errors.hpp"
#include "qpcircle/harper.hpp"
#include "qpcircle/util.hpp"

using namespace qpcircle;

namespace {

constexpr double kPi = 3.14159265358979323846;

}

TEST_CASE("critical harper diagnostics at moderate length") {
  const HarperDiagnostics d = harper_diagnostics(golden_mean(), 20000);
  CHECK(d.rotation_residual < 1e-3);
  CHECK(circle_dist(d.rotation_number, 0.5) == doctest::Approx(d.rotation_residual));
  CHECK(std::abs(d.lyapunov) < 0.05);
  CHECK(d.symmetry_residual < 1e-10);
  CHECK(d.iterates == 20000);
}

TEST_CASE("half-shift antisymmetry holds pointwise in the chart") {
  const QpfSystem sys = make_harper(0.0, 2.0, golden_mean());
  Rng rng(51);
  for (int i = 0; i < 300; ++i) {
    const double theta = rng.next_double();
    const double u = rng.next_double();
    const double lhs = sys.fibre(wrap(theta + 0.5), wrap(1.0 - u));
    const double rhs = wrap(1.0 - sys.fibre(theta, u));
    CHECK(circle_dist(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("harper trajectory dump is canonical and deterministic") {
  const TrajectoryDump a = harper_trajectory(golden_mean(), 500, 100);
  const TrajectoryDump b = harper_trajectory(golden_mean(), 500, 100);
  REQUIRE(a.theta.size() == 500);
  REQUIRE(a.x.size() == 500);
  for (std::size_t i = 0; i < a.theta.size(); ++i) {
    CHECK(a.theta[i] >= 0.0);
    CHECK(a.theta[i] < 1.0);
    CHECK(a.x[i] >= 0.0);
    CHECK(a.x[i] < 1.0);
    CHECK(a.theta[i] == b.theta[i]);
    CHECK(a.x[i] == b.x[i]);
  }
  CHECK(a.theta[0] == doctest::Approx(wrap(100.0 * golden_mean())));
}

TEST_CASE("reconstruction recovers the contraction graph") {
  const QpfSystem sys = make_graph_contraction(golden_mean(), 0.1, 0.5);
  Rng rng(52);
  const int bins = 256;
  const ReconstructedGraph g =
      reconstruct_invariant_graph(sys, bins, 40000, 1, 200, rng);
  REQUIRE(int(g.centers.size()) == bins);
  double worst = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double target = wrap(0.5 + 0.1 * std::sin(2.0 * kPi * g.centers[b]));
    worst = std::max(worst, circle_dist(g.values[b], target));
    CHECK(g.counts[b] > 0);
  }
  CHECK(worst < 2e-3);
  const double defect = graph_invariance_defect(sys, g);
  CHECK(defect < 2e-3);
}

TEST_CASE("reconstruction dispersion reflects the attractor thickness") {
  const QpfSystem contraction = make_graph_contraction(golden_mean(), 0.1, 0.5);
  Rng rng(53);
  const ReconstructedGraph g =
      reconstruct_invariant_graph(contraction, 64, 20000, 1, 200, rng);
  double max_disp = 0.0;
  for (double d : g.dispersion) max_disp = std::max(max_disp, d);
  // all mass sits on a single smooth curve; the in-bin spread is the
  // curve's variation across one bin, about |phi'| / bins
  CHECK(max_disp < 0.01);
}

TEST_CASE("starved bins are reported as a domain error") {
  const QpfSystem sys = make_graph_contraction(golden_mean(), 0.1, 0.5);
  Rng rng(54);
  CHECK_THROWS_AS(reconstruct_invariant_graph(sys, 4096, 4096, 1, 0, rng),
                  domain_error);
}

TEST_CASE("plot scripts reference their data and output") {
  const std::string traj = trajectory_plot_script("data.csv", "pic.png");
  CHECK(traj.find("data.csv") != std::string::npos);
  CHECK(traj.find("pic.png") != std::string::npos);
  CHECK(traj.find("pngcairo") != std::string::npos);
  const std::string graph = graph_plot_script("g.csv", "g.png");
  CHECK(graph.find("g.csv") != std::string::npos);
  CHECK(graph.find("arctan") != std::string::npos);
}
