#include "qpcircle/harper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qpcircle/catalog.hpp"
#include "qpcircle/circle.hpp"
#include "qpcircle/errors.hpp"
#include "qpcircle/rotation.hpp"

namespace qpcircle {

namespace {

double circular_median(std::vector<double>& xs) {
  double sx = 0.0, cx = 0.0;
  for (double x : xs) {
    sx += std::sin(2.0 * M_PI * x);
    cx += std::cos(2.0 * M_PI * x);
  }
  const double centre = wrap(std::atan2(sx, cx) / (2.0 * M_PI));
  std::vector<double> rel(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    rel[i] = circle_delta(centre, xs[i]);
  const std::size_t mid = rel.size() / 2;
  std::nth_element(rel.begin(), rel.begin() + std::ptrdiff_t(mid), rel.end());
  double med = rel[mid];
  if (rel.size() % 2 == 0) {
    const double lower =
        *std::max_element(rel.begin(), rel.begin() + std::ptrdiff_t(mid));
    med = 0.5 * (med + lower);
  }
  return wrap(centre + med);
}

double median_of(std::vector<double> xs) {
  const std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + std::ptrdiff_t(mid), xs.end());
  double med = xs[mid];
  if (xs.size() % 2 == 0) {
    const double lower =
        *std::max_element(xs.begin(), xs.begin() + std::ptrdiff_t(mid));
    med = 0.5 * (med + lower);
  }
  return med;
}

}  // namespace

TrajectoryDump harper_trajectory(double omega, std::int64_t n,
                                 std::int64_t skip, double theta0, double x0) {
  if (n < 1) throw domain_error("trajectory: need at least one point");
  if (skip < 0) throw domain_error("trajectory: skip must be nonnegative");
  const QpfSystem sys = make_harper(0.0, 2.0, omega);
  double theta = wrap(theta0);
  double x = wrap(x0);
  for (std::int64_t t = 0; t < skip; ++t) {
    x = sys.fibre(theta, x);
    theta = wrap(theta + sys.omega);
  }
  TrajectoryDump dump;
  dump.theta.reserve(std::size_t(n));
  dump.x.reserve(std::size_t(n));
  for (std::int64_t t = 0; t < n; ++t) {
    dump.theta.push_back(theta);
    dump.x.push_back(x);
    x = sys.fibre(theta, x);
    theta = wrap(theta + sys.omega);
  }
  return dump;
}

ReconstructedGraph reconstruct_invariant_graph(const QpfSystem& sys, int bins,
                                               std::int64_t n, int ensemble,
                                               std::int64_t skip, Rng& rng) {
  if (bins < 2) throw domain_error("reconstruction: need at least two bins");
  if (n < bins) throw domain_error("reconstruction: orbit shorter than the bin count");
  if (ensemble < 1) throw domain_error("reconstruction: need at least one orbit");
  if (skip < 0) throw domain_error("reconstruction: skip must be nonnegative");

  std::vector<std::vector<double>> visits(static_cast<std::size_t>(bins));
  for (int e = 0; e < ensemble; ++e) {
    double theta = rng.next_double();
    double x = rng.next_double();
    for (std::int64_t t = 0; t < skip; ++t) {
      x = sys.fibre(theta, x);
      theta = wrap(theta + sys.omega);
    }
    for (std::int64_t t = 0; t < n; ++t) {
      int b = int(theta * bins);
      if (b >= bins) b = bins - 1;
      visits[std::size_t(b)].push_back(x);
      x = sys.fibre(theta, x);
      theta = wrap(theta + sys.omega);
    }
  }

  ReconstructedGraph g;
  g.centers.resize(std::size_t(bins));
  g.values.resize(std::size_t(bins));
  g.dispersion.resize(std::size_t(bins));
  g.counts.resize(std::size_t(bins));
  for (int b = 0; b < bins; ++b) {
    auto& bucket = visits[std::size_t(b)];
    if (bucket.empty()) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "reconstruction: bin %d received no visits; use at most "
                    "%lld bins or a longer orbit",
                    b, static_cast<long long>(n * ensemble / 8));
      throw domain_error(buf);
    }
    g.centers[std::size_t(b)] = (double(b) + 0.5) / bins;
    g.values[std::size_t(b)] = circular_median(bucket);
    CompensatedSum acc;
    for (double x : bucket) acc.add(circle_dist(x, g.values[std::size_t(b)]));
    g.dispersion[std::size_t(b)] = acc.value() / double(bucket.size());
    g.counts[std::size_t(b)] = std::int64_t(bucket.size());
  }
  return g;
}

double graph_invariance_defect(const QpfSystem& sys,
                               const ReconstructedGraph& g) {
  const int bins = int(g.values.size());
  if (bins < 2) throw domain_error("reconstruction: need at least two bins");
  std::vector<double> defects(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    const double theta = g.centers[std::size_t(b)];
    const double image = sys.fibre(theta, g.values[std::size_t(b)]);
    int bt = int(wrap(theta + sys.omega) * bins);
    if (bt >= bins) bt = bins - 1;
    defects[std::size_t(b)] = circle_dist(image, g.values[std::size_t(bt)]);
  }
  return median_of(std::move(defects));
}

HarperDiagnostics harper_diagnostics(double omega, std::int64_t n) {
  if (n < 2) throw domain_error("diagnostics: need at least two iterates");
  const QpfSystem sys = make_harper(0.0, 2.0, omega);

  HarperDiagnostics d;
  d.iterates = n;
  const RotationEstimate rho = rotation_number_integrated(sys, 64, n);
  d.rotation_number = rho.value;
  d.rotation_residual = circle_dist(rho.value, 0.5);

  const LyapunovEstimate lyap = lyapunov_exponent(sys, 0.0, 0.5, n, 4);
  d.lyapunov = lyap.value;
  d.lyapunov_spread = lyap.per_orbit_spread;

  const int grid = 256;
  double worst = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double theta = double(j) / grid;
    for (int i = 0; i < grid; ++i) {
      const double u = double(i) / grid;
      const double lhs = sys.fibre(wrap(theta + 0.5), wrap(1.0 - u));
      const double rhs = wrap(1.0 - sys.fibre(theta, u));
      worst = std::max(worst, circle_dist(lhs, rhs));
    }
  }
  d.symmetry_residual = worst;
  return d;
}

std::string trajectory_plot_script(const std::string& csv_path,
                                   const std::string& png_path) {
  std::string s;
  s += "set terminal pngcairo size 1400,900\n";
  s += "set output '" + png_path + "'\n";
  s += "set datafile separator ','\n";
  s += "set xlabel 'theta'\n";
  s += "set ylabel 'arctan(x)'\n";
  s += "set xrange [0:1]\n";
  s += "set yrange [-pi/2:pi/2]\n";
  s += "set key off\n";
  s += "plot '" + csv_path + "' skip 1 using 1:(pi*($2-0.5)) with dots\n";
  return s;
}

std::string graph_plot_script(const std::string& csv_path,
                              const std::string& png_path) {
  std::string s;
  s += "set terminal pngcairo size 1400,900\n";
  s += "set output '" + png_path + "'\n";
  s += "set datafile separator ','\n";
  s += "set xlabel 'theta'\n";
  s += "set ylabel 'arctan(x)'\n";
  s += "set xrange [0:1]\n";
  s += "set yrange [-pi/2:pi/2]\n";
  s += "set key off\n";
  s += "plot '" + csv_path + "' skip 1 using 1:(pi*($2-0.5)) with points pt 7 ps 0.3\n";
  return s;
}

}  // namespace qpcircle
