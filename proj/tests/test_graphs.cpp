#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "qpcircle/catalog.hpp"
#include "qpcircle/errors.hpp"
#include "qpcircle/io.hpp"
#include "qpcircle/multigraph.hpp"
#include "qpcircle/qcurve.hpp"
#include "qpcircle/util.hpp"

using namespace qpcircle;

namespace {

constexpr double kPi = 3.14159265358979323846;

MultiGraph shifted_union(const MultiGraph& a, double dx) {
  MultiGraph u = a;
  for (std::size_t j = 0; j < u.values.size(); ++j) {
    for (double v : a.values[j]) u.values[j].push_back(wrap(v + dx));
  }
  return u;
}

}  // namespace

TEST_CASE("translation graphs have the advertised shape") {
  const MultiGraph g = make_translation_graph(128, 1, 2, 1, 2);
  CHECK(g.fibres() == 128);
  CHECK(g.branches() == 4);
  CHECK(g.grid[0] == 0.0);
  CHECK(g.grid[64] == doctest::Approx(0.5));
  // branch values at theta = 0: (i - 1 + 2 (j - 1)) / 4
  std::vector<double> fibre0 = g.values[0];
  std::sort(fibre0.begin(), fibre0.end());
  CHECK(fibre0[0] == doctest::Approx(0.0));
  CHECK(fibre0[1] == doctest::Approx(0.25));
  CHECK(fibre0[2] == doctest::Approx(0.5));
  CHECK(fibre0[3] == doctest::Approx(0.75));

  CHECK_THROWS_AS(make_translation_graph(128, 2, 4, 1, 1), domain_error);
}

TEST_CASE("interpolation is exact on branch-linear graphs") {
  const MultiGraph g = make_translation_graph(256, 1, 2, 1, 2);
  const InterpolatedFibre f = interpolate_fibre(g, 0.30078125 + 1e-3);
  REQUIRE(f.values.size() == 4);
  for (double v : f.values) {
    // every branch is wrap(theta/2 + c), c a multiple of 1/4
    const double r = wrap(4.0 * (v - 0.5 * (0.30078125 + 1e-3)));
    CHECK(std::min(r, 1.0 - r) < 1e-12);
  }
}

TEST_CASE("figure-one graph is invariant under both of its driving maps") {
  const MultiGraph g = make_translation_graph(512, 1, 2, 1, 2);
  const QpfSystem jump1 = make_translation(golden_mean(), 1, 2, 1, 2);
  const QpfSystem jump3 = make_translation(golden_mean(), 1, 2, 3, 2);
  const InvarianceReport r1 = check_invariance(jump1, g, 1e-9);
  const InvarianceReport r3 = check_invariance(jump3, g, 1e-9);
  CHECK(r1.pass);
  CHECK(r3.pass);
  CHECK(r1.max_defect < 1e-9);
  CHECK(r3.max_defect < 1e-9);

  const QpfSystem wrong = make_translation(golden_mean(), 1, 3, 1, 2);
  CHECK_FALSE(check_invariance(wrong, g, 1e-6).pass);
}

TEST_CASE("jumping number separates the two figure-one dynamics") {
  const MultiGraph g = make_translation_graph(512, 1, 2, 1, 2);
  CHECK(jumping_number(make_translation(golden_mean(), 1, 2, 1, 2), g) == 1);
  CHECK(jumping_number(make_translation(golden_mean(), 1, 2, 3, 2), g) == 3);
}

TEST_CASE("decomposition recovers the planted signature") {
  const double omega = golden_mean();
  for (const auto& sig :
       {GraphSignature::make(2, 2, 1, 1), GraphSignature::make(1, 3, 2, 0),
        GraphSignature::make(3, 1, 0, 1), GraphSignature::make(2, 3, 1, 3)}) {
    CAPTURE(sig.p);
    CAPTURE(sig.q);
    CAPTURE(sig.k);
    CAPTURE(sig.l);
    const QpfSystem sys = make_translation(omega, sig.k, sig.q, sig.l, sig.p);
    const MultiGraph g =
        make_translation_graph(480, sig.k, int(sig.q), sig.l, int(sig.p));
    const std::vector<GraphPart> parts = decompose_graph(sys, g);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].signature.p == sig.p);
    CHECK(parts[0].signature.q == sig.q);
    CHECK(parts[0].signature.k == sig.k);
    CHECK(parts[0].signature.l == sig.l);
    CHECK(int(parts[0].curves.size()) == int(sig.p));
    CHECK(predicted_rotation_number(parts[0].signature, omega) ==
          doctest::Approx(rotation_number_pointwise(sys, 0.0, 0.0, 4096).value)
              .epsilon(1e-9));
  }
}

TEST_CASE("a union of shifted copies splits into two parts") {
  const QpfSystem sys = make_translation(golden_mean(), 1, 2, 1, 2);
  const MultiGraph g =
      shifted_union(make_translation_graph(256, 1, 2, 1, 2), 0.125);
  const std::vector<GraphPart> parts = decompose_graph(sys, g);
  REQUIRE(parts.size() == 2);
  for (const GraphPart& part : parts) {
    CHECK(part.signature.p == 2);
    CHECK(part.signature.q == 2);
    CHECK(part.signature.k == 1);
    CHECK(part.signature.l == 1);
  }
  CHECK_THROWS_AS(jumping_number(sys, g), domain_error);
}

TEST_CASE("decomposition refuses non-invariant input") {
  const MultiGraph g = make_translation_graph(256, 1, 2, 1, 2);
  const QpfSystem wrong = make_translation(golden_mean(), 2, 3, 1, 2);
  CHECK_THROWS_AS(decompose_graph(wrong, g), domain_error);
}

TEST_CASE("part curves are valid and carry the winding number") {
  const QpfSystem sys = make_translation(golden_mean(), 2, 5, 1, 2);
  const MultiGraph g = make_translation_graph(500, 2, 5, 1, 2);
  const std::vector<GraphPart> parts = decompose_graph(sys, g);
  REQUIRE(parts.size() == 1);
  for (const QCurve& c : parts[0].curves) {
    const CurveCheck check = validate_qcurve(c);
    CAPTURE(check.reason);
    CHECK(check.ok);
    CHECK(c.q == 5);
    CHECK(winding_number(c).k == 2);
  }
  const auto& order = parts[0].dynamic_order;
  REQUIRE(order.size() == 2);
  CHECK(((order[0] == 0 && order[1] == 1) || (order[0] == 1 && order[1] == 0)));
}

TEST_CASE("qcurve evaluation runs the closure seam") {
  const QCurve c = qcurve_from_function(
      2, 1, 64, [](double t) { return 0.5 * t + 0.1 * std::sin(kPi * t); });
  CHECK(c.eval(0.0) == doctest::Approx(0.0));
  CHECK(c.eval(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.eval(2.5) == doctest::Approx(c.eval(0.5) + 1.0).epsilon(1e-10));
  CHECK(c.eval(-1.5) == doctest::Approx(c.eval(0.5) - 1.0).epsilon(1e-10));
}

TEST_CASE("curve validation enforces the closed-curve laws") {
  // straight valid curve
  const QCurve good = qcurve_from_function(
      3, 2, 48, [](double t) { return 2.0 * t / 3.0 + 0.02 * std::sin(2.0 * kPi * t / 3.0); });
  CHECK(validate_qcurve(good).ok);
  CHECK(winding_number(good).k == 2);

  // k = 0 with q > 1 self-intersects
  const QCurve flat = qcurve_from_function(
      2, 0, 64, [](double t) { return 0.1 * std::sin(kPi * t); });
  CHECK_FALSE(validate_qcurve(flat).ok);
  CHECK_THROWS_AS(require_valid_qcurve(flat), domain_error);

  // gcd(q, k) > 1 is not a closed simple curve
  const QCurve resonant = qcurve_from_function(
      4, 2, 64, [](double t) { return 0.5 * t + 0.01 * std::sin(kPi * t / 2.0); });
  CHECK_FALSE(validate_qcurve(resonant).ok);

  // amplitude large enough to break self-avoidance
  const QCurve tangled = qcurve_from_function(
      2, 1, 128, [](double t) { return 0.5 * t + 0.4 * std::sin(kPi * t); });
  CHECK_FALSE(validate_qcurve(tangled).ok);
}

TEST_CASE("disjoint curves share their winding number") {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const int q = 1 + int(rng.next_below(7));
    int k = 1 + int(rng.next_below(std::uint64_t(q)));
    while (gcd_ll(k, q) != 1) ++k;
    if (rng.next_below(2) == 0) k = -k;
    const double a1 = 0.02 * rng.next_double() / q;
    const double a2 = 0.02 * rng.next_double() / q;
    const double phase = rng.next_double();
    const auto lift = [&](double t) {
      return double(k) * t / q + a1 * std::sin(2.0 * kPi * (t / q + phase)) +
             a2 * std::sin(4.0 * kPi * t / q);
    };
    const QCurve c = qcurve_from_function(q, k, 48, lift);
    CAPTURE(q);
    CAPTURE(k);
    REQUIRE(validate_qcurve(c).ok);
    if (q > 1) CHECK(winding_number(c).k != 0);
    CHECK(gcd_ll(winding_number(c).k, q) == 1);

    QCurve shifted = c;
    const double dx = (0.1 + 0.3 * rng.next_double()) / q;
    for (double& v : shifted.samples) v += dx;
    CHECK(curves_disjoint(c, shifted));
    CHECK(winding_number(shifted).k == winding_number(c).k);

    // a curve with different winding cannot stay disjoint
    if (q == 1) {
      const QCurve other = qcurve_from_function(1, k + 1, 48, [&](double t) {
        return double(k + 1) * t + a1 * std::sin(2.0 * kPi * t);
      });
      CHECK_FALSE(curves_disjoint(c, other));
    }
  }
}

TEST_CASE("graph measure sampling integrates branch averages") {
  const MultiGraph g = make_translation_graph(64, 1, 2, 1, 2);
  Rng rng(32);
  const double c = sample_graph_measure(
      g, [](double, double) { return 2.5; }, 4000, rng);
  CHECK(c == doctest::Approx(2.5).epsilon(1e-12));

  // branches at theta sit at theta/2 + {0, 1/4, 1/2, 3/4}: the branch mean
  // of sin(2 pi x) cancels exactly
  Rng rng2(33);
  const double s = sample_graph_measure(
      g, [](double, double x) { return std::sin(2.0 * kPi * x); }, 4000, rng2);
  CHECK(s == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("measure defect separates invariant from drifting graphs") {
  // single-branch graph x = theta; invariant when the fibre increment is
  // omega, a genuine drift when the fibre map is the identity
  const MultiGraph g = make_translation_graph(512, 1, 1, 0, 1);
  const auto f = [](double th, double x) { return std::cos(2.0 * kPi * (x - th)); };
  const QpfSystem good = make_translation(golden_mean(), 1, 1, 0, 1);
  const QpfSystem bad = make_translation(golden_mean(), 0, 1, 0, 1);
  Rng rng1(34), rng2(34);
  const double inv_defect = measure_invariance_defect(good, g, f, 3000, rng1);
  const double drift_defect = measure_invariance_defect(bad, g, f, 3000, rng2);
  CHECK(inv_defect < 1e-12);
  CHECK(drift_defect > 1.0);
}

TEST_CASE("multigraph CSV round-trips exactly") {
  MultiGraph g = make_translation_graph(96, 1, 3, 1, 2);
  const std::string path = "test_graphs_roundtrip.tmp.csv";
  write_multigraph_csv(path, g);
  const MultiGraph back = read_multigraph_csv(path);
  REQUIRE(back.fibres() == g.fibres());
  REQUIRE(back.branches() == g.branches());
  for (int j = 0; j < g.fibres(); ++j) {
    CHECK(back.grid[j] == g.grid[j]);
    for (int i = 0; i < g.branches(); ++i) CHECK(back.values[j][i] == g.values[j][i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("qcurve CSV round-trips exactly") {
  const QCurve c = qcurve_from_function(
      3, 1, 33, [](double t) { return t / 3.0 + 0.05 * std::sin(2.0 * kPi * t / 3.0); });
  const std::string path = "test_graphs_curve.tmp.csv";
  write_qcurve_csv(path, c);
  const QCurve back = read_qcurve_csv(path);
  CHECK(back.q == c.q);
  CHECK(back.declared_k == c.declared_k);
  REQUIRE(back.samples.size() == c.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i)
    CHECK(back.samples[i] == c.samples[i]);
  std::remove(path.c_str());
}

TEST_CASE("malformed CSV input is rejected with location info") {
  const std::string path = "test_graphs_bad.tmp.csv";
  {
    FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("theta,branch,value\n0,0,0.25\n0,1,not_a_number\n", f);
    std::fclose(f);
  }
  CHECK_THROWS_AS(read_multigraph_csv(path), domain_error);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_multigraph_csv("missing_file.csv"), domain_error);
}
