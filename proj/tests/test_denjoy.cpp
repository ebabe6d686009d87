#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qpcircle/boxcomb.hpp"
#include "qpcircle/catalog.hpp"
#include "qpcircle/errors.hpp"
#include "qpcircle/util.hpp"
#include "qpcircle/variation.hpp"

using namespace qpcircle;

namespace {

std::vector<double> const_edge(double v) { return std::vector<double>(2, v); }

}  // namespace

TEST_CASE("rigid fibre maps have zero derivative variation") {
  const QpfSystem skew = make_skew_translation(golden_mean(), 0.3, 0.2);
  CHECK(fibre_log_derivative_variation(skew, 0.17, 256) == 0.0);
  const VariationEstimate est = variation(skew, 16, 512);
  CHECK(est.value == 0.0);
  CHECK(est.max_fibre == 0.0);
}

TEST_CASE("arnold variation matches the closed form") {
  // DT = 1 + a cos(2 pi x), so the fibre variation of log DT is
  // 2 (log(1+a) - log(1-a)) on every fibre
  for (double a : {0.1, 0.3, 0.6}) {
    CAPTURE(a);
    const QpfSystem sys = make_forced_arnold(golden_mean(), a, 0.4, 0.3);
    const double expected = 2.0 * (std::log1p(a) - std::log1p(-a));
    const VariationEstimate est = variation(sys);
    CHECK(est.value == doctest::Approx(expected).epsilon(1e-6));
    CHECK(est.max_fibre == doctest::Approx(expected).epsilon(1e-6));
    CHECK(est.x_grid <= 4096);
    CHECK_FALSE(est.trace.empty());
  }
}

TEST_CASE("distortion bound is an equality for skew translations") {
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const QpfSystem sys = make_skew_translation(
        golden_mean(), rng.next_double(), 0.3 * rng.next_double());
    const CircleInterval I(rng.next_double(), 0.01 + 0.02 * rng.next_double());
    const int n = 1 + int(rng.next_below(6));
    const DistortionBound b = distortion_integral(
        sys, I, const_edge(0.4), const_edge(0.6), n, 0.5, 64);
    CHECK(std::abs(b.lhs - I.length()) < 1e-12);
    CHECK(std::abs(b.rhs - I.length()) < 1e-12);
    CHECK(std::abs(b.margin) < 1e-12);
  }
}

TEST_CASE("distortion inequality holds for the arnold family") {
  const QpfSystem sys = make_forced_arnold(golden_mean(), 0.5, 0.3, 0.29);
  const CircleInterval I(0.1, 0.02);
  const int m = max_disjoint_iterates(sys, I, const_edge(0.45), const_edge(0.55), 30);
  CHECK(m >= 1);
  const DistortionBound b = distortion_integral(
      sys, I, const_edge(0.45), const_edge(0.55), m + 1, 0.5, 128);
  CHECK(b.margin >= 0.0);
  CHECK(b.lhs >= b.rhs);
  CHECK(b.iterations == m + 1);
}

TEST_CASE("overlapping strips violate the distortion hypothesis") {
  // a full-height strip hits itself as soon as the base intervals overlap
  const QpfSystem sys = make_forced_arnold(golden_mean(), 0.3, 0.3, 0.3);
  const CircleInterval I(0.0, 0.24);
  CHECK_THROWS_AS(distortion_integral(sys, I, const_edge(0.05), const_edge(0.95),
                                      5, 0.5, 64),
                  hypothesis_error);
}

TEST_CASE("return times match a direct scan") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const double hw = 0.02 + 0.05 * rng.next_double();
    const double alpha = 0.1 + 0.8 * rng.next_double();
    const double omega = trial % 2 == 0 ? golden_mean() : rng.next_double();
    const Box box{CircleInterval(rng.next_double(), hw),
                  CircleInterval(0.5, 0.05)};
    const std::int64_t horizon = 60;
    const std::vector<std::int64_t> got = return_times(box, alpha, omega, horizon);

    std::vector<std::int64_t> want;
    for (std::int64_t n = -horizon; n <= horizon; ++n) {
      if (dist_to_integer(double(n) * omega) <= 0.5 * (1.0 - alpha) * 2.0 * hw)
        want.push_back(n);
    }
    CHECK(got == want);
    CHECK(std::find(got.begin(), got.end(), 0) != got.end());
  }
  CHECK_THROWS_AS(return_times(Box{CircleInterval(0.0, 0.05), CircleInterval(0.5, 0.05)},
                               1.5, golden_mean(), 10),
                  domain_error);
}

TEST_CASE("golden-mean return times are the frozen continued-fraction set") {
  const Box box{CircleInterval(0.0, 0.05), CircleInterval(0.5, 0.01)};
  const std::vector<std::int64_t> got = return_times(box, 0.5, golden_mean(), 40);
  CHECK(got == std::vector<std::int64_t>{-34, -21, 0, 21, 34});
}

TEST_CASE("box orbit slices track a rigid translation exactly") {
  const QpfSystem sys = make_translation(golden_mean(), 1, 2, 1, 2);
  const double rho = 0.5 * golden_mean() + 0.25;
  const Box box{CircleInterval(0.0, 0.05), CircleInterval(0.5, 0.01)};
  BoxOrbits orbits(sys, box, 32);
  for (std::int64_t n : {-7, -1, 1, 4, 19}) {
    const Arc a = orbits.slice(n, wrap(0.01 + double(n) * sys.omega));
    CHECK(a.len == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(circle_dist(a.mid(), wrap(0.5 + double(n) * rho)) < 1e-12);
  }
}

TEST_CASE("wandering scan sees the first overlap of a static box") {
  // identity fibre maps: the box returns exactly when the base comes back
  const QpfSystem sys = make_skew_translation(golden_mean(), 0.0, 0.0);
  const Box box{CircleInterval(0.0, 0.05), CircleInterval(0.5, 0.1)};
  BoxOrbits orbits(sys, box, 32);
  // overlap needs dist(n omega) below the doubled half-width 0.1; the
  // first such n is 5 (5 omega sits 0.0902 from the nearest integer)
  const auto hit = orbits.first_self_intersection(40);
  REQUIRE(hit.has_value());
  CHECK(*hit == 5);
  CHECK_THROWS_AS(analyze_box(sys, box, 0.5, 20, 32), wandering_violation);
}

TEST_CASE("closest returns on the figure-one translation box") {
  const QpfSystem sys = make_translation(golden_mean(), 1, 2, 1, 2);
  const Box box{CircleInterval(0.0, 0.05), CircleInterval(0.5, 0.01)};
  const BoxCombinatorics bc = analyze_box(sys, box, 0.2, 16, 64);
  CHECK(bc.returns == std::vector<std::int64_t>{-13, 0, 13});
  CHECK(bc.closest == std::vector<std::int64_t>{-13, 13});
  REQUIRE(bc.bounds.size() == 1);
  const ReturnBound& b = bc.bounds[0];
  CHECK(b.n == 13);
  // rigid motion: image measure is exactly twice the box area, and the
  // bound is exact with V = 0
  CHECK(b.measure == doctest::Approx(2.0 * 0.1 * 0.02).epsilon(1e-12));
  CHECK(b.bound == doctest::Approx(0.02 * 0.2 * 0.1).epsilon(1e-12));
  CHECK(b.measure >= b.bound);
  CHECK(b.variation_used == 0.0);
}

TEST_CASE("closest-return symmetry") {
  const QpfSystem sys = make_translation(golden_mean(), 1, 3, 1, 2);
  const Box box{CircleInterval(0.3, 0.05), CircleInterval(0.2, 0.01)};
  BoxOrbits orbits(sys, box, 64);
  const std::vector<std::int64_t> times = return_times(box, 0.5, sys.omega, 40);
  for (std::int64_t n : times) {
    if (n <= 0) continue;
    CAPTURE(n);
    CHECK(is_closest_return(orbits, 0.5, n) == is_closest_return(orbits, 0.5, -n));
  }
}

TEST_CASE("image measures of rigid boxes add up exactly") {
  const QpfSystem sys = make_translation(golden_mean(), 1, 2, 1, 2);
  const Box box{CircleInterval(0.0, 0.03), CircleInterval(0.5, 0.02)};
  const double total = image_measure_sum(sys, box, 10, 32);
  CHECK(total == doctest::Approx(21.0 * 0.06 * 0.04).epsilon(1e-12));
}

TEST_CASE("transitivity probe finds a connecting iterate on a minimal system") {
  const QpfSystem sys = make_translation(golden_mean(), 1, 1, 0, 1);
  const Box source{CircleInterval(0.1, 0.05), CircleInterval(0.2, 0.05)};
  const Box target{CircleInterval(0.6, 0.05), CircleInterval(0.8, 0.05)};
  const ProbeResult res = transitivity_probe(sys, source, target, 400, 32);
  REQUIRE(res.hit.has_value());
  // independent check on the reported iterate
  const std::int64_t n = *res.hit;
  CHECK(dist_to_integer(0.1 + double(n) * sys.omega - 0.6) < 0.1);
  CHECK(dist_to_integer(0.2 + double(n) * sys.omega - 0.8) < 0.1);

  const Box far_target{CircleInterval(0.6, 0.001), CircleInterval(0.8, 0.001)};
  const ProbeResult miss = transitivity_probe(sys, source, far_target, 3, 32);
  CHECK_FALSE(miss.hit.has_value());
}
