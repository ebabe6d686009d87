#include "qpcircle/boxcomb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qpcircle/errors.hpp"
#include "qpcircle/util.hpp"
#include "qpcircle/variation.hpp"

namespace qpcircle {

namespace {

Arc interval_arc(const CircleInterval& j) { return Arc{j.lower(), j.length()}; }

double return_threshold(const Box& box, double alpha) {
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw domain_error("box: alpha must lie in (0, 1)");
  return 0.5 * (1.0 - alpha) * box.I.length();
}

}  // namespace

std::vector<std::int64_t> return_times(const Box& box, double alpha,
                                       double omega, std::int64_t horizon) {
  if (horizon < 0) throw domain_error("box: horizon must be nonnegative");
  const double threshold = return_threshold(box, alpha);
  std::vector<std::int64_t> out;
  for (std::int64_t n = -horizon; n <= horizon; ++n)
    if (dist_to_integer(double(n) * omega) <= threshold) out.push_back(n);
  return out;
}

BoxOrbits::BoxOrbits(const QpfSystem& sys, const Box& box, int grid)
    : sys_(&sys), box_(box), grid_(grid) {
  if (grid_ < 8) throw domain_error("box: need at least eight grid cells");
  if (box_.I.length() >= 0.5)
    throw domain_error("box: base interval must be shorter than 1/2");
  Edges e;
  e.lo.assign(std::size_t(grid_) + 1, box_.K.lower());
  e.hi.assign(std::size_t(grid_) + 1, box_.K.upper());
  edges_.emplace(0, std::move(e));
}

void BoxOrbits::ensure(std::int64_t n) {
  if (edges_.count(n)) return;
  if (n > 0) {
    std::int64_t m = n - 1;
    while (!edges_.count(m)) --m;
    for (; m < n; ++m) {
      const Edges& prev = edges_.at(m);
      Edges next;
      next.lo.resize(std::size_t(grid_) + 1);
      next.hi.resize(std::size_t(grid_) + 1);
      for (int u = 0; u <= grid_; ++u) {
        const double theta =
            wrap(box_.I.lower() + double(u) / grid_ * box_.I.length() +
                 double(m) * sys_->omega);
        next.lo[std::size_t(u)] = sys_->fibre(theta, prev.lo[std::size_t(u)]);
        next.hi[std::size_t(u)] = sys_->fibre(theta, prev.hi[std::size_t(u)]);
      }
      for (int u = 0; u < grid_; ++u)
        if (circle_dist(next.lo[std::size_t(u)], next.lo[std::size_t(u) + 1]) > 0.2 ||
            circle_dist(next.hi[std::size_t(u)], next.hi[std::size_t(u) + 1]) > 0.2)
          next.smooth = false;
      edges_.emplace(m + 1, std::move(next));
    }
  } else {
    std::int64_t m = n + 1;
    while (!edges_.count(m)) ++m;
    for (; m > n; --m) {
      const Edges& prev = edges_.at(m);
      Edges next;
      next.lo.resize(std::size_t(grid_) + 1);
      next.hi.resize(std::size_t(grid_) + 1);
      for (int u = 0; u <= grid_; ++u) {
        const double theta =
            wrap(box_.I.lower() + double(u) / grid_ * box_.I.length() +
                 double(m - 1) * sys_->omega);
        next.lo[std::size_t(u)] = sys_->fibre_inverse(theta, prev.lo[std::size_t(u)]);
        next.hi[std::size_t(u)] = sys_->fibre_inverse(theta, prev.hi[std::size_t(u)]);
      }
      for (int u = 0; u < grid_; ++u)
        if (circle_dist(next.lo[std::size_t(u)], next.lo[std::size_t(u) + 1]) > 0.2 ||
            circle_dist(next.hi[std::size_t(u)], next.hi[std::size_t(u) + 1]) > 0.2)
          next.smooth = false;
      edges_.emplace(m - 1, std::move(next));
    }
  }
}

Arc BoxOrbits::slice_at_grid(std::int64_t n, int u) {
  if (u < 0 || u > grid_) throw domain_error("box: grid index out of range");
  ensure(n);
  const Edges& e = edges_.at(n);
  const double lo = e.lo[std::size_t(u)];
  return Arc{lo, wrap(e.hi[std::size_t(u)] - lo)};
}

Arc BoxOrbits::slice(std::int64_t n, double theta) {
  ensure(n);
  const Edges& e = edges_.at(n);
  if (!e.smooth) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "box: grid too coarse to track the image at step %lld",
                  static_cast<long long>(n));
    throw domain_error(buf);
  }
  const double lower = wrap(box_.I.lower() + double(n) * sys_->omega);
  double pos = wrap(theta - lower) / box_.I.length() * grid_;
  pos = std::clamp(pos, 0.0, double(grid_));
  int u = int(pos);
  if (u >= grid_) u = grid_ - 1;
  const double frac = pos - u;
  const double a0 = e.lo[std::size_t(u)];
  const double a1 = e.lo[std::size_t(u) + 1];
  const double b0 = e.hi[std::size_t(u)];
  const double b1 = e.hi[std::size_t(u) + 1];
  const double lo = wrap(a0 + circle_delta(a0, a1) * frac);
  const double hi = wrap(b0 + circle_delta(b0, b1) * frac);
  return Arc{lo, wrap(hi - lo)};
}

std::optional<std::int64_t> BoxOrbits::first_self_intersection(std::int64_t up_to) {
  const Arc base = interval_arc(box_.K);
  for (std::int64_t n = 1; n <= up_to; ++n) {
    if (dist_to_integer(double(n) * sys_->omega) >= box_.I.length()) continue;
    for (int u = 0; u <= grid_; ++u) {
      const double theta_img =
          wrap(box_.I.lower() + double(u) / grid_ * box_.I.length() +
               double(n) * sys_->omega);
      if (box_.I.contains(theta_img) &&
          arcs_overlap(slice_at_grid(n, u), base))
        return n;
      const double theta_box =
          wrap(box_.I.lower() + double(u) / grid_ * box_.I.length());
      if (box_.I.translated(double(n) * sys_->omega).contains(theta_box) &&
          arcs_overlap(slice(n, theta_box), base))
        return n;
    }
  }
  return std::nullopt;
}

CyclicOrder ordering(BoxOrbits& orbits, const std::vector<std::int64_t>& times,
                     const CircleInterval& J, int fibres) {
  CyclicOrder result;
  if (times.size() < 2) throw domain_error("ordering: need at least two times");
  if (fibres < 1) throw domain_error("ordering: need at least one sample fibre");

  for (std::int64_t n : times) {
    const CircleInterval shifted =
        orbits.box().I.translated(double(n) * orbits.system().omega);
    if (!shifted.contains_interval(J, 0.0)) return result;
  }
  result.comparable = true;

  const int m = int(times.size());
  result.separated = true;
  result.constant = true;
  std::vector<int> ref_order;
  for (int f = 0; f < fibres; ++f) {
    const double theta =
        wrap(J.lower() + (double(f) + 0.5) / fibres * J.length());
    std::vector<Arc> slices(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
      slices[std::size_t(i)] = orbits.slice(times[std::size_t(i)], theta);
    for (int i = 0; i < m && result.separated; ++i)
      for (int j = i + 1; j < m; ++j)
        if (arcs_overlap(slices[std::size_t(i)], slices[std::size_t(j)])) {
          result.separated = false;
          break;
        }
    if (!result.separated) break;

    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) idx[std::size_t(i)] = i;
    const double ref = slices[0].mid();
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return wrap(slices[std::size_t(a)].mid() - ref) <
             wrap(slices[std::size_t(b)].mid() - ref);
    });
    if (f == 0)
      ref_order = idx;
    else if (idx != ref_order) {
      result.constant = false;
      break;
    }
  }
  if (result.separated && result.constant) {
    result.order.reserve(std::size_t(m));
    for (int i : ref_order) result.order.push_back(times[std::size_t(i)]);
  } else {
    result.constant = false;
  }
  return result;
}

bool is_closest_return(BoxOrbits& orbits, double alpha, std::int64_t n,
                       int fibres) {
  if (n == 0) return false;
  const Box& box = orbits.box();
  const double omega = orbits.system().omega;
  const double threshold = return_threshold(box, alpha);
  if (dist_to_integer(double(n) * omega) > threshold) return false;

  const CircleInterval i_alpha(box.I.center(), 0.5 * alpha * box.I.length());

  // Orientation of (-n, 0, n) over the middle part, constant across fibres.
  int orient = 0;
  for (int f = 0; f < fibres; ++f) {
    const double theta =
        wrap(i_alpha.lower() + (double(f) + 0.5) / fibres * i_alpha.length());
    const Arc a = orbits.slice(-n, theta);
    const Arc b = orbits.slice(0, theta);
    const Arc c = orbits.slice(n, theta);
    if (arcs_overlap(a, b) || arcs_overlap(b, c) || arcs_overlap(a, c))
      return false;
    const int o = cyclic_ccw(a.mid(), b.mid(), c.mid()) ? 1 : -1;
    if (f == 0)
      orient = o;
    else if (o != orient)
      return false;
  }

  for (std::int64_t k = -(std::llabs(n) - 1); k < std::llabs(n); ++k) {
    if (k == 0) continue;
    if (dist_to_integer(double(k) * omega) > threshold) continue;
    bool between = true;
    for (int f = 0; f < fibres && between; ++f) {
      const double theta =
          wrap(i_alpha.lower() + (double(f) + 0.5) / fibres * i_alpha.length());
      const Arc b = orbits.slice(0, theta);
      const Arc kk = orbits.slice(k, theta);
      const Arc c = orbits.slice(n, theta);
      if (arcs_overlap(b, kk) || arcs_overlap(kk, c)) {
        between = false;
        break;
      }
      const bool ccw = orient > 0 ? cyclic_ccw(b.mid(), kk.mid(), c.mid())
                                  : cyclic_ccw(c.mid(), kk.mid(), b.mid());
      if (!ccw) between = false;
    }
    if (between) return false;
  }
  return true;
}

ReturnBound closest_return_bound(const QpfSystem& sys, const Box& box,
                                 std::int64_t n, double alpha, int quad,
                                 std::optional<double> total_variation) {
  if (!sys.is_diffeomorphism())
    throw unsupported_error("return bound: needs fibre derivatives");
  if (quad < 2) throw domain_error("return bound: need at least two quadrature cells");
  if (!(alpha > 0.0) || alpha >= 1.0)
    throw domain_error("box: alpha must lie in (0, 1)");

  ReturnBound out;
  out.n = n;
  out.beta = std::min(alpha, 0.5 * (1.0 - alpha));
  out.variation_used = total_variation ? *total_variation : variation(sys).value;

  CompensatedSum acc;
  for (int u = 0; u < quad; ++u) {
    const double theta =
        wrap(box.I.lower() + (double(u) + 0.5) / quad * box.I.length());
    for (int v = 0; v < quad; ++v) {
      const double x =
          wrap(box.K.lower() + (double(v) + 0.5) / quad * box.K.length());
      acc.add(iterate_derivative(sys, theta, x, n) +
              iterate_derivative(sys, theta, x, -n));
    }
  }
  out.measure = acc.value() / (double(quad) * quad) * box.I.length() *
                box.K.length();

  const double len_beta = out.beta * box.I.length();
  out.bound = box.K.length() * len_beta *
              std::exp(-out.variation_used / (2.0 * len_beta));
  return out;
}

double image_measure_sum(const QpfSystem& sys, const Box& box,
                         std::int64_t range, int quad) {
  if (!sys.is_diffeomorphism())
    throw unsupported_error("image measure: needs fibre derivatives");
  CompensatedSum total;
  for (std::int64_t n = -range; n <= range; ++n) {
    CompensatedSum acc;
    for (int u = 0; u < quad; ++u) {
      const double theta =
          wrap(box.I.lower() + (double(u) + 0.5) / quad * box.I.length());
      for (int v = 0; v < quad; ++v) {
        const double x =
            wrap(box.K.lower() + (double(v) + 0.5) / quad * box.K.length());
        acc.add(iterate_derivative(sys, theta, x, n));
      }
    }
    total.add(acc.value() / (double(quad) * quad) * box.I.length() *
              box.K.length());
  }
  return total.value();
}

BoxCombinatorics analyze_box(const QpfSystem& sys, const Box& box, double alpha,
                             std::int64_t horizon, int grid) {
  if (horizon < 1) throw domain_error("box: horizon must be positive");
  BoxCombinatorics out{box, alpha, horizon, {}, {}, {}};

  BoxOrbits orbits(sys, box, grid);
  if (const auto bad = orbits.first_self_intersection(2 * horizon)) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "box images overlap at iterate %lld; the box is not wandering",
                  static_cast<long long>(*bad));
    throw wandering_violation(buf, *bad);
  }

  out.returns = return_times(box, alpha, sys.omega, horizon);
  for (std::int64_t n : out.returns) {
    if (n == 0) continue;
    if (is_closest_return(orbits, alpha, n)) out.closest.push_back(n);
  }

  if (sys.is_diffeomorphism()) {
    std::optional<double> variation_cache;
    for (std::int64_t n : out.closest) {
      if (n <= 0) continue;
      out.bounds.push_back(
          closest_return_bound(sys, box, n, alpha, 64, variation_cache));
      if (!variation_cache) variation_cache = out.bounds.back().variation_used;
    }
  }
  return out;
}

ProbeResult transitivity_probe(const QpfSystem& sys, const Box& source,
                               const Box& target, std::int64_t horizon,
                               int grid) {
  if (horizon < 1) throw domain_error("probe: horizon must be positive");
  ProbeResult out;
  out.horizon = horizon;
  BoxOrbits orbits(sys, source, grid);
  const Arc target_arc = interval_arc(target.K);
  for (std::int64_t m = 1; m <= horizon; ++m) {
    for (const std::int64_t n : {m, -m}) {
      if (dist_to_integer(double(n) * sys.omega +
                          circle_delta(target.I.center(), source.I.center())) >=
          0.5 * (source.I.length() + target.I.length()))
        continue;
      for (int u = 0; u <= grid; ++u) {
        const double theta =
            wrap(source.I.lower() + double(u) / grid * source.I.length() +
                 double(n) * sys.omega);
        if (!target.I.contains(theta)) continue;
        if (arcs_overlap(orbits.slice_at_grid(n, u), target_arc)) {
          out.hit = n;
          return out;
        }
      }
    }
  }
  return out;
}

}  // namespace qpcircle
