#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qpcircle {

inline constexpr const char* kVersion = "0.1.0";

/// (sqrt(5) - 1) / 2, the default driving rotation everywhere.
double golden_mean();

/// Neumaier-compensated accumulator. Used for every long Birkhoff-type sum
/// so results stay stable out to 10^6+ terms.
class CompensatedSum {
public:
  void add(double x) {
    double t = s_ + x;
    if (std::abs(s_) >= std::abs(x))
      c_ += (s_ - t) + x;
    else
      c_ += (x - t) + s_;
    s_ = t;
  }
  double value() const { return s_ + c_; }

private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// splitmix64 generator. Chosen over std::mt19937_64 + distributions because
/// the stream (and therefore every output file) must be bit-identical across
/// standard library implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
  std::uint64_t state_;
};

/// Worker cap for the deterministic parallel loops. 0 or 1 means serial.
/// Parallel bodies write into disjoint slots and reductions run in index
/// order, so the result does not depend on this value.
void set_worker_threads(unsigned n);
unsigned worker_threads();

/// Runs body(i) for i in [0, n), chunked over the worker threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Shortest decimal form of x that parses back to the same bits.
std::string format_double(double x);

long long gcd_ll(long long a, long long b);

}  // namespace qpcircle
