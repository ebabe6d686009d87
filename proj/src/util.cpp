#include "qpcircle/util.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <thread>

namespace qpcircle {

double golden_mean() { return (std::sqrt(5.0) - 1.0) / 2.0; }

namespace {
std::atomic<unsigned> g_workers{1};
}

void set_worker_threads(unsigned n) { g_workers.store(n == 0 ? 1 : n); }
unsigned worker_threads() { return g_workers.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned workers = worker_threads();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  if (workers > n) workers = unsigned(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        body(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::string format_double(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

long long gcd_ll(long long a, long long b) {
  return std::gcd(std::llabs(a), std::llabs(b));
}

}  // namespace qpcircle
