#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace currents {

struct TrivialWordError : std::runtime_error {
  TrivialWordError() : std::runtime_error("word is trivial in the group") {}
};
struct NotHyperbolicError : std::runtime_error {
  explicit NotHyperbolicError(double tr)
      : std::runtime_error("matrix is not hyperbolic, |tr| = " + std::to_string(tr)) {}
};
struct UnstableCountError : std::runtime_error {
  explicit UnstableCountError(const std::string& what) : std::runtime_error(what) {}
};
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};
struct NonFillingError : std::runtime_error {
  explicit NonFillingError(const std::string& witness)
      : std::runtime_error("current is not filling at this truncation, witness " + witness),
        witness_class(witness) {}
  std::string witness_class;
};
struct NotMulticurveError : std::runtime_error {
  NotMulticurveError() : std::runtime_error("current has a Liouville atom") {}
};
struct NonPositiveFunctionalError : std::runtime_error {
  explicit NonPositiveFunctionalError(const std::string& witness)
      : std::runtime_error("functional is not positive on sampled Jordan vectors, witness " + witness),
        witness_class(witness) {}
  std::string witness_class;
};
struct SingularMatrixError : std::runtime_error {
  SingularMatrixError() : std::runtime_error("matrix is singular") {}
};
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};
struct AsymmetricPotentialError : std::runtime_error {
  AsymmetricPotentialError() : std::runtime_error("potential is not symmetric") {}
};

inline unsigned thread_count() {
  if (const char* env = std::getenv("CURRENTS_THREADS")) {
    long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Parallel map over [0, n) in contiguous chunks; results land at their index,
// so the merge is deterministic regardless of scheduling.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  unsigned workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  workers = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned t = 0; t < workers; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |y - fit|
};

inline LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  LinearFit f;
  const std::size_t n = xs.size();
  if (n < 2) return f;
  double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / double(n);
  double my = std::accumulate(ys.begin(), ys.end(), 0.0) / double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < n; ++i)
    f.residual = std::max(f.residual, std::abs(ys[i] - (f.intercept + f.slope * xs[i])));
  return f;
}

// splitmix64: cheap deterministic stream for seeded sampling
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in [0, n)
  std::uint64_t below(std::uint64_t n) { return next() % n; }
  double unit() { return double(next() >> 11) * 0x1.0p-53; }
};

}  // namespace currents
