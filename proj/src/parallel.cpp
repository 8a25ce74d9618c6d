#include "tcprep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tcprep {

namespace {

constexpr std::size_t kChunk = 4096;

template <typename T, typename F>
T chunked_sum(std::size_t n, F&& chunk_value) {
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<T> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    partial[c] = chunk_value(lo, hi);
  }
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace

void set_num_threads(int n) {
  if (n < 1) throw std::invalid_argument("thread count must be >= 1");
#ifdef _OPENMP
  omp_set_num_threads(n);
#endif
}

int num_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return chunked_sum<double>(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += a[k] * b[k];
    return s;
  });
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return chunked_sum<cplx>(a.size(), [&](std::size_t lo, std::size_t hi) {
    cplx s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += std::conj(a[k]) * b[k];
    return s;
  });
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm(std::span<const cplx> a) {
  return std::sqrt(chunked_sum<double>(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t k = lo; k < hi; ++k) s += std::norm(a[k]);
    return s;
  }));
}

}  // namespace tcprep
