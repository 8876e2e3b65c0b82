#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace nlbranch {

/// Pairwise (cascade) summation: result depends only on the order of `xs`.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct SampleMoments {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1) standard deviation
  std::size_t n = 0;
};

/// Two-pass mean and sample standard deviation; `scratch` must hold xs.size() doubles.
inline SampleMoments sample_moments(std::span<const double> xs, std::span<double> scratch) {
  SampleMoments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  m.mean = pairwise_sum(xs) / static_cast<double>(m.n);
  if (m.n < 2) return m;
  for (std::size_t i = 0; i < m.n; ++i) {
    const double d = xs[i] - m.mean;
    scratch[i] = d * d;
  }
  m.stddev = std::sqrt(pairwise_sum(scratch.first(m.n)) / static_cast<double>(m.n - 1));
  return m;
}

}  // namespace nlbranch
