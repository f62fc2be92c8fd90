#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "retint/ingest.hpp"

namespace retint {

// Uniform random permutation (Fisher-Yates), deterministic per seed.
template <class T>
std::vector<T> shuffled(std::vector<T> values, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = values.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(values[i - 1], values[pick(rng)]);
  }
  return values;
}

// Stationary Gaussian sequence with fractional-Gaussian-noise autocovariance
// rho(k) = ((k+1)^{2H} - 2 k^{2H} + |k-1|^{2H}) / 2, synthesized by circulant
// embedding (exact in law). N must be a power of two >= 2^10.
std::vector<double> fgn(double hurst, std::size_t n, std::uint64_t seed);

// i.i.d. Student-t draws with nu degrees of freedom, standardized to unit
// variance. Requires nu > 2.
std::vector<double> student_returns(double tail_exponent, std::size_t n,
                                    std::uint64_t seed);

// Reorders `marginal` so its values follow the rank order of `pattern`:
// the position of the k-th smallest pattern value receives the k-th smallest
// marginal value. Preserves the marginal multiset exactly.
std::vector<double> rank_remap(const std::vector<double>& pattern,
                               std::vector<double> marginal);

// Long-memory volatility surrogate: |Student(nu)| marginal rank-remapped onto
// an fGn(H) temporal ordering, then normalized to unit std.
NormalizedVolatilitySeries long_memory_volatility(double hurst, double tail_exponent,
                                                  std::size_t n, std::uint64_t seed);

}  // namespace retint
