#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "retint/errors.hpp"
#include "retint/intervals.hpp"
#include "retint/memory.hpp"
#include "retint/scaling.hpp"
#include "retint/surrogate.hpp"

using namespace retint;

namespace {

double lag1_autocorrelation(const std::vector<double>& x) {
  std::vector<double> a(x.begin(), x.end() - 1);
  std::vector<double> b(x.begin() + 1, x.end());
  return testutil::pearson(a, b);
}

// log-binned periodogram slope over mid frequencies (test-side FFT)
double periodogram_slope(const std::vector<double>& x) {
  std::vector<std::complex<double>> spec(x.begin(), x.end());
  testutil::fft_radix2(spec);
  const std::size_t n = x.size();

  std::map<int, std::pair<double, int>> bins;  // log-bin -> (power sum, count)
  for (std::size_t k = 16; k <= n / 8; ++k) {
    const double power = std::norm(spec[k]);
    const int bin = static_cast<int>(std::floor(10.0 * std::log10(static_cast<double>(k))));
    bins[bin].first += power;
    bins[bin].second += 1;
  }
  std::vector<double> log_f, log_p;
  for (const auto& [bin, acc] : bins) {
    log_f.push_back((bin + 0.5) / 10.0);
    log_p.push_back(std::log10(acc.first / acc.second));
  }
  return testutil::least_squares(log_f, log_p).slope;
}

}  // namespace

TEST_SUITE_BEGIN("surrogate");

TEST_CASE("shuffle preserves the multiset and is seeded") {
  std::vector<double> values = {3.5, 1.0, 1.0, 7.25, -2.0, 9.0};
  std::vector<double> once = shuffled(values, 99);
  std::vector<double> again = shuffled(values, 99);
  CHECK(once == again);

  std::vector<double> sorted_in = values, sorted_out = once;
  std::sort(sorted_in.begin(), sorted_in.end());
  std::sort(sorted_out.begin(), sorted_out.end());
  CHECK(sorted_in == sorted_out);
}

TEST_CASE("shuffle is a uniform permutation") {
  std::map<std::vector<int>, int> counts;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t)
    ++counts[shuffled(std::vector<int>{1, 2, 3}, 1000 + static_cast<std::uint64_t>(t))];
  CHECK(counts.size() == 6);
  for (const auto& [order, count] : counts)
    CHECK(std::fabs(count / static_cast<double>(trials) - 1.0 / 6.0) < 0.02);
}

TEST_CASE("fgn matches the target autocovariance") {
  std::vector<double> white = fgn(0.5, 1 << 16, 7);
  CHECK(std::fabs(lag1_autocorrelation(white) - 0.0) < 0.02);
  CHECK(testutil::population_variance(white) == doctest::Approx(1.0).epsilon(0.05));

  std::vector<double> persistent = fgn(0.8, 1 << 16, 7);
  const double expected = 0.5 * (std::pow(2.0, 1.6) - 2.0);  // 0.5157
  CHECK(std::fabs(lag1_autocorrelation(persistent) - expected) < 0.02);
  CHECK(testutil::population_variance(persistent) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fgn validates its length") {
  CHECK_THROWS_AS(fgn(0.8, 1000, 1), Error);   // not a power of two
  CHECK_THROWS_AS(fgn(0.8, 512, 1), Error);    // below the minimum
  try {
    fgn(0.8, 1000, 1);
  } catch (const Error& e) {
    CHECK(e.code() == errc::invalid_length);
  }
  CHECK_THROWS_AS(fgn(1.2, 1024, 1), Error);   // Hurst outside (0,1)
}

TEST_CASE("fgn periodogram slope tracks the Hurst exponent") {
  for (double hurst : {0.6, 0.8}) {
    const double slope = periodogram_slope(fgn(hurst, 1 << 16, 40));
    CHECK(std::fabs(slope - (1.0 - 2.0 * hurst)) < 0.1);
  }
}

TEST_CASE("distinct seeds give uncorrelated streams") {
  const std::size_t n = 1 << 14;
  std::vector<double> a = fgn(0.7, n, 1);
  std::vector<double> b = fgn(0.7, n, 2);
  CHECK(std::fabs(testutil::pearson(a, b)) < 3.0 / std::sqrt(static_cast<double>(n)));

  std::vector<double> s1 = student_returns(3.5, n, 1);
  std::vector<double> s2 = student_returns(3.5, n, 2);
  CHECK(std::fabs(testutil::pearson(s1, s2)) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("student returns are standardized") {
  std::vector<double> draws = student_returns(3.5, 1000000, 12);
  CHECK(testutil::population_variance(draws) == doctest::Approx(1.0).epsilon(0.1));

  // large tail exponent approaches the Gaussian: kurtosis 3
  std::vector<double> gaussish = student_returns(1000.0, 1000000, 12);
  const double var = testutil::population_variance(gaussish);
  const double m = testutil::mean(gaussish);
  double fourth = 0.0;
  for (double x : gaussish) fourth += std::pow(x - m, 4);
  fourth /= static_cast<double>(gaussish.size());
  CHECK(fourth / (var * var) == doctest::Approx(3.0).epsilon(0.0334));

  CHECK_THROWS_AS(student_returns(2.0, 100, 1), Error);
  try {
    student_returns(1.5, 100, 1);
  } catch (const Error& e) {
    CHECK(e.code() == errc::infinite_variance);
  }
}

TEST_CASE("rank remap keeps the marginal and the ordering") {
  std::vector<double> pattern = {0.3, -1.0, 2.0, 0.0};
  std::vector<double> marginal = {10.0, 30.0, 20.0, 40.0};
  std::vector<double> out = rank_remap(pattern, marginal);
  // smallest pattern value receives the smallest marginal value
  CHECK(out == std::vector<double>{30.0, 10.0, 40.0, 20.0});

  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  std::vector<double> p(5000), m(5000);
  for (double& v : p) v = gauss(rng);
  for (double& v : m) v = std::fabs(gauss(rng)) + 0.1;
  std::vector<double> mapped = rank_remap(p, m);
  std::vector<double> sorted_m = m, sorted_out = mapped;
  std::sort(sorted_m.begin(), sorted_m.end());
  std::sort(sorted_out.begin(), sorted_out.end());
  CHECK(sorted_m == sorted_out);  // multiset identity, exact
  CHECK(testutil::spearman(p, mapped) == doctest::Approx(1.0));
}

TEST_CASE("long-memory volatility has unit std and the remapped marginal") {
  NormalizedVolatilitySeries series = long_memory_volatility(0.8, 3.5, 1 << 14, 2718);
  CHECK(std::sqrt(testutil::population_variance(series.r)) ==
        doctest::Approx(1.0).epsilon(1e-9));
  for (double x : series.r) CHECK(x >= 0.0);

  // DFA Hurst of the volatility series tracks the requested H
  DfaResult d = dfa(series.r, log_spaced_windows(10, (1 << 14) / 8, 16));
  CHECK(std::fabs(hurst_exponent(d).exponent - 0.8) < 0.07);
}

TEST_CASE("shuffling destroys the long memory") {
  NormalizedVolatilitySeries series = long_memory_volatility(0.8, 3.5, 1 << 15, 515);
  std::vector<double> flat = shuffled(series.r, 99);
  DfaResult d = dfa(flat, log_spaced_windows(10, (1 << 15) / 8, 16));
  CHECK(std::fabs(hurst_exponent(d).exponent - 0.5) < 0.04);
}

TEST_CASE("fitted stretching exponent of a long-memory surrogate is in the expected band") {
  NormalizedVolatilitySeries series = long_memory_volatility(0.8, 3.5, 1 << 17, 77);
  std::vector<ScaledIntervals> pool;
  for (double q : {2.0, 3.0, 4.0, 5.0}) pool.push_back(scale(extract_intervals(series, q)));
  SeFit fit = fit_stretched_exponential(pool);
  CHECK(fit.gamma >= 0.22);
  CHECK(fit.gamma <= 0.44);
}

TEST_SUITE_END();
