#include "retint/surrogate.hpp"

#include <cmath>
#include <complex>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "retint/errors.hpp"
#include "retint/seeding.hpp"

namespace retint {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW plan creation is not thread safe; execution of a local plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void fft_forward(std::vector<std::complex<double>>& data) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()),
                            reinterpret_cast<fftw_complex*>(data.data()),
                            reinterpret_cast<fftw_complex*>(data.data()),
                            FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

// fGn autocovariance at lag k for unit-variance increments.
double fgn_autocovariance(double hurst, std::size_t k) {
  const double h2 = 2.0 * hurst;
  const double kd = static_cast<double>(k);
  return 0.5 * (std::pow(kd + 1.0, h2) - 2.0 * std::pow(kd, h2) +
                std::pow(std::fabs(kd - 1.0), h2));
}

}  // namespace

std::vector<double> fgn(double hurst, std::size_t n, std::uint64_t seed) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw Error(errc::invalid_config, "Hurst exponent must lie in (0,1)");
  if (!is_power_of_two(n) || n < (1u << 10))
    throw Error(errc::invalid_length,
                "length must be a power of two >= 1024, got " + std::to_string(n),
                static_cast<std::int64_t>(n));

  const std::size_t m = 2 * n;

  // circulant first row: rho(0..n), then mirrored rho(n-1..1)
  std::vector<std::complex<double>> eigen(m);
  for (std::size_t k = 0; k <= n; ++k) eigen[k] = fgn_autocovariance(hurst, k);
  for (std::size_t k = 1; k < n; ++k) eigen[m - k] = eigen[k];
  fft_forward(eigen);

  double lambda_max = 0.0;
  for (const auto& v : eigen) lambda_max = std::max(lambda_max, v.real());
  std::vector<double> lambda(m);
  for (std::size_t k = 0; k < m; ++k) {
    double v = eigen[k].real();
    if (v < 0.0) {
      if (v < -1e-8 * lambda_max)
        throw Error(errc::embedding_failure,
                    "circulant eigenvalue " + std::to_string(v) + " is negative");
      v = 0.0;
    }
    lambda[k] = v;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double dm = static_cast<double>(m);

  std::vector<std::complex<double>> spectrum(m);
  spectrum[0] = std::sqrt(dm * lambda[0]) * gauss(rng);
  for (std::size_t k = 1; k < n; ++k) {
    const double scale = std::sqrt(dm * lambda[k] / 2.0);
    const double re = gauss(rng), im = gauss(rng);
    spectrum[k] = std::complex<double>(scale * re, scale * im);
    spectrum[m - k] = std::conj(spectrum[k]);
  }
  spectrum[n] = std::sqrt(dm * lambda[n]) * gauss(rng);

  // inverse transform realized as forward FFT / m on the conjugate-symmetric
  // spectrum; the result is real up to rounding
  fft_forward(spectrum);
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) out[t] = spectrum[t].real() / dm;
  return out;
}

std::vector<double> student_returns(double tail_exponent, std::size_t n,
                                    std::uint64_t seed) {
  if (!(tail_exponent > 2.0))
    throw Error(errc::infinite_variance,
                "tail exponent must exceed 2 for a finite variance");
  if (n < 1) throw Error(errc::invalid_length, "need at least one draw");

  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> student(tail_exponent);
  const double scale = std::sqrt(tail_exponent / (tail_exponent - 2.0));
  std::vector<double> out(n);
  for (double& x : out) x = student(rng) / scale;
  return out;
}

std::vector<double> rank_remap(const std::vector<double>& pattern,
                               std::vector<double> marginal) {
  if (pattern.size() != marginal.size())
    throw Error(errc::grid_mismatch, "pattern and marginal lengths differ");
  std::vector<std::size_t> order(pattern.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pattern[a] < pattern[b]; });
  std::sort(marginal.begin(), marginal.end());

  std::vector<double> out(pattern.size());
  for (std::size_t rank = 0; rank < order.size(); ++rank) out[order[rank]] = marginal[rank];
  return out;
}

NormalizedVolatilitySeries long_memory_volatility(double hurst, double tail_exponent,
                                                  std::size_t n, std::uint64_t seed) {
  std::vector<double> pattern = fgn(hurst, n, mix_seed(seed, 0x666e67));
  std::vector<double> marginal = student_returns(tail_exponent, n, mix_seed(seed, 0x747374));
  for (double& x : marginal) x = std::fabs(x);
  return normalize_flat(rank_remap(pattern, std::move(marginal)), "surrogate");
}

}  // namespace retint
