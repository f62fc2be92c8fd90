#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include <boost/math/special_functions/gamma.hpp>

#include "retint/errors.hpp"
#include "retint/scaling.hpp"
#include "retint/seeding.hpp"

namespace retint {

namespace {

constexpr double kInversionTolerance = 1e-10;

struct ProfileFit {
  double loss = std::numeric_limits<double>::infinity();
  double log_c = 0.0;
  double alpha = 0.0;
};

// For fixed gamma the model log f = log c - alpha * x^gamma is linear in
// (log c, alpha); solve by least squares on the binned log densities.
ProfileFit profile_loss(const std::vector<double>& centers,
                        const std::vector<double>& log_density, double gamma) {
  ProfileFit fit;
  const std::size_t n = centers.size();
  double su = 0.0, sy = 0.0;
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::pow(centers[i], gamma);
    if (!std::isfinite(u[i])) return fit;
    su += u[i];
    sy += log_density[i];
  }
  const double mu = su / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double suu = 0.0, suy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suy += (u[i] - mu) * (log_density[i] - my);
  }
  if (!(suu > 0.0)) return fit;
  const double slope = suy / suu;
  if (!(slope < 0.0)) return fit;  // density must decay
  fit.alpha = -slope;
  fit.log_c = my - slope * mu;
  fit.loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = log_density[i] - (fit.log_c + slope * u[i]);
    fit.loss += r * r;
  }
  return fit;
}

double golden_minimize(const std::vector<double>& centers,
                       const std::vector<double>& log_density, double lo, double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = profile_loss(centers, log_density, x1).loss;
  double f2 = profile_loss(centers, log_density, x2).loss;
  while (b - a > 1e-8) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = profile_loss(centers, log_density, x1).loss;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = profile_loss(centers, log_density, x2).loss;
    }
  }
  return (a + b) / 2;
}

}  // namespace

double se_normalization(double alpha, double gamma) {
  return std::exp(std::log(gamma) + std::log(alpha) / gamma - std::lgamma(1.0 / gamma));
}

SeFit fit_stretched_exponential(std::span<const ScaledIntervals> samples,
                                const FitOptions& options) {
  std::vector<double> pooled;
  for (const ScaledIntervals& s : samples)
    pooled.insert(pooled.end(), s.values.begin(), s.values.end());
  if (pooled.size() < 100)
    throw Error(errc::insufficient_support,
                "pooled sample of " + std::to_string(pooled.size()) + " values; need >= 100",
                static_cast<std::int64_t>(pooled.size()));

  const BinnedPdf pdf = log_binned_pdf(pooled, options.bins_per_decade);
  std::vector<double> centers, log_density;
  double x_lo = 0.0, x_hi = 0.0;
  for (const BinnedPdf::Bin& bin : pdf.bins) {
    if (bin.count < options.min_bin_count) continue;
    if (centers.empty()) x_lo = bin.lo;
    x_hi = bin.hi;
    centers.push_back(bin.center);
    log_density.push_back(std::log(bin.density));
  }
  if (centers.size() < 5)
    throw Error(errc::insufficient_support,
                std::to_string(centers.size()) + " occupied bins; need >= 5",
                static_cast<std::int64_t>(centers.size()));

  const double gamma_lo = 1e-3;
  double best_gamma = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 10; ++k) {
    double start = 0.1 * k;
    double a = std::max(gamma_lo, start - 0.1);
    double b = std::min(options.gamma_max, start + 0.1);
    // walk the bracket if the local minimum sits on its edge
    for (int hop = 0; hop < 12; ++hop) {
      double g = golden_minimize(centers, log_density, a, b);
      double l = profile_loss(centers, log_density, g).loss;
      if (l < best_loss) {
        best_loss = l;
        best_gamma = g;
      }
      const double width = b - a;
      if (g - a < 0.05 * width && a > gamma_lo + 1e-12) {
        b = a + 0.25 * width;
        a = std::max(gamma_lo, a - width);
      } else if (b - g < 0.05 * width && b < options.gamma_max - 1e-12) {
        a = b - 0.25 * width;
        b = std::min(options.gamma_max, b + width);
      } else {
        break;
      }
    }
  }
  if (!std::isfinite(best_loss))
    throw Error(errc::fit_diverged, "no gamma in (0," + std::to_string(options.gamma_max) +
                                        "] gives a decaying fit");

  const ProfileFit pf = profile_loss(centers, log_density, best_gamma);
  SeFit fit;
  fit.c = std::exp(pf.log_c);
  fit.alpha = pf.alpha;
  fit.gamma = best_gamma;
  fit.c_normalized = se_normalization(pf.alpha, best_gamma);
  fit.x_lo = x_lo;
  fit.x_hi = x_hi;
  fit.loss = pf.loss;
  return fit;
}

double se_cdf(const SeFit& fit, double x) {
  if (!(fit.alpha > 0.0) || !(fit.gamma > 0.0))
    throw Error(errc::invalid_config, "fit parameters must be positive");
  if (x < 0.0) throw Error(errc::invalid_sample, "se_cdf requires x >= 0");
  if (x == 0.0) return 0.0;
  return boost::math::gamma_p(1.0 / fit.gamma, fit.alpha * std::pow(x, fit.gamma));
}

namespace {

// Unit-interval double strictly inside (0,1).
double canonical_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Numeric inversion of se_cdf: bisection on |F(x) - u| < 1e-10, with the
// initial bracket seeded from the inverse regularized incomplete gamma so
// the loop terminates after a handful of evaluations.
double invert_se_cdf(const SeFit& fit, double u) {
  const double shape = 1.0 / fit.gamma;
  const double g = boost::math::gamma_p_inv(shape, u);
  double guess = std::pow(g / fit.alpha, 1.0 / fit.gamma);
  if (!std::isfinite(guess) || guess < 0.0) guess = 1.0;

  double lo = guess, hi = guess;
  double step = std::max(guess * 1e-9, 1e-300);
  while (se_cdf(fit, lo) > u && lo > 0.0) {
    lo = std::max(0.0, lo - step);
    step *= 4.0;
  }
  step = std::max(guess * 1e-9, 1e-12);
  while (se_cdf(fit, hi) < u) {
    hi += step;
    step *= 4.0;
  }

  double mid = guess;
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double f = se_cdf(fit, mid);
    if (std::fabs(f - u) < kInversionTolerance) break;
    if (f < u)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < mid * 1e-16 + 1e-300) break;
  }
  return mid;
}

}  // namespace

std::vector<double> sample_se(const SeFit& fit, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(errc::invalid_config, "need at least one draw");
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(invert_se_cdf(fit, canonical_uniform(rng)));
  return out;
}

namespace {

struct GofStats {
  double ks = 0.0;
  double ksw = 0.0;
};

// Both statistics in one pass over the sorted sample. The empirical CDF is
// evaluated at the sample points (right-continuous, ties collapsed).
GofStats gof_stats(std::vector<double>& sample, const SeFit& fit) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  GofStats s;
  std::size_t i = 0;
  while (i < sample.size()) {
    std::size_t j = i;
    while (j + 1 < sample.size() && sample[j + 1] == sample[i]) ++j;
    const double f_emp = static_cast<double>(j + 1) / n;
    const double f_se = se_cdf(fit, sample[i]);
    const double d = std::fabs(f_emp - f_se);
    s.ks = std::max(s.ks, d);
    if (f_se > 0.0 && f_se < 1.0)
      s.ksw = std::max(s.ksw, d / std::sqrt(f_se * (1.0 - f_se)));
    i = j + 1;
  }
  return s;
}

struct BootstrapCounts {
  std::int64_t ks_exceed = 0;
  std::int64_t ksw_exceed = 0;
};

BootstrapCounts run_replicas(const SeFit& fit, double ks_obs, double ksw_obs,
                             std::size_t n, int replicas, std::uint64_t seed,
                             int threads) {
  if (replicas < 100)
    throw Error(errc::invalid_config, "bootstrap needs at least 100 replicas");
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, replicas);

  auto worker = [&](int begin, int end, BootstrapCounts* counts) {
    for (int b = begin; b < end; ++b) {
      std::vector<double> replica = sample_se(fit, n, mix_seed(seed, static_cast<std::uint64_t>(b)));
      const GofStats s = gof_stats(replica, fit);
      if (s.ks > ks_obs) ++counts->ks_exceed;
      if (s.ksw > ksw_obs) ++counts->ksw_exceed;
    }
  };

  std::vector<BootstrapCounts> partial(static_cast<std::size_t>(threads));
  if (threads == 1) {
    worker(0, replicas, &partial[0]);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (replicas + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(replicas, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end, &partial[static_cast<std::size_t>(t)]);
    }
    for (std::thread& th : pool) th.join();
  }

  BootstrapCounts total;
  for (const BootstrapCounts& c : partial) {
    total.ks_exceed += c.ks_exceed;
    total.ksw_exceed += c.ksw_exceed;
  }
  return total;
}

}  // namespace

double ks_gof(std::span<const double> sample, const SeFit& fit) {
  if (sample.empty()) throw Error(errc::empty_series, "empty sample");
  std::vector<double> copy(sample.begin(), sample.end());
  return gof_stats(copy, fit).ks;
}

double ksw_gof(std::span<const double> sample, const SeFit& fit) {
  if (sample.empty()) throw Error(errc::empty_series, "empty sample");
  std::vector<double> copy(sample.begin(), sample.end());
  return gof_stats(copy, fit).ksw;
}

double bootstrap_pvalue(const SeFit& fit, double observed, std::size_t n,
                        int replicas, bool weighted, std::uint64_t seed, int threads) {
  const double ks_obs = weighted ? std::numeric_limits<double>::infinity() : observed;
  const double ksw_obs = weighted ? observed : std::numeric_limits<double>::infinity();
  const BootstrapCounts counts = run_replicas(fit, ks_obs, ksw_obs, n, replicas, seed, threads);
  const std::int64_t exceed = weighted ? counts.ksw_exceed : counts.ks_exceed;
  return static_cast<double>(exceed) / static_cast<double>(replicas);
}

GofEntry bootstrap_gof(const SeFit& fit, std::span<const double> sample, double q,
                       int replicas, std::uint64_t seed, int threads) {
  if (sample.empty()) throw Error(errc::empty_series, "empty sample");
  std::vector<double> copy(sample.begin(), sample.end());
  const GofStats observed = gof_stats(copy, fit);

  GofEntry entry;
  entry.q = q;
  entry.sample_size = static_cast<std::int64_t>(sample.size());
  entry.ks = observed.ks;
  entry.ksw = observed.ksw;
  const BootstrapCounts counts =
      run_replicas(fit, observed.ks, observed.ksw, sample.size(), replicas, seed, threads);
  entry.p_ks = static_cast<double>(counts.ks_exceed) / static_cast<double>(replicas);
  entry.p_ksw = static_cast<double>(counts.ksw_exceed) / static_cast<double>(replicas);
  return entry;
}

}  // namespace retint
