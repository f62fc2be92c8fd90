#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "retint/intervals.hpp"

namespace retint {

// Right-continuous empirical CDF over a sorted copy of the sample.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(std::vector<double> sample);

  double operator()(double x) const;                       // F(x)
  double complementary(double x) const { return 1.0 - (*this)(x); }
  const std::vector<double>& points() const { return sorted_; }
  std::size_t size() const { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(const ScaledIntervals& sample);

// Logarithmically binned density estimate; empty bins omitted.
// Densities are count/(n * linear bin width), so sum(density*width) == 1.
struct BinnedPdf {
  struct Bin {
    double lo = 0.0, hi = 0.0;
    double center = 0.0;  // geometric mean of the edges
    double density = 0.0;
    std::int64_t count = 0;
  };
  std::vector<Bin> bins;
  std::int64_t total_count = 0;
};

BinnedPdf log_binned_pdf(std::span<const double> sample, int bins_per_decade);
BinnedPdf log_binned_pdf(const ScaledIntervals& sample, int bins_per_decade);

// Two-sample KS over the overlap of the sample ranges, evaluated at every
// sample point of both samples inside the overlap.
struct KsReport {
  double statistic = 0.0;
  double critical_value = 0.0;
  std::size_t m = 0, n = 0;
  double significance = 0.05;
  bool accept = false;                  // statistic < critical_value
  double crossing_significance = 0.0;   // alpha* with CV(alpha*) == statistic
};

// Asymptotic two-sample coefficient c(alpha) = sqrt(-ln(alpha/2)/2);
// c(0.05) = 1.3581.
double ks_coefficient(double significance);
double critical_value(std::size_t m, std::size_t n, double significance);
double crossing_significance(double statistic, std::size_t m, std::size_t n);
// Recovers the effective sqrt(mn/(m+n)) from a printed CV at a known level.
double crossing_significance_from_cv(double statistic, double cv, double significance);

KsReport ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double significance);
KsReport ks_two_sample(const ScaledIntervals& a, const ScaledIntervals& b,
                       double significance);

// Stretched-exponential scaling function f(x) = c * exp(-alpha * x^gamma),
// fitted by least squares on the log density of a log-binned PDF.
struct SeFit {
  double c = 0.0;             // as fitted (free amplitude)
  double alpha = 0.0;
  double gamma = 0.0;
  double c_normalized = 0.0;  // gamma * alpha^(1/gamma) / Gamma(1/gamma)
  double x_lo = 0.0, x_hi = 0.0;  // edge range of the bins used
  double loss = 0.0;          // sum of squared log-density residuals
  bool c_constrained = false; // true once c has been replaced by c_normalized
};

struct FitOptions {
  int bins_per_decade = 10;
  std::int64_t min_bin_count = 5;
  double gamma_max = 2.0;
};

SeFit fit_stretched_exponential(std::span<const ScaledIntervals> samples,
                                const FitOptions& options = {});

// F_SE(x) = P(1/gamma, alpha * x^gamma), the regularized lower incomplete
// gamma function; the CDF of the unit-normalized fitted density.
double se_cdf(const SeFit& fit, double x);

// Normalization constant making integral_0^inf c*exp(-alpha x^gamma) dx = 1.
double se_normalization(double alpha, double gamma);

// i.i.d. draws by numeric inversion of se_cdf (bisection on |F - u| < 1e-10,
// bracket seeded from the inverse incomplete gamma). Deterministic per seed.
std::vector<double> sample_se(const SeFit& fit, std::size_t n, std::uint64_t seed);

// max |F_sample - F_SE| over the sample points.
double ks_gof(std::span<const double> sample, const SeFit& fit);
// Same, weighted by 1/sqrt(F_SE (1 - F_SE)); points with F_SE in {0,1} skipped.
double ksw_gof(std::span<const double> sample, const SeFit& fit);

// p = #{stat_sim > observed}/B over B replicas of size n drawn from the fit.
// Replica b uses seed mix_seed(seed, b); replicas may run on several threads
// (threads = 0 picks hardware concurrency); the count is scheduling-invariant.
double bootstrap_pvalue(const SeFit& fit, double observed, std::size_t n,
                        int replicas, bool weighted, std::uint64_t seed,
                        int threads = 1);

struct GofEntry {
  double q = 0.0;
  std::int64_t sample_size = 0;
  double ks = 0.0, ksw = 0.0;
  double p_ks = 0.0, p_ksw = 0.0;
};

struct GofReport {
  int replicas = 0;
  std::vector<GofEntry> entries;
};

// Both statistics and both p-values, sharing one replica stream. Identical
// to two bootstrap_pvalue calls with the same seed.
GofEntry bootstrap_gof(const SeFit& fit, std::span<const double> sample, double q,
                       int replicas, std::uint64_t seed, int threads = 1);

struct ScalingVerdict {
  bool ks_reject = false;
  bool ksw_reject = false;
};

// Reject iff the minimum p over q in {2, 5} is below the level; KS and KSW
// decided separately. Requires entries for q=2 and q=5.
ScalingVerdict scaling_verdict(const std::vector<GofEntry>& entries, double level);

}  // namespace retint
