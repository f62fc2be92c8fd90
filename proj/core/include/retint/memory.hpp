#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "retint/intervals.hpp"
#include "retint/scaling.hpp"

namespace retint {

// Equal-occupancy quantile bins of the interval sequence, ties broken by
// sequence position; occupancies differ by at most one.
struct ConditionalPdf {
  int bins = 0;
  double tau_mean = 0.0;
  std::vector<std::int64_t> occupancy;           // per tau0 bin, over all intervals
  std::vector<std::int64_t> pair_count;          // successors landing in each bin
  std::vector<std::vector<double>> successors;   // scaled successor samples per bin
  std::vector<BinnedPdf> successor_pdf;          // their log-binned densities
};

struct ConditionalMeanCurve {
  int bins = 0;
  std::vector<double> tau0_center;  // mean tau0 of the bin, scaled
  std::vector<double> mean;         // <tau | tau0> / tau_mean
  std::vector<std::int64_t> count;  // successor count per bin
};

struct ClusterCurve {
  int sign = +1;  // +1: intervals > median, -1: intervals <= median
  std::vector<int> size;            // cluster size n
  std::vector<double> mean;         // scaled mean interval following the cluster
  std::vector<double> stderr_mean;  // standard error of that mean
  std::vector<std::int64_t> count;
};

struct DfaResult {
  std::vector<std::int64_t> window;  // l
  std::vector<double> fluctuation;   // F(l)
};

struct HurstFit {
  double exponent = 0.0;
  double stderr_exponent = 0.0;
  int points = 0;
};

struct HurstCrossover {
  HurstFit small;  // fit over l < split
  HurstFit large;  // fit over l > split
};

ConditionalPdf conditional_pdf(const IntervalSeries& intervals, int bins = 4,
                               int bins_per_decade = 10);

ConditionalMeanCurve mean_conditional_interval(const IntervalSeries& intervals,
                                               int bins = 8);

// "+" clusters are runs above the sample median, "-" runs at or below it
// (ties go to "-"). A maximal run of length L followed by a further interval
// contributes its terminal n-window for every n <= min(L, n_max). Sizes with
// fewer than min_count clusters are omitted.
std::pair<ClusterCurve, ClusterCurve> cluster_conditional_mean(
    const IntervalSeries& intervals, int n_max, std::int64_t min_count = 10);

// Order-1 DFA. The profile is the zero-anchored cumulative sum of the
// mean-subtracted series (N+1 points); each l uses floor(N/l) windows from
// the head and floor(N/l) from the tail, a least-squares line removed per
// window, F(l) the RMS residual over all windows. This segmentation makes
// F invariant under series reversal exactly.
DfaResult dfa(std::span<const double> series, std::span<const std::int64_t> window_sizes);

std::vector<std::int64_t> log_spaced_windows(std::int64_t l_min, std::int64_t l_max,
                                             int count);

// Least-squares slope of log F(l) vs log l over all windows with F > 0.
HurstFit hurst_exponent(const DfaResult& result);

// Separate fits below and above the split (l == split excluded).
HurstCrossover hurst_crossover(const DfaResult& result, std::int64_t split = 50);

}  // namespace retint
