#include "retint/memory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "retint/errors.hpp"

namespace retint {

namespace {

// Assigns each interval occurrence to one of `bins` equal-occupancy quantile
// bins of the whole sequence; ties broken by sequence position, so
// occupancies always differ by at most one.
std::vector<int> quantile_bins(const std::vector<std::int64_t>& values, int bins) {
  const std::size_t m = values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<int> bin_of(m, 0);
  const std::size_t base = m / static_cast<std::size_t>(bins);
  const std::size_t remainder = m % static_cast<std::size_t>(bins);
  std::size_t pos = 0;
  for (int b = 0; b < bins; ++b) {
    std::size_t size = base + (static_cast<std::size_t>(b) < remainder ? 1 : 0);
    for (std::size_t k = 0; k < size; ++k) bin_of[order[pos++]] = b;
  }
  return bin_of;
}

void require_pairs(const IntervalSeries& intervals, int bins) {
  const auto pairs = static_cast<std::int64_t>(intervals.values.size()) - 1;
  if (pairs < 8 * static_cast<std::int64_t>(bins))
    throw Error(errc::insufficient_data,
                std::to_string(pairs) + " interval pairs; need >= " + std::to_string(8 * bins),
                pairs);
}

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

SlopeFit log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.points = static_cast<int>(n);
  fit.slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - my - fit.slope * (x[i] - mx);
    sse += r * r;
  }
  if (n > 2) fit.stderr_slope = std::sqrt(sse / (static_cast<double>(n) - 2.0) / sxx);
  return fit;
}

}  // namespace

ConditionalPdf conditional_pdf(const IntervalSeries& intervals, int bins,
                               int bins_per_decade) {
  if (bins < 2) throw Error(errc::invalid_config, "need at least 2 bins");
  require_pairs(intervals, bins);

  const std::vector<int> bin_of = quantile_bins(intervals.values, bins);
  ConditionalPdf out;
  out.bins = bins;
  out.tau_mean = intervals.tau_mean;
  out.occupancy.assign(static_cast<std::size_t>(bins), 0);
  for (int b : bin_of) ++out.occupancy[static_cast<std::size_t>(b)];

  out.successors.resize(static_cast<std::size_t>(bins));
  for (std::size_t k = 0; k + 1 < intervals.values.size(); ++k) {
    out.successors[static_cast<std::size_t>(bin_of[k])].push_back(
        static_cast<double>(intervals.values[k + 1]) / intervals.tau_mean);
  }
  for (const auto& s : out.successors)
    out.pair_count.push_back(static_cast<std::int64_t>(s.size()));
  for (const auto& s : out.successors) {
    if (s.empty())
      throw Error(errc::insufficient_data, "a tau0 bin has no successor intervals");
    out.successor_pdf.push_back(log_binned_pdf(std::span<const double>(s), bins_per_decade));
  }
  return out;
}

ConditionalMeanCurve mean_conditional_interval(const IntervalSeries& intervals, int bins) {
  if (bins < 2) throw Error(errc::invalid_config, "need at least 2 bins");
  require_pairs(intervals, bins);

  const std::vector<int> bin_of = quantile_bins(intervals.values, bins);
  std::vector<double> tau0_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<double> succ_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<std::int64_t> count(static_cast<std::size_t>(bins), 0);
  for (std::size_t k = 0; k + 1 < intervals.values.size(); ++k) {
    const auto b = static_cast<std::size_t>(bin_of[k]);
    tau0_sum[b] += static_cast<double>(intervals.values[k]);
    succ_sum[b] += static_cast<double>(intervals.values[k + 1]);
    ++count[b];
  }

  ConditionalMeanCurve curve;
  curve.bins = bins;
  for (std::size_t b = 0; b < static_cast<std::size_t>(bins); ++b) {
    if (count[b] == 0)
      throw Error(errc::insufficient_data, "a tau0 bin has no successor intervals");
    const double c = static_cast<double>(count[b]);
    curve.tau0_center.push_back(tau0_sum[b] / c / intervals.tau_mean);
    curve.mean.push_back(succ_sum[b] / c / intervals.tau_mean);
    curve.count.push_back(count[b]);
  }
  return curve;
}

std::pair<ClusterCurve, ClusterCurve> cluster_conditional_mean(
    const IntervalSeries& intervals, int n_max, std::int64_t min_count) {
  const std::vector<std::int64_t>& tau = intervals.values;
  if (tau.size() < 50)
    throw Error(errc::insufficient_data,
                std::to_string(tau.size()) + " intervals; need >= 50",
                static_cast<std::int64_t>(tau.size()));
  if (n_max < 1) throw Error(errc::invalid_config, "n_max must be positive");

  std::vector<std::int64_t> sorted(tau);
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median = (m % 2 == 1)
                            ? static_cast<double>(sorted[m / 2])
                            : 0.5 * static_cast<double>(sorted[m / 2 - 1] + sorted[m / 2]);

  // side: +1 above the median, -1 at or below it (ties go to "-")
  auto side = [&](std::int64_t v) { return static_cast<double>(v) > median ? +1 : -1; };

  // accumulate the interval following the terminal n-window of each maximal
  // run, for every n up to min(run length, n_max)
  struct Acc {
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t count = 0;
  };
  std::vector<Acc> plus(static_cast<std::size_t>(n_max));
  std::vector<Acc> minus(static_cast<std::size_t>(n_max));

  std::size_t i = 0;
  while (i < tau.size()) {
    const int s = side(tau[i]);
    std::size_t j = i;
    while (j + 1 < tau.size() && side(tau[j + 1]) == s) ++j;
    const std::size_t run_len = j - i + 1;
    if (j + 1 < tau.size()) {
      const double follower = static_cast<double>(tau[j + 1]) / intervals.tau_mean;
      auto& curves = (s > 0) ? plus : minus;
      const std::size_t top = std::min<std::size_t>(run_len, static_cast<std::size_t>(n_max));
      for (std::size_t n = 1; n <= top; ++n) {
        Acc& a = curves[n - 1];
        a.sum += follower;
        a.sum_sq += follower * follower;
        ++a.count;
      }
    }
    i = j + 1;
  }

  auto build = [&](const std::vector<Acc>& acc, int sign) {
    ClusterCurve curve;
    curve.sign = sign;
    for (std::size_t n = 0; n < acc.size(); ++n) {
      if (acc[n].count < min_count) continue;
      const double c = static_cast<double>(acc[n].count);
      const double mean = acc[n].sum / c;
      const double var = std::max(0.0, acc[n].sum_sq / c - mean * mean);
      curve.size.push_back(static_cast<int>(n + 1));
      curve.mean.push_back(mean);
      curve.stderr_mean.push_back(std::sqrt(var / c));
      curve.count.push_back(acc[n].count);
    }
    return curve;
  };
  return {build(plus, +1), build(minus, -1)};
}

DfaResult dfa(std::span<const double> series, std::span<const std::int64_t> window_sizes) {
  const std::int64_t n = static_cast<std::int64_t>(series.size());
  for (std::int64_t l : window_sizes) {
    if (l < 4 || l * 4 > n)
      throw Error(errc::invalid_window,
                  "window " + std::to_string(l) + " outside [4, N/4] for N=" + std::to_string(n),
                  l);
  }

  // zero-anchored profile: N+1 points, first and last exactly zero
  double mean = 0.0;
  for (double x : series) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> profile(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::int64_t t = 0; t < n; ++t)
    profile[static_cast<std::size_t>(t) + 1] =
        profile[static_cast<std::size_t>(t)] + (series[static_cast<std::size_t>(t)] - mean);

  DfaResult out;
  for (std::int64_t l : window_sizes) {
    const std::int64_t segments = n / l;
    const double dl = static_cast<double>(l);
    const double t_mean = (dl - 1.0) / 2.0;
    const double sxx = dl * (dl * dl - 1.0) / 12.0;

    double sse = 0.0;
    auto window_sse = [&](const double* w) {
      double sy = 0.0, sty = 0.0;
      for (std::int64_t t = 0; t < l; ++t) {
        sy += w[t];
        sty += (static_cast<double>(t) - t_mean) * w[t];
      }
      const double ym = sy / dl;
      const double slope = sty / sxx;
      double acc = 0.0;
      for (std::int64_t t = 0; t < l; ++t) {
        const double r = w[t] - ym - slope * (static_cast<double>(t) - t_mean);
        acc += r * r;
      }
      return acc;
    };

    for (std::int64_t seg = 0; seg < segments; ++seg) {
      sse += window_sse(profile.data() + seg * l);                    // head of P[0..N-1]
      sse += window_sse(profile.data() + (n - (seg + 1) * l + 1));    // tail of P[1..N]
    }
    out.window.push_back(l);
    out.fluctuation.push_back(std::sqrt(sse / static_cast<double>(2 * segments * l)));
  }
  return out;
}

std::vector<std::int64_t> log_spaced_windows(std::int64_t l_min, std::int64_t l_max,
                                             int count) {
  if (l_min < 4 || l_max < l_min || count < 2)
    throw Error(errc::invalid_window, "bad window-size specification");
  std::vector<std::int64_t> out;
  const double a = std::log(static_cast<double>(l_min));
  const double b = std::log(static_cast<double>(l_max));
  for (int k = 0; k < count; ++k) {
    const double x = a + (b - a) * static_cast<double>(k) / static_cast<double>(count - 1);
    const auto l = static_cast<std::int64_t>(std::llround(std::exp(x)));
    if (out.empty() || l > out.back()) out.push_back(l);
  }
  return out;
}

namespace {

HurstFit fit_subset(const DfaResult& result, std::int64_t lo, std::int64_t hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < result.window.size(); ++i) {
    if (result.window[i] <= lo || result.window[i] >= hi) continue;
    if (!(result.fluctuation[i] > 0.0)) continue;
    x.push_back(std::log(static_cast<double>(result.window[i])));
    y.push_back(std::log(result.fluctuation[i]));
  }
  if (x.size() < 4)
    throw Error(errc::insufficient_scales,
                std::to_string(x.size()) + " usable scales; need >= 4",
                static_cast<std::int64_t>(x.size()));
  const SlopeFit fit = log_log_slope(x, y);
  return {fit.slope, fit.stderr_slope, fit.points};
}

}  // namespace

HurstFit hurst_exponent(const DfaResult& result) {
  return fit_subset(result, 0, std::numeric_limits<std::int64_t>::max());
}

HurstCrossover hurst_crossover(const DfaResult& result, std::int64_t split) {
  HurstCrossover out;
  out.small = fit_subset(result, 0, split);
  out.large = fit_subset(result, split, std::numeric_limits<std::int64_t>::max());
  return out;
}

}  // namespace retint
