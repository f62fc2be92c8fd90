#include "retint/intervals.hpp"

#include <string>

#include "retint/errors.hpp"

namespace retint {

IntervalSeries extract_intervals(std::span<const double> r, double threshold) {
  if (!(threshold > 0.0)) throw Error(errc::invalid_config, "threshold must be positive");
  if (r.empty()) throw Error(errc::empty_series, "empty series");

  IntervalSeries out;
  out.threshold = threshold;
  out.source_length = static_cast<std::int64_t>(r.size());

  std::int64_t prev = -1;
  std::int64_t sum = 0;
  for (std::int64_t t = 0; t < out.source_length; ++t) {
    if (!(r[static_cast<std::size_t>(t)] > threshold)) continue;
    ++out.exceedance_count;
    if (prev < 0) {
      out.first_exceedance = t;
    } else {
      out.values.push_back(t - prev);
      sum += t - prev;
    }
    prev = t;
  }
  out.last_exceedance = prev;

  if (out.exceedance_count < 2)
    throw Error(errc::too_few_exceedances,
                std::to_string(out.exceedance_count) + " exceedance(s) at q=" +
                    std::to_string(threshold) + "; need at least 2",
                out.exceedance_count);

  out.tau_mean = static_cast<double>(sum) / static_cast<double>(out.values.size());
  return out;
}

IntervalSeries extract_intervals(const NormalizedVolatilitySeries& series, double threshold) {
  return extract_intervals(std::span<const double>(series.r), threshold);
}

ScaledIntervals scale(const IntervalSeries& intervals) {
  ScaledIntervals out;
  out.threshold = intervals.threshold;
  out.values.reserve(intervals.values.size());
  for (std::int64_t tau : intervals.values)
    out.values.push_back(static_cast<double>(tau) / intervals.tau_mean);
  return out;
}

}  // namespace retint
