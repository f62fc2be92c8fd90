#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "retint/ingest.hpp"

namespace retint {

// Return intervals between successive exceedances r(t) > q, counted in
// compacted time. The head before the first exceedance and the tail after
// the last are not intervals.
struct IntervalSeries {
  double threshold = 0.0;             // q, in units of std
  std::vector<std::int64_t> values;   // each >= 1
  double tau_mean = 0.0;              // mean interval
  std::int64_t source_length = 0;     // T
  std::int64_t exceedance_count = 0;  // |E|
  std::int64_t first_exceedance = -1;
  std::int64_t last_exceedance = -1;
};

struct ScaledIntervals {
  double threshold = 0.0;
  std::vector<double> values;  // tau / tau_mean; sample mean 1
};

// Strict inequality r(t) > q. Throws too_few_exceedances (detail = |E|)
// when fewer than two exceedances exist.
IntervalSeries extract_intervals(std::span<const double> r, double threshold);
IntervalSeries extract_intervals(const NormalizedVolatilitySeries& series, double threshold);

ScaledIntervals scale(const IntervalSeries& intervals);

}  // namespace retint
