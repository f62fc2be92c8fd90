#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace retint {

// Intraday grid: S minute slots per trading day, indexed 0..S-1. Sessions
// separated by a midday break are declared as one contiguous grid by the
// caller, so the first post-break return pairs with the last pre-break price.
struct GridSpec {
  int slots = 240;
};

struct TradingDay {
  std::string date;           // ISO yyyy-mm-dd; lexicographic order == chronological
  std::vector<int> slot;      // strictly increasing, in [0, S)
  std::vector<double> price;  // > 0, finite

  bool operator==(const TradingDay&) const = default;
};

struct PriceSeries {
  std::string symbol;
  int grid_slots = 0;
  std::vector<TradingDay> days;

  bool operator==(const PriceSeries&) const = default;
};

struct DayVolatility {
  std::string date;
  std::vector<int> slot;      // slot of the later price of each pair
  std::vector<double> value;  // |ln Y(s) - ln Y(s-1)|, >= 0
};

struct VolatilitySeries {
  std::string symbol;
  int grid_slots = 0;
  std::vector<DayVolatility> days;
  std::vector<std::string> warnings;  // e.g. skipped degenerate days
  std::int64_t skipped_days = 0;
};

struct IntradayPattern {
  std::vector<double> value;       // A(s); slot s absent when day_count[s] == 0
  std::vector<std::int64_t> day_count;
  std::int64_t days_used = 0;
};

// Flat deseasonalized, unit-std volatility sequence r(t) with a back-map
// from compacted time t to (day index, slot).
struct NormalizedVolatilitySeries {
  std::string symbol;
  std::vector<double> r;
  std::vector<std::pair<std::int32_t, std::int32_t>> origin;  // (day, slot)
  std::int64_t missing_price_slots = 0;
  std::int64_t dropped_zero_pattern = 0;
  std::int64_t skipped_days = 0;
  std::vector<std::string> warnings;
};

// Parses `date,minute_index,price` records (one per line; blank lines and
// `#` comments ignored). Output days are sorted by date, slots ascending,
// so record order does not matter.
PriceSeries parse_minute_bars(std::istream& in, const GridSpec& grid,
                              const std::string& symbol);
PriceSeries parse_minute_bars_file(const std::string& path, const GridSpec& grid,
                                   const std::string& symbol);

// One-minute absolute log returns per day. Never spans a day boundary; a
// slot without a price at the immediately preceding slot yields no value.
// Days with fewer than two prices are skipped with a warning.
VolatilitySeries compute_volatility(const PriceSeries& prices);

// A(s): per-slot mean over the days that have a value at s.
IntradayPattern intraday_pattern(const VolatilitySeries& vol);

// R'(t) = R(t)/A(s). Slots with A(s) == 0 (or absent) are dropped and counted.
VolatilitySeries deseasonalize(const VolatilitySeries& vol, const IntradayPattern& pattern,
                               std::int64_t* dropped = nullptr);

// Divides by the population standard deviation sqrt(<R'^2> - <R'>^2) and
// concatenates days into one flat sequence.
NormalizedVolatilitySeries normalize(const VolatilitySeries& vol);

// Same normalization for a day-less flat sequence (surrogates, tests).
NormalizedVolatilitySeries normalize_flat(std::vector<double> values,
                                          const std::string& symbol);

// Full chain: volatility -> intraday pattern -> deseasonalize -> normalize.
NormalizedVolatilitySeries preprocess(const PriceSeries& prices);

}  // namespace retint
