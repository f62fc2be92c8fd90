#include "retint/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "retint/errors.hpp"

namespace retint {

namespace {

std::string trimmed(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

PriceSeries parse_minute_bars(std::istream& in, const GridSpec& grid,
                              const std::string& symbol) {
  if (grid.slots < 2) throw Error(errc::invalid_config, "grid must have at least 2 slots");

  std::map<std::string, std::map<int, double>> by_day;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string rec = trimmed(line);
    if (rec.empty() || rec[0] == '#') continue;

    std::istringstream fields(rec);
    std::string date, slot_text, price_text;
    if (!std::getline(fields, date, ',') || !std::getline(fields, slot_text, ',') ||
        !std::getline(fields, price_text, ',')) {
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": expected date,minute_index,price");
    }
    date = trimmed(date);
    if (date.empty())
      throw Error(errc::malformed_record, "line " + std::to_string(line_no) + ": empty date");

    int slot = 0;
    double price = 0.0;
    try {
      std::size_t used = 0;
      slot = std::stoi(trimmed(slot_text), &used);
      price = std::stod(trimmed(price_text));
    } catch (const std::exception&) {
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": unparseable fields '" + rec + "'");
    }
    if (!(price > 0.0) || !std::isfinite(price))
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": price must be positive and finite");
    if (slot < 0 || slot >= grid.slots)
      throw Error(errc::off_grid_record,
                  "line " + std::to_string(line_no) + ": minute index " + std::to_string(slot) +
                      " outside [0," + std::to_string(grid.slots) + ")",
                  slot);

    auto [it, inserted] = by_day[date].emplace(slot, price);
    if (!inserted)
      throw Error(errc::duplicate_slot,
                  date + " slot " + std::to_string(slot) + " appears twice", slot);
  }

  PriceSeries out;
  out.symbol = symbol;
  out.grid_slots = grid.slots;
  out.days.reserve(by_day.size());
  for (auto& [date, ticks] : by_day) {
    TradingDay day;
    day.date = date;
    day.slot.reserve(ticks.size());
    day.price.reserve(ticks.size());
    for (auto& [s, p] : ticks) {
      day.slot.push_back(s);
      day.price.push_back(p);
    }
    out.days.push_back(std::move(day));
  }
  return out;
}

PriceSeries parse_minute_bars_file(const std::string& path, const GridSpec& grid,
                                   const std::string& symbol) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_failure, "cannot open '" + path + "'");
  return parse_minute_bars(in, grid, symbol);
}

VolatilitySeries compute_volatility(const PriceSeries& prices) {
  VolatilitySeries out;
  out.symbol = prices.symbol;
  out.grid_slots = prices.grid_slots;
  for (const TradingDay& day : prices.days) {
    if (day.slot.size() < 2) {
      out.warnings.push_back("DegenerateDay: " + day.date + " has fewer than 2 prices; skipped");
      ++out.skipped_days;
      continue;
    }
    DayVolatility dv;
    dv.date = day.date;
    for (std::size_t i = 1; i < day.slot.size(); ++i) {
      if (day.slot[i] != day.slot[i - 1] + 1) continue;  // gap: no value at this slot
      dv.slot.push_back(day.slot[i]);
      dv.value.push_back(std::fabs(std::log(day.price[i]) - std::log(day.price[i - 1])));
    }
    out.days.push_back(std::move(dv));
  }
  return out;
}

IntradayPattern intraday_pattern(const VolatilitySeries& vol) {
  IntradayPattern pattern;
  pattern.value.assign(static_cast<std::size_t>(vol.grid_slots), 0.0);
  pattern.day_count.assign(static_cast<std::size_t>(vol.grid_slots), 0);
  pattern.days_used = static_cast<std::int64_t>(vol.days.size());

  for (const DayVolatility& day : vol.days) {
    for (std::size_t i = 0; i < day.slot.size(); ++i) {
      pattern.value[static_cast<std::size_t>(day.slot[i])] += day.value[i];
      ++pattern.day_count[static_cast<std::size_t>(day.slot[i])];
    }
  }
  bool any = false;
  for (std::size_t s = 0; s < pattern.value.size(); ++s) {
    if (pattern.day_count[s] > 0) {
      pattern.value[s] /= static_cast<double>(pattern.day_count[s]);
      any = true;
    }
  }
  if (!any) throw Error(errc::empty_series, "no slot has any volatility value");
  return pattern;
}

VolatilitySeries deseasonalize(const VolatilitySeries& vol, const IntradayPattern& pattern,
                               std::int64_t* dropped) {
  if (pattern.value.size() != static_cast<std::size_t>(vol.grid_slots))
    throw Error(errc::grid_mismatch,
                "pattern has " + std::to_string(pattern.value.size()) + " slots, series has " +
                    std::to_string(vol.grid_slots));

  VolatilitySeries out;
  out.symbol = vol.symbol;
  out.grid_slots = vol.grid_slots;
  out.warnings = vol.warnings;
  out.skipped_days = vol.skipped_days;
  std::int64_t drop_count = 0;
  for (const DayVolatility& day : vol.days) {
    DayVolatility dv;
    dv.date = day.date;
    for (std::size_t i = 0; i < day.slot.size(); ++i) {
      auto s = static_cast<std::size_t>(day.slot[i]);
      if (pattern.day_count[s] == 0 || pattern.value[s] == 0.0) {
        ++drop_count;
        continue;
      }
      dv.slot.push_back(day.slot[i]);
      dv.value.push_back(day.value[i] / pattern.value[s]);
    }
    out.days.push_back(std::move(dv));
  }
  if (dropped) *dropped = drop_count;
  return out;
}

namespace {

// Population std exactly as the normalization formula is written:
// sqrt(<x^2> - <x>^2), computed in two passes for accuracy.
double population_std(const std::vector<double>& v) {
  double mean = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

NormalizedVolatilitySeries normalize_impl(
    std::vector<double> flat, std::vector<std::pair<std::int32_t, std::int32_t>> origin,
    const std::string& symbol) {
  if (flat.size() < 2)
    throw Error(errc::degenerate_variance, "need at least 2 values to normalize",
                static_cast<std::int64_t>(flat.size()));
  double sd = population_std(flat);
  if (!(sd > 0.0))
    throw Error(errc::degenerate_variance, "series has zero variance");
  for (double& x : flat) x /= sd;

  NormalizedVolatilitySeries out;
  out.symbol = symbol;
  out.r = std::move(flat);
  out.origin = std::move(origin);
  return out;
}

}  // namespace

NormalizedVolatilitySeries normalize(const VolatilitySeries& vol) {
  std::vector<double> flat;
  std::vector<std::pair<std::int32_t, std::int32_t>> origin;
  for (std::size_t d = 0; d < vol.days.size(); ++d) {
    const DayVolatility& day = vol.days[d];
    for (std::size_t i = 0; i < day.slot.size(); ++i) {
      flat.push_back(day.value[i]);
      origin.emplace_back(static_cast<std::int32_t>(d), day.slot[i]);
    }
  }
  auto out = normalize_impl(std::move(flat), std::move(origin), vol.symbol);
  out.warnings = vol.warnings;
  out.skipped_days = vol.skipped_days;
  return out;
}

NormalizedVolatilitySeries normalize_flat(std::vector<double> values,
                                          const std::string& symbol) {
  std::vector<std::pair<std::int32_t, std::int32_t>> origin;
  origin.reserve(values.size());
  for (std::size_t t = 0; t < values.size(); ++t)
    origin.emplace_back(0, static_cast<std::int32_t>(t));
  return normalize_impl(std::move(values), std::move(origin), symbol);
}

NormalizedVolatilitySeries preprocess(const PriceSeries& prices) {
  VolatilitySeries vol = compute_volatility(prices);
  IntradayPattern pattern = intraday_pattern(vol);
  std::int64_t dropped = 0;
  VolatilitySeries flat = deseasonalize(vol, pattern, &dropped);
  NormalizedVolatilitySeries out = normalize(flat);
  out.dropped_zero_pattern = dropped;

  std::int64_t present = 0;
  for (const TradingDay& day : prices.days) present += static_cast<std::int64_t>(day.slot.size());
  out.missing_price_slots =
      static_cast<std::int64_t>(prices.days.size()) * prices.grid_slots - present;
  return out;
}

}  // namespace retint
