#include "retint/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "retint/errors.hpp"
#include "retint/seeding.hpp"
#include "retint/surrogate.hpp"

namespace retint {

namespace {

std::string symbol_from_path(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

double parse_double_field(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(errc::invalid_config, "surrogate field " + key + "='" + value + "'");
  }
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string format_q(double q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", q);
  return buf;
}

}  // namespace

SurrogateInput parse_surrogate_spec(const std::string& spec) {
  SurrogateInput out;
  std::string token;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    token = spec.substr(pos, comma - pos);
    pos = comma + 1;
    if (token.empty()) continue;
    if (first) {
      out.name = token;
      first = false;
      continue;
    }
    std::size_t eq = token.find('=');
    if (eq == std::string::npos)
      throw Error(errc::invalid_config, "surrogate spec token '" + token + "' is not key=value");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (key == "H") {
      out.hurst = parse_double_field(key, value);
    } else if (key == "nu") {
      out.tail_exponent = parse_double_field(key, value);
    } else if (key == "n") {
      out.length = static_cast<std::size_t>(parse_double_field(key, value));
    } else {
      throw Error(errc::invalid_config, "unknown surrogate field '" + key + "'");
    }
  }
  if (out.name.empty())
    throw Error(errc::invalid_config, "surrogate spec needs a leading name");
  return out;
}

namespace {

std::string config_trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    std::size_t comma = value.find(',', pos);
    if (comma == std::string::npos) comma = value.size();
    const std::string token = config_trim(value.substr(pos, comma - pos));
    pos = comma + 1;
    if (token.empty()) continue;
    out.push_back(parse_double_field(key, token));
  }
  if (out.empty()) throw Error(errc::invalid_config, key + " list is empty");
  return out;
}

std::int64_t parse_int_field(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw Error(errc::invalid_config, "field " + key + "='" + value + "' is not an integer");
  }
}

}  // namespace

RunConfig parse_run_config(std::istream& in) {
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = config_trim(line);
    if (text.empty() || text[0] == '#') continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw Error(errc::invalid_config,
                  "config line " + std::to_string(line_no) + " is not key=value");
    const std::string key = config_trim(text.substr(0, eq));
    const std::string value = config_trim(text.substr(eq + 1));

    if (key == "input") {
      config.inputs.push_back(value);
    } else if (key == "surrogate") {
      config.surrogates.push_back(parse_surrogate_spec(value));
    } else if (key == "grid") {
      config.grid_slots = static_cast<int>(parse_int_field(key, value));
    } else if (key == "q") {
      config.thresholds = parse_double_list(key, value);
    } else if (key == "levels") {
      config.levels = parse_double_list(key, value);
    } else if (key == "bootstrap") {
      config.bootstrap_replicas = static_cast<int>(parse_int_field(key, value));
    } else if (key == "bins_per_decade") {
      config.bins_per_decade = static_cast<int>(parse_int_field(key, value));
    } else if (key == "dfa_lmin") {
      config.dfa_l_min = parse_int_field(key, value);
    } else if (key == "dfa_lmax") {
      config.dfa_l_max = parse_int_field(key, value);
    } else if (key == "dfa_nl") {
      config.dfa_window_count = static_cast<int>(parse_int_field(key, value));
    } else if (key == "dfa_split") {
      config.dfa_split = parse_int_field(key, value);
    } else if (key == "cluster_nmax") {
      config.cluster_n_max = static_cast<int>(parse_int_field(key, value));
    } else if (key == "seed") {
      config.seed = static_cast<std::uint64_t>(parse_int_field(key, value));
    } else if (key == "out") {
      config.out_dir = value;
    } else if (key == "workers") {
      config.workers = static_cast<int>(parse_int_field(key, value));
    } else {
      throw Error(errc::invalid_config,
                  "unknown config key '" + key + "' on line " + std::to_string(line_no));
    }
  }
  return config;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::invalid_config, "cannot open config file '" + path + "'");
  return parse_run_config(in);
}

void RunConfig::validate() const {
  if (inputs.empty() && surrogates.empty())
    throw Error(errc::invalid_config, "no inputs or surrogates configured");
  if (grid_slots < 2) throw Error(errc::invalid_config, "grid_slots must be >= 2");
  if (thresholds.empty()) throw Error(errc::invalid_config, "threshold list is empty");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0))
      throw Error(errc::invalid_config, "thresholds must be positive");
    if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
      throw Error(errc::invalid_config, "thresholds must be strictly increasing");
  }
  if (levels.empty()) throw Error(errc::invalid_config, "significance level list is empty");
  for (double level : levels)
    if (!(level > 0.0 && level < 1.0))
      throw Error(errc::invalid_config, "significance levels must lie in (0,1)");
  if (bootstrap_replicas < 100)
    throw Error(errc::invalid_config, "bootstrap_replicas must be >= 100");
  if (bins_per_decade < 2)
    throw Error(errc::invalid_config, "bins_per_decade must be >= 2");
  if (dfa_l_min < 4) throw Error(errc::invalid_config, "dfa_l_min must be >= 4");
  if (dfa_window_count < 2)
    throw Error(errc::invalid_config, "dfa_window_count must be >= 2");
  if (cluster_n_max < 1) throw Error(errc::invalid_config, "cluster_n_max must be >= 1");
  if (workers < 1) throw Error(errc::invalid_config, "workers must be >= 1");
}

bool ReportBundle::has_errors() const {
  for (const SymbolReport& s : symbols)
    if (!s.errors.empty()) return true;
  return false;
}

namespace {

struct Source {
  std::string symbol;
  std::string path;  // empty for surrogates
  const SurrogateInput* surrogate = nullptr;
};

SymbolReport analyze_symbol(const Source& source, const RunConfig& config) {
  SymbolReport report;
  report.symbol = source.symbol;
  const std::uint64_t symbol_seed = mix_seed(config.seed, stable_hash(source.symbol));

  NormalizedVolatilitySeries series;
  try {
    if (source.surrogate) {
      series = long_memory_volatility(source.surrogate->hurst,
                                      source.surrogate->tail_exponent,
                                      source.surrogate->length, symbol_seed);
      series.symbol = source.symbol;
    } else {
      PriceSeries prices =
          parse_minute_bars_file(source.path, GridSpec{config.grid_slots}, source.symbol);
      series = preprocess(prices);
    }
  } catch (const std::exception& e) {
    report.errors["load"] = e.what();
    return report;
  }
  report.diagnostics.series_length = static_cast<std::int64_t>(series.r.size());
  report.diagnostics.missing_price_slots = series.missing_price_slots;
  report.diagnostics.dropped_zero_pattern = series.dropped_zero_pattern;
  report.diagnostics.skipped_days = series.skipped_days;

  std::map<double, IntervalSeries> by_q;
  for (double q : config.thresholds) {
    try {
      IntervalSeries iv = extract_intervals(series, q);
      report.intervals.push_back(
          {q, static_cast<std::int64_t>(iv.values.size()), iv.tau_mean});
      by_q.emplace(q, std::move(iv));
    } catch (const std::exception& e) {
      report.errors["intervals q=" + format_q(q)] = e.what();
    }
  }

  const bool has_pair = by_q.count(2.0) && by_q.count(5.0);
  const bool wants_pair =
      std::count(config.thresholds.begin(), config.thresholds.end(), 2.0) &&
      std::count(config.thresholds.begin(), config.thresholds.end(), 5.0);
  if (!wants_pair) {
    report.errors["scaling"] =
        std::string(errc_name(errc::incomplete_input)) +
        ": scaling test needs thresholds 2 and 5 in the configuration";
  } else if (!has_pair) {
    report.errors["scaling"] = "missing interval series for q=2 or q=5";
  } else {
    try {
      report.scaling =
          ks_two_sample(scale(by_q.at(2.0)), scale(by_q.at(5.0)), config.levels.front());
    } catch (const std::exception& e) {
      report.errors["scaling"] = e.what();
    }
  }

  std::vector<ScaledIntervals> pool;
  for (const auto& [q, iv] : by_q) pool.push_back(scale(iv));
  try {
    report.fit = fit_stretched_exponential(pool, FitOptions{config.bins_per_decade, 5, 2.0});
  } catch (const std::exception& e) {
    report.errors["fit"] = e.what();
  }

  if (report.fit) {
    GofReport gof;
    gof.replicas = config.bootstrap_replicas;
    int q_index = 0;
    for (double q : {2.0, 5.0}) {
      ++q_index;
      auto it = by_q.find(q);
      if (it == by_q.end()) {
        report.errors["gof q=" + format_q(q)] = "missing interval series";
        continue;
      }
      try {
        ScaledIntervals scaled = scale(it->second);
        gof.entries.push_back(bootstrap_gof(*report.fit, scaled.values, q,
                                            config.bootstrap_replicas,
                                            mix_seed(symbol_seed, 0x676f66u + q_index)));
      } catch (const std::exception& e) {
        report.errors["gof q=" + format_q(q)] = e.what();
      }
    }
    if (!gof.entries.empty()) report.gof = std::move(gof);
  }

  auto q2 = by_q.find(2.0);
  if (q2 != by_q.end()) {
    const IntervalSeries& iv = q2->second;
    try {
      ConditionalMeanCurve curve = mean_conditional_interval(iv, 8);
      for (std::size_t i = 0; i < curve.mean.size(); ++i)
        report.conditional_mean.push_back(
            {curve.tau0_center[i], curve.mean[i], curve.count[i]});
    } catch (const std::exception& e) {
      report.errors["conditional_mean"] = e.what();
    }
    try {
      auto [plus, minus] = cluster_conditional_mean(iv, config.cluster_n_max);
      for (std::size_t i = 0; i < plus.size.size(); ++i)
        report.cluster_plus.push_back(
            {static_cast<double>(plus.size[i]), plus.mean[i], plus.count[i]});
      for (std::size_t i = 0; i < minus.size.size(); ++i)
        report.cluster_minus.push_back(
            {static_cast<double>(minus.size[i]), minus.mean[i], minus.count[i]});
    } catch (const std::exception& e) {
      report.errors["clusters"] = e.what();
    }
    try {
      const auto n = static_cast<std::int64_t>(iv.values.size());
      const std::int64_t l_max = config.dfa_l_max > 0 ? config.dfa_l_max : n / 4;
      std::vector<double> as_double(iv.values.begin(), iv.values.end());
      DfaResult d = dfa(as_double,
                        log_spaced_windows(config.dfa_l_min, l_max, config.dfa_window_count));
      HurstCrossover cross = hurst_crossover(d, config.dfa_split);
      report.hurst = HurstSummary{cross.small.exponent, cross.large.exponent,
                                  cross.small.stderr_exponent, cross.large.stderr_exponent};
    } catch (const std::exception& e) {
      report.errors["dfa"] = e.what();
    }
  } else {
    report.errors["memory"] = "missing interval series for q=2";
  }

  return report;
}

}  // namespace

ReportBundle run_pipeline(const RunConfig& config) {
  config.validate();

  std::vector<Source> sources;
  for (const std::string& path : config.inputs)
    sources.push_back({symbol_from_path(path), path, nullptr});
  for (const SurrogateInput& s : config.surrogates) sources.push_back({s.name, "", &s});
  std::sort(sources.begin(), sources.end(),
            [](const Source& a, const Source& b) { return a.symbol < b.symbol; });
  std::set<std::string> seen;
  for (const Source& s : sources)
    if (!seen.insert(s.symbol).second)
      throw Error(errc::invalid_config, "duplicate symbol '" + s.symbol + "'");

  ReportBundle bundle;
  bundle.config = config;
  bundle.symbols.resize(sources.size());

  const int workers = std::min<int>(config.workers, static_cast<int>(sources.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < sources.size(); ++i)
      bundle.symbols[i] = analyze_symbol(sources[i], config);
  } else {
    std::atomic<std::size_t> next{0};
    auto drain = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= sources.size()) return;
        bundle.symbols[i] = analyze_symbol(sources[i], config);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
  }
  return bundle;
}

RenderedTables render_tables(const ReportBundle& bundle) {
  RenderedTables tables;
  tables.scaling_csv = "symbol,KS,CV,scaling\n";
  tables.gof_csv = "symbol,q,p_KS,p_KSW\n";
  for (const SymbolReport& s : bundle.symbols) {
    if (s.scaling) {
      tables.scaling_csv += s.symbol + "," + format_fixed(s.scaling->statistic, 4) + "," +
                            format_fixed(s.scaling->critical_value, 4) + "," +
                            (s.scaling->accept ? "Yes" : "No") + "\n";
    }
    if (s.gof) {
      for (const GofEntry& e : s.gof->entries) {
        tables.gof_csv += s.symbol + "," + format_q(e.q) + "," + format_fixed(e.p_ks, 4) +
                          "," + format_fixed(e.p_ksw, 4) + "\n";
      }
    }
  }
  return tables;
}

void write_report_files(const ReportBundle& bundle) {
  namespace fs = std::filesystem;
  fs::path dir(bundle.config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(errc::io_failure, "cannot create '" + dir.string() + "'");

  auto write = [&](const fs::path& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(errc::io_failure, "cannot write '" + (dir / name).string() + "'");
    out << text;
  };
  write("report.json", report_to_json(bundle));
  const RenderedTables tables = render_tables(bundle);
  write("table1.csv", tables.scaling_csv);
  write("table2.csv", tables.gof_csv);
}

}  // namespace retint
