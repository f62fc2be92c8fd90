#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "retint/errors.hpp"
#include "retint/ingest.hpp"
#include "retint/intervals.hpp"
#include "retint/memory.hpp"
#include "retint/pipeline.hpp"
#include "retint/scaling.hpp"
#include "retint/seeding.hpp"
#include "retint/surrogate.hpp"

namespace {

using namespace retint;

constexpr int kExitOk = 0;
constexpr int kExitProcessing = 1;
constexpr int kExitConfig = 2;

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string gshort(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_failure, "cannot write '" + path + "'");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  auto out = open_out(path);
  out << text;
}

// Shared source options: minute-bar files and/or surrogate pseudo-symbols.
struct SourceOptions {
  std::vector<std::string> inputs;
  std::vector<std::string> surrogate_specs;
  int grid_slots = 240;
  std::uint64_t seed = 42;

  void attach(CLI::App* cmd) {
    cmd->add_option("--input", inputs, "minute-bar file(s): date,minute_index,price per line");
    cmd->add_option("--surrogate", surrogate_specs,
                    "surrogate pseudo-symbol(s): name,H=0.8,nu=3.5,n=32768");
    cmd->add_option("--grid", grid_slots, "intraday slots per day")->capture_default_str();
    cmd->add_option("--seed", seed, "base RNG seed")->capture_default_str();
  }

  std::vector<NormalizedVolatilitySeries> load() const {
    if (inputs.empty() && surrogate_specs.empty())
      throw Error(errc::invalid_config, "need --input or --surrogate");
    std::vector<NormalizedVolatilitySeries> out;
    for (const std::string& path : inputs) {
      PriceSeries prices = parse_minute_bars_file(
          path, GridSpec{grid_slots}, std::filesystem::path(path).stem().string());
      out.push_back(preprocess(prices));
    }
    for (const std::string& spec_text : surrogate_specs) {
      SurrogateInput spec = parse_surrogate_spec(spec_text);
      auto series =
          long_memory_volatility(spec.hurst, spec.tail_exponent, spec.length,
                                 mix_seed(seed, stable_hash(spec.name)));
      series.symbol = spec.name;
      out.push_back(std::move(series));
    }
    return out;
  }

  NormalizedVolatilitySeries load_one() const {
    auto all = load();
    if (all.size() != 1)
      throw Error(errc::invalid_config, "this subcommand takes exactly one input");
    return std::move(all.front());
  }
};

std::string with_q_suffix(const std::string& path, double q) {
  std::filesystem::path p(path);
  std::filesystem::path out = p.parent_path();
  out /= p.stem().string() + "_q" + gshort(q) + p.extension().string();
  return out.string();
}

std::vector<double> read_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_failure, "cannot open '" + path + "'");
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(std::stod(line));
  }
  return out;
}

// -------- subcommand bodies --------

int run_preprocess(const SourceOptions& sources, const std::string& out_path) {
  NormalizedVolatilitySeries series = sources.load_one();
  std::string text;
  for (std::size_t t = 0; t < series.r.size(); ++t)
    text += std::to_string(t) + "\t" + g17(series.r[t]) + "\n";
  write_text(out_path, text);
  std::cerr << series.symbol << ": " << series.r.size() << " values, "
            << series.missing_price_slots << " missing slots, "
            << series.dropped_zero_pattern << " dropped (zero pattern), "
            << series.skipped_days << " skipped day(s)\n";
  return kExitOk;
}

int run_intervals(const SourceOptions& sources, const std::vector<double>& thresholds,
                  const std::string& out_path) {
  NormalizedVolatilitySeries series = sources.load_one();
  int failures = 0;
  for (double q : thresholds) {
    try {
      IntervalSeries iv = extract_intervals(series, q);
      std::string text = "# q=" + gshort(q) + " tau_mean=" + g17(iv.tau_mean) + "\n";
      for (std::int64_t tau : iv.values) text += std::to_string(tau) + "\n";
      const std::string path =
          (thresholds.size() == 1 || out_path.empty() || out_path == "-")
              ? out_path
              : with_q_suffix(out_path, q);
      write_text(path, text);
    } catch (const Error& e) {
      std::cerr << series.symbol << " q=" << gshort(q) << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? kExitOk : kExitProcessing;
}

int run_scaling_test(const SourceOptions& sources, double significance,
                     const std::string& out_path) {
  std::string csv = "symbol,KS,CV,verdict\n";
  int failures = 0;
  for (const auto& series : sources.load()) {
    try {
      IntervalSeries i2 = extract_intervals(series, 2.0);
      IntervalSeries i5 = extract_intervals(series, 5.0);
      KsReport report = ks_two_sample(scale(i2), scale(i5), significance);
      char row[256];
      std::snprintf(row, sizeof row, "%s,%.4f,%.4f,%s\n", series.symbol.c_str(),
                    report.statistic, report.critical_value, report.accept ? "Yes" : "No");
      csv += row;
    } catch (const Error& e) {
      std::cerr << series.symbol << ": " << e.what() << "\n";
      ++failures;
    }
  }
  write_text(out_path, csv);
  return failures == 0 ? kExitOk : kExitProcessing;
}

int run_fit(const SourceOptions& sources, const std::vector<double>& thresholds,
            int bins_per_decade, const std::string& out_json,
            const std::string& out_curve) {
  NormalizedVolatilitySeries series = sources.load_one();
  std::vector<ScaledIntervals> pool;
  std::vector<double> pooled_values;
  for (double q : thresholds) {
    try {
      pool.push_back(scale(extract_intervals(series, q)));
      pooled_values.insert(pooled_values.end(), pool.back().values.begin(),
                           pool.back().values.end());
    } catch (const Error& e) {
      std::cerr << series.symbol << " q=" << gshort(q) << ": " << e.what() << "\n";
    }
  }
  SeFit fit = fit_stretched_exponential(pool, FitOptions{bins_per_decade, 5, 2.0});

  std::string json_text =
      std::string("{\n") + "  \"symbol\": \"" + series.symbol + "\",\n" +
      "  \"c\": " + g17(fit.c) + ",\n  \"alpha\": " + g17(fit.alpha) +
      ",\n  \"gamma\": " + g17(fit.gamma) +
      ",\n  \"c_normalized\": " + g17(fit.c_normalized) +
      ",\n  \"x_lo\": " + g17(fit.x_lo) + ",\n  \"x_hi\": " + g17(fit.x_hi) +
      ",\n  \"loss\": " + g17(fit.loss) + "\n}\n";
  write_text(out_json, json_text);

  if (!out_curve.empty()) {
    BinnedPdf pdf = log_binned_pdf(std::span<const double>(pooled_values), bins_per_decade);
    std::string tsv = "# x\tdensity\tfit\n";
    for (const auto& bin : pdf.bins) {
      const double model = fit.c * std::exp(-fit.alpha * std::pow(bin.center, fit.gamma));
      tsv += g17(bin.center) + "\t" + g17(bin.density) + "\t" + g17(model) + "\n";
    }
    write_text(out_curve, tsv);
  }
  return kExitOk;
}

int run_gof(const SourceOptions& sources, const std::vector<double>& thresholds,
            int bins_per_decade, int replicas, const std::string& out_path) {
  std::string csv = "symbol,q,p_KS,p_KSW\n";
  int failures = 0;
  for (const auto& series : sources.load()) {
    try {
      std::map<double, ScaledIntervals> scaled;
      std::vector<ScaledIntervals> pool;
      for (double q : thresholds) {
        try {
          scaled.emplace(q, scale(extract_intervals(series, q)));
          pool.push_back(scaled.at(q));
        } catch (const Error&) {
        }
      }
      SeFit fit = fit_stretched_exponential(pool, FitOptions{bins_per_decade, 5, 2.0});
      const std::uint64_t symbol_seed =
          mix_seed(sources.seed, stable_hash(series.symbol));
      int q_index = 0;
      for (double q : {2.0, 5.0}) {
        ++q_index;
        auto it = scaled.find(q);
        if (it == scaled.end()) {
          std::cerr << series.symbol << ": no intervals for q=" << gshort(q) << "\n";
          ++failures;
          continue;
        }
        GofEntry entry = bootstrap_gof(fit, it->second.values, q, replicas,
                                       mix_seed(symbol_seed, 0x676f66u + q_index));
        char row[256];
        std::snprintf(row, sizeof row, "%s,%s,%.4f,%.4f\n", series.symbol.c_str(),
                      gshort(q).c_str(), entry.p_ks, entry.p_ksw);
        csv += row;
      }
    } catch (const Error& e) {
      std::cerr << series.symbol << ": " << e.what() << "\n";
      ++failures;
    }
  }
  write_text(out_path, csv);
  return failures == 0 ? kExitOk : kExitProcessing;
}

int run_memory(const SourceOptions& sources, double q, int n_max,
               const std::string& out_dir) {
  NormalizedVolatilitySeries series = sources.load_one();
  IntervalSeries iv = extract_intervals(series, q);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);

  ConditionalPdf cond = conditional_pdf(iv, 4);
  {
    std::string tsv = "# tau0_bin\tx\tdensity\n";
    for (int b = 0; b < cond.bins; ++b) {
      for (const auto& bin : cond.successor_pdf[static_cast<std::size_t>(b)].bins)
        tsv += std::to_string(b + 1) + "\t" + g17(bin.center) + "\t" + g17(bin.density) + "\n";
    }
    write_text((dir / "conditional_pdf.tsv").string(), tsv);
  }
  {
    ConditionalMeanCurve curve = mean_conditional_interval(iv, 8);
    std::string tsv = "# tau0_center\tmean\tcount\n";
    for (std::size_t i = 0; i < curve.mean.size(); ++i)
      tsv += g17(curve.tau0_center[i]) + "\t" + g17(curve.mean[i]) + "\t" +
             std::to_string(curve.count[i]) + "\n";
    write_text((dir / "conditional_mean.tsv").string(), tsv);
  }
  {
    auto [plus, minus] = cluster_conditional_mean(iv, n_max);
    std::string tsv = "# sign\tn\tmean\tstderr\tcount\n";
    for (const ClusterCurve* curve : {&plus, &minus}) {
      for (std::size_t i = 0; i < curve->size.size(); ++i)
        tsv += std::string(curve->sign > 0 ? "+" : "-") + "\t" +
               std::to_string(curve->size[i]) + "\t" + g17(curve->mean[i]) + "\t" +
               g17(curve->stderr_mean[i]) + "\t" + std::to_string(curve->count[i]) + "\n";
    }
    write_text((dir / "clusters.tsv").string(), tsv);
  }
  std::cerr << series.symbol << ": memory curves written to " << out_dir << "\n";
  return kExitOk;
}

int run_dfa(const std::string& series_file, const SourceOptions& sources, double q,
            std::int64_t l_min, std::int64_t l_max, int window_count, std::int64_t split,
            const std::string& out_tsv, const std::string& out_json) {
  std::vector<double> values;
  if (!series_file.empty()) {
    values = read_value_file(series_file);
  } else {
    IntervalSeries iv = extract_intervals(sources.load_one(), q);
    values.assign(iv.values.begin(), iv.values.end());
  }
  const auto n = static_cast<std::int64_t>(values.size());
  if (l_max <= 0) l_max = n / 4;
  DfaResult result = dfa(values, log_spaced_windows(l_min, l_max, window_count));

  std::string tsv;
  for (std::size_t i = 0; i < result.window.size(); ++i)
    tsv += std::to_string(result.window[i]) + "\t" + g17(result.fluctuation[i]) + "\n";
  write_text(out_tsv, tsv);

  HurstCrossover cross = hurst_crossover(result, split);
  std::string json_text = std::string("{\n") +
                          "  \"H_small\": " + g17(cross.small.exponent) +
                          ",\n  \"H_large\": " + g17(cross.large.exponent) +
                          ",\n  \"stderr_small\": " + g17(cross.small.stderr_exponent) +
                          ",\n  \"stderr_large\": " + g17(cross.large.stderr_exponent) +
                          "\n}\n";
  write_text(out_json, json_text);
  return kExitOk;
}

int run_surrogate(const std::string& kind, double hurst, double nu, double alpha,
                  double gamma, std::size_t n, std::uint64_t seed,
                  const std::string& in_path, const std::string& out_path) {
  std::vector<double> values;
  if (kind == "fgn") {
    values = fgn(hurst, n, seed);
  } else if (kind == "student") {
    values = student_returns(nu, n, seed);
  } else if (kind == "se-intervals") {
    SeFit fit;
    fit.alpha = alpha;
    fit.gamma = gamma;
    fit.c = fit.c_normalized = se_normalization(alpha, gamma);
    fit.c_constrained = true;
    values = sample_se(fit, n, seed);
  } else if (kind == "longmem") {
    values = long_memory_volatility(hurst, nu, n, seed).r;
  } else if (kind == "shuffle") {
    if (in_path.empty())
      throw Error(errc::invalid_config, "shuffle needs --in with a value file");
    values = shuffled(read_value_file(in_path), seed);
  } else {
    throw Error(errc::invalid_config, "unknown kind '" + kind +
                                          "' (fgn|student|se-intervals|longmem|shuffle)");
  }
  std::string text;
  for (double v : values) text += g17(v) + "\n";
  write_text(out_path, text);
  return kExitOk;
}

int run_report(const RunConfig& config) {
  ReportBundle bundle = run_pipeline(config);
  write_report_files(bundle);
  std::cerr << "report written to " << config.out_dir << " (report.json, table1.csv, table2.csv)\n";
  if (bundle.has_errors()) {
    for (const SymbolReport& s : bundle.symbols)
      for (const auto& [stage, message] : s.errors)
        std::cerr << s.symbol << " [" << stage << "]: " << message << "\n";
    return kExitProcessing;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"volatility return-interval analysis toolkit"};
  app.require_subcommand(1);

  SourceOptions pre_sources;
  std::string pre_out = "-";
  CLI::App* pre = app.add_subcommand("preprocess", "normalize volatility; dump r(t) TSV");
  pre_sources.attach(pre);
  pre->add_option("--out", pre_out, "output TSV path ('-' = stdout)");

  SourceOptions iv_sources;
  std::vector<double> iv_q = {2, 3, 4, 5};
  std::string iv_out = "-";
  CLI::App* ivc = app.add_subcommand("intervals", "extract return intervals");
  iv_sources.attach(ivc);
  ivc->add_option("--q", iv_q, "threshold list")->delimiter(',')->capture_default_str();
  ivc->add_option("--out", iv_out, "output TSV path (suffixed per q when several)");

  SourceOptions st_sources;
  double st_significance = 0.05;
  std::string st_out = "-";
  CLI::App* st = app.add_subcommand("scaling-test", "two-sample KS of q=2 vs q=5");
  st_sources.attach(st);
  st->add_option("--significance", st_significance)->capture_default_str();
  st->add_option("--out", st_out, "output CSV path");

  SourceOptions fit_sources;
  std::vector<double> fit_q = {2, 3, 4, 5};
  int fit_bpd = 10;
  std::string fit_json = "-", fit_curve;
  CLI::App* fit = app.add_subcommand("fit", "stretched-exponential fit of pooled intervals");
  fit_sources.attach(fit);
  fit->add_option("--q", fit_q, "thresholds to pool")->delimiter(',')->capture_default_str();
  fit->add_option("--bins-per-decade", fit_bpd)->capture_default_str();
  fit->add_option("--out", fit_json, "fit parameters JSON path");
  fit->add_option("--out-curve", fit_curve, "binned PDF + fitted curve TSV path");

  SourceOptions gof_sources;
  std::vector<double> gof_q = {2, 3, 4, 5};
  int gof_bpd = 10, gof_replicas = 1000;
  std::string gof_out = "-";
  CLI::App* gof = app.add_subcommand("gof", "bootstrap goodness-of-fit p-values");
  gof_sources.attach(gof);
  gof->add_option("--q", gof_q, "thresholds to pool for the fit")
      ->delimiter(',')
      ->capture_default_str();
  gof->add_option("--bins-per-decade", gof_bpd)->capture_default_str();
  gof->add_option("--B", gof_replicas, "bootstrap replicas")->capture_default_str();
  gof->add_option("--out", gof_out, "output CSV path");

  SourceOptions mem_sources;
  double mem_q = 2.0;
  int mem_nmax = 10;
  std::string mem_dir = ".";
  CLI::App* mem = app.add_subcommand("memory", "conditional and cluster diagnostics");
  mem_sources.attach(mem);
  mem->add_option("--q", mem_q, "threshold")->capture_default_str();
  mem->add_option("--n-max", mem_nmax, "largest cluster size")->capture_default_str();
  mem->add_option("--out-dir", mem_dir)->capture_default_str();

  SourceOptions dfa_sources;
  std::string dfa_file;
  double dfa_q = 2.0;
  std::int64_t dfa_lmin = 4, dfa_lmax = 0, dfa_split = 50;
  int dfa_nl = 20;
  std::string dfa_tsv = "-", dfa_json = "-";
  CLI::App* dfac = app.add_subcommand("dfa", "detrended fluctuation analysis");
  dfa_sources.attach(dfac);
  dfac->add_option("--series", dfa_file, "plain value file (one number per line)");
  dfac->add_option("--q", dfa_q, "threshold when reading --input/--surrogate")
      ->capture_default_str();
  dfac->add_option("--lmin", dfa_lmin)->capture_default_str();
  dfac->add_option("--lmax", dfa_lmax, "0 = N/4")->capture_default_str();
  dfac->add_option("--nl", dfa_nl, "number of window sizes")->capture_default_str();
  dfac->add_option("--split", dfa_split, "crossover window size")->capture_default_str();
  dfac->add_option("--out", dfa_tsv, "l <TAB> F(l) TSV path");
  dfac->add_option("--out-json", dfa_json, "Hurst-exponent JSON path");

  std::string sur_kind = "fgn";
  double sur_h = 0.8, sur_nu = 3.5, sur_alpha = 1.0, sur_gamma = 0.31;
  std::size_t sur_n = 1 << 16;
  std::uint64_t sur_seed = 42;
  std::string sur_in, sur_out = "-";
  CLI::App* sur = app.add_subcommand("surrogate", "seeded synthetic series generators");
  sur->add_option("--kind", sur_kind, "fgn|student|se-intervals|longmem|shuffle")
      ->capture_default_str();
  sur->add_option("--H", sur_h, "Hurst exponent")->capture_default_str();
  sur->add_option("--nu", sur_nu, "Student tail exponent")->capture_default_str();
  sur->add_option("--alpha", sur_alpha)->capture_default_str();
  sur->add_option("--gamma", sur_gamma)->capture_default_str();
  sur->add_option("--n", sur_n, "length")->capture_default_str();
  sur->add_option("--seed", sur_seed)->capture_default_str();
  sur->add_option("--in", sur_in, "input value file (shuffle)");
  sur->add_option("--out", sur_out, "output path, one value per line");

  RunConfig config;
  std::vector<std::string> report_surrogates;
  std::string report_config_path;
  CLI::App* rep = app.add_subcommand("report", "run the full pipeline; write report + tables");
  rep->add_option("--config", report_config_path, "key=value config file (flags win)");
  rep->add_option("--input", config.inputs, "minute-bar file(s)");
  rep->add_option("--surrogate", report_surrogates, "surrogate spec(s): name,H=..,nu=..,n=..");
  rep->add_option("--grid", config.grid_slots)->capture_default_str();
  rep->add_option("--q", config.thresholds, "threshold list")
      ->delimiter(',')
      ->capture_default_str();
  rep->add_option("--levels", config.levels, "significance levels")
      ->delimiter(',')
      ->capture_default_str();
  rep->add_option("--bootstrap", config.bootstrap_replicas)->capture_default_str();
  rep->add_option("--bins-per-decade", config.bins_per_decade)->capture_default_str();
  rep->add_option("--dfa-lmin", config.dfa_l_min)->capture_default_str();
  rep->add_option("--dfa-lmax", config.dfa_l_max, "0 = N/4")->capture_default_str();
  rep->add_option("--dfa-nl", config.dfa_window_count)->capture_default_str();
  rep->add_option("--dfa-split", config.dfa_split)->capture_default_str();
  rep->add_option("--cluster-nmax", config.cluster_n_max)->capture_default_str();
  rep->add_option("--seed", config.seed)->capture_default_str();
  rep->add_option("--out", config.out_dir, "output directory")->capture_default_str();
  rep->add_option("--workers", config.workers)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*pre) return run_preprocess(pre_sources, pre_out);
    if (*ivc) return run_intervals(iv_sources, iv_q, iv_out);
    if (*st) return run_scaling_test(st_sources, st_significance, st_out);
    if (*fit) return run_fit(fit_sources, fit_q, fit_bpd, fit_json, fit_curve);
    if (*gof) return run_gof(gof_sources, gof_q, gof_bpd, gof_replicas, gof_out);
    if (*mem) return run_memory(mem_sources, mem_q, mem_nmax, mem_dir);
    if (*dfac)
      return run_dfa(dfa_file, dfa_sources, dfa_q, dfa_lmin, dfa_lmax, dfa_nl, dfa_split,
                     dfa_tsv, dfa_json);
    if (*sur)
      return run_surrogate(sur_kind, sur_h, sur_nu, sur_alpha, sur_gamma, sur_n, sur_seed,
                           sur_in, sur_out);
    if (*rep) {
      for (const std::string& spec : report_surrogates)
        config.surrogates.push_back(parse_surrogate_spec(spec));
      if (!report_config_path.empty()) {
        RunConfig merged = parse_run_config_file(report_config_path);
        // command-line flags win over file values
        if (rep->count("--input")) merged.inputs = config.inputs;
        if (rep->count("--surrogate")) merged.surrogates = config.surrogates;
        if (rep->count("--grid")) merged.grid_slots = config.grid_slots;
        if (rep->count("--q")) merged.thresholds = config.thresholds;
        if (rep->count("--levels")) merged.levels = config.levels;
        if (rep->count("--bootstrap")) merged.bootstrap_replicas = config.bootstrap_replicas;
        if (rep->count("--bins-per-decade")) merged.bins_per_decade = config.bins_per_decade;
        if (rep->count("--dfa-lmin")) merged.dfa_l_min = config.dfa_l_min;
        if (rep->count("--dfa-lmax")) merged.dfa_l_max = config.dfa_l_max;
        if (rep->count("--dfa-nl")) merged.dfa_window_count = config.dfa_window_count;
        if (rep->count("--dfa-split")) merged.dfa_split = config.dfa_split;
        if (rep->count("--cluster-nmax")) merged.cluster_n_max = config.cluster_n_max;
        if (rep->count("--seed")) merged.seed = config.seed;
        if (rep->count("--out")) merged.out_dir = config.out_dir;
        if (rep->count("--workers")) merged.workers = config.workers;
        config = std::move(merged);
      }
      return run_report(config);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == errc::invalid_config ? kExitConfig : kExitProcessing;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitProcessing;
  }
  return kExitOk;
}
