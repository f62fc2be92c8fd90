#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retint/ingest.hpp"
#include "retint/intervals.hpp"
#include "retint/memory.hpp"
#include "retint/scaling.hpp"

namespace retint {

// Surrogate pseudo-input for the pipeline: a long-memory volatility series
// generated instead of read from disk.
struct SurrogateInput {
  std::string name;
  double hurst = 0.8;
  double tail_exponent = 3.5;
  std::size_t length = 1 << 15;
};

// Parses "name,H=0.8,nu=3.5,n=32768" (first token is the symbol name).
SurrogateInput parse_surrogate_spec(const std::string& spec);

struct RunConfig;

// Plain key=value run configuration ('#' comments, blank lines allowed).
// `input` and `surrogate` may repeat; `q` and `levels` are comma lists.
// Unknown keys are rejected.
RunConfig parse_run_config(std::istream& in);
RunConfig parse_run_config_file(const std::string& path);

struct RunConfig {
  std::vector<std::string> inputs;          // minute-bar files; symbol = file stem
  std::vector<SurrogateInput> surrogates;   // generated pseudo-symbols
  int grid_slots = 240;
  std::vector<double> thresholds = {2, 3, 4, 5};
  std::vector<double> levels = {0.05, 0.01};
  int bootstrap_replicas = 1000;
  int bins_per_decade = 10;
  std::int64_t dfa_l_min = 4;
  std::int64_t dfa_l_max = 0;  // 0 = length/4
  int dfa_window_count = 20;
  std::int64_t dfa_split = 50;
  int cluster_n_max = 10;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  int workers = 1;

  void validate() const;  // throws invalid_config
};

struct SymbolDiagnostics {
  std::int64_t series_length = 0;
  std::int64_t missing_price_slots = 0;
  std::int64_t dropped_zero_pattern = 0;
  std::int64_t skipped_days = 0;
};

struct IntervalSummary {
  double q = 0.0;
  std::int64_t count = 0;
  double tau_mean = 0.0;
};

struct HurstSummary {
  double h_small = 0.0, h_large = 0.0;
  double stderr_small = 0.0, stderr_large = 0.0;
};

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  std::int64_t count = 0;
};

struct SymbolReport {
  std::string symbol;
  SymbolDiagnostics diagnostics;
  std::vector<IntervalSummary> intervals;
  std::optional<KsReport> scaling;       // q=2 vs q=5
  std::optional<SeFit> fit;              // pooled over requested thresholds
  std::optional<GofReport> gof;          // entries for q in {2,5}
  std::optional<HurstSummary> hurst;     // DFA of the q=2 interval sequence
  std::vector<CurvePoint> conditional_mean;
  std::vector<CurvePoint> cluster_plus;
  std::vector<CurvePoint> cluster_minus;
  // stage name -> error string; any entry marks the symbol as partial
  std::map<std::string, std::string> errors;
};

struct ReportBundle {
  RunConfig config;
  std::vector<SymbolReport> symbols;  // sorted by symbol

  bool has_errors() const;
};

ReportBundle run_pipeline(const RunConfig& config);

struct RenderedTables {
  std::string scaling_csv;  // symbol,KS,CV,scaling
  std::string gof_csv;      // symbol,q,p_KS,p_KSW
};

RenderedTables render_tables(const ReportBundle& bundle);

// Lossless JSON round trip: report_from_json(report_to_json(b)) == b,
// and serializing again yields byte-identical text.
std::string report_to_json(const ReportBundle& bundle);
ReportBundle report_from_json(const std::string& text);

// Writes report.json, table1.csv, table2.csv into config.out_dir.
void write_report_files(const ReportBundle& bundle);

}  // namespace retint
