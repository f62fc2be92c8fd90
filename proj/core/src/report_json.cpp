#include <nlohmann/json.hpp>

#include "retint/pipeline.hpp"

// JSON mapping kept out of the public headers so the installed library does
// not expose the vendored json dependency.

namespace retint {

using nlohmann::json;

namespace {

json config_to_json(const RunConfig& c) {
  json surrogates = json::array();
  for (const SurrogateInput& s : c.surrogates)
    surrogates.push_back({{"name", s.name},
                          {"H", s.hurst},
                          {"nu", s.tail_exponent},
                          {"n", s.length}});
  return json{{"inputs", c.inputs},
              {"surrogates", surrogates},
              {"grid_slots", c.grid_slots},
              {"thresholds", c.thresholds},
              {"levels", c.levels},
              {"bootstrap_replicas", c.bootstrap_replicas},
              {"bins_per_decade", c.bins_per_decade},
              {"dfa_l_min", c.dfa_l_min},
              {"dfa_l_max", c.dfa_l_max},
              {"dfa_window_count", c.dfa_window_count},
              {"dfa_split", c.dfa_split},
              {"cluster_n_max", c.cluster_n_max},
              {"seed", c.seed},
              {"out_dir", c.out_dir},
              {"workers", c.workers}};
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.inputs = j.at("inputs").get<std::vector<std::string>>();
  for (const json& s : j.at("surrogates")) {
    SurrogateInput in;
    in.name = s.at("name").get<std::string>();
    in.hurst = s.at("H").get<double>();
    in.tail_exponent = s.at("nu").get<double>();
    in.length = s.at("n").get<std::size_t>();
    c.surrogates.push_back(std::move(in));
  }
  c.grid_slots = j.at("grid_slots").get<int>();
  c.thresholds = j.at("thresholds").get<std::vector<double>>();
  c.levels = j.at("levels").get<std::vector<double>>();
  c.bootstrap_replicas = j.at("bootstrap_replicas").get<int>();
  c.bins_per_decade = j.at("bins_per_decade").get<int>();
  c.dfa_l_min = j.at("dfa_l_min").get<std::int64_t>();
  c.dfa_l_max = j.at("dfa_l_max").get<std::int64_t>();
  c.dfa_window_count = j.at("dfa_window_count").get<int>();
  c.dfa_split = j.at("dfa_split").get<std::int64_t>();
  c.cluster_n_max = j.at("cluster_n_max").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.out_dir = j.at("out_dir").get<std::string>();
  c.workers = j.at("workers").get<int>();
  return c;
}

json curve_to_json(const std::vector<CurvePoint>& curve) {
  json out = json::array();
  for (const CurvePoint& p : curve)
    out.push_back({{"x", p.x}, {"y", p.y}, {"count", p.count}});
  return out;
}

std::vector<CurvePoint> curve_from_json(const json& j) {
  std::vector<CurvePoint> out;
  for (const json& p : j)
    out.push_back({p.at("x").get<double>(), p.at("y").get<double>(),
                   p.at("count").get<std::int64_t>()});
  return out;
}

json symbol_to_json(const SymbolReport& s) {
  json j;
  j["symbol"] = s.symbol;
  j["diagnostics"] = {{"series_length", s.diagnostics.series_length},
                      {"missing_price_slots", s.diagnostics.missing_price_slots},
                      {"dropped_zero_pattern", s.diagnostics.dropped_zero_pattern},
                      {"skipped_days", s.diagnostics.skipped_days}};
  json intervals = json::array();
  for (const IntervalSummary& iv : s.intervals)
    intervals.push_back({{"q", iv.q}, {"count", iv.count}, {"tau_mean", iv.tau_mean}});
  j["intervals"] = intervals;
  if (s.scaling) {
    j["scaling"] = {{"KS", s.scaling->statistic},
                    {"CV", s.scaling->critical_value},
                    {"m", s.scaling->m},
                    {"n", s.scaling->n},
                    {"significance", s.scaling->significance},
                    {"accept", s.scaling->accept},
                    {"crossing_significance", s.scaling->crossing_significance}};
  }
  if (s.fit) {
    j["fit"] = {{"c", s.fit->c},
                {"alpha", s.fit->alpha},
                {"gamma", s.fit->gamma},
                {"c_normalized", s.fit->c_normalized},
                {"x_lo", s.fit->x_lo},
                {"x_hi", s.fit->x_hi},
                {"loss", s.fit->loss},
                {"c_constrained", s.fit->c_constrained}};
  }
  if (s.gof) {
    json entries = json::array();
    for (const GofEntry& e : s.gof->entries)
      entries.push_back({{"q", e.q},
                         {"sample_size", e.sample_size},
                         {"KS", e.ks},
                         {"KSW", e.ksw},
                         {"p_KS", e.p_ks},
                         {"p_KSW", e.p_ksw}});
    j["gof"] = {{"replicas", s.gof->replicas}, {"entries", entries}};
  }
  if (s.hurst) {
    j["hurst"] = {{"H_small", s.hurst->h_small},
                  {"H_large", s.hurst->h_large},
                  {"stderr_small", s.hurst->stderr_small},
                  {"stderr_large", s.hurst->stderr_large}};
  }
  j["conditional_mean"] = curve_to_json(s.conditional_mean);
  j["cluster_plus"] = curve_to_json(s.cluster_plus);
  j["cluster_minus"] = curve_to_json(s.cluster_minus);
  j["errors"] = s.errors;
  return j;
}

SymbolReport symbol_from_json(const json& j) {
  SymbolReport s;
  s.symbol = j.at("symbol").get<std::string>();
  const json& d = j.at("diagnostics");
  s.diagnostics.series_length = d.at("series_length").get<std::int64_t>();
  s.diagnostics.missing_price_slots = d.at("missing_price_slots").get<std::int64_t>();
  s.diagnostics.dropped_zero_pattern = d.at("dropped_zero_pattern").get<std::int64_t>();
  s.diagnostics.skipped_days = d.at("skipped_days").get<std::int64_t>();
  for (const json& iv : j.at("intervals"))
    s.intervals.push_back({iv.at("q").get<double>(), iv.at("count").get<std::int64_t>(),
                           iv.at("tau_mean").get<double>()});
  if (j.contains("scaling")) {
    const json& k = j.at("scaling");
    KsReport r;
    r.statistic = k.at("KS").get<double>();
    r.critical_value = k.at("CV").get<double>();
    r.m = k.at("m").get<std::size_t>();
    r.n = k.at("n").get<std::size_t>();
    r.significance = k.at("significance").get<double>();
    r.accept = k.at("accept").get<bool>();
    r.crossing_significance = k.at("crossing_significance").get<double>();
    s.scaling = r;
  }
  if (j.contains("fit")) {
    const json& f = j.at("fit");
    SeFit fit;
    fit.c = f.at("c").get<double>();
    fit.alpha = f.at("alpha").get<double>();
    fit.gamma = f.at("gamma").get<double>();
    fit.c_normalized = f.at("c_normalized").get<double>();
    fit.x_lo = f.at("x_lo").get<double>();
    fit.x_hi = f.at("x_hi").get<double>();
    fit.loss = f.at("loss").get<double>();
    fit.c_constrained = f.at("c_constrained").get<bool>();
    s.fit = fit;
  }
  if (j.contains("gof")) {
    GofReport g;
    g.replicas = j.at("gof").at("replicas").get<int>();
    for (const json& e : j.at("gof").at("entries")) {
      GofEntry entry;
      entry.q = e.at("q").get<double>();
      entry.sample_size = e.at("sample_size").get<std::int64_t>();
      entry.ks = e.at("KS").get<double>();
      entry.ksw = e.at("KSW").get<double>();
      entry.p_ks = e.at("p_KS").get<double>();
      entry.p_ksw = e.at("p_KSW").get<double>();
      g.entries.push_back(entry);
    }
    s.gof = std::move(g);
  }
  if (j.contains("hurst")) {
    const json& h = j.at("hurst");
    s.hurst = HurstSummary{h.at("H_small").get<double>(), h.at("H_large").get<double>(),
                           h.at("stderr_small").get<double>(),
                           h.at("stderr_large").get<double>()};
  }
  s.conditional_mean = curve_from_json(j.at("conditional_mean"));
  s.cluster_plus = curve_from_json(j.at("cluster_plus"));
  s.cluster_minus = curve_from_json(j.at("cluster_minus"));
  s.errors = j.at("errors").get<std::map<std::string, std::string>>();
  return s;
}

}  // namespace

std::string report_to_json(const ReportBundle& bundle) {
  json j;
  j["config"] = config_to_json(bundle.config);
  json symbols = json::array();
  for (const SymbolReport& s : bundle.symbols) symbols.push_back(symbol_to_json(s));
  j["symbols"] = symbols;
  return j.dump(2) + "\n";
}

ReportBundle report_from_json(const std::string& text) {
  const json j = json::parse(text);
  ReportBundle bundle;
  bundle.config = config_from_json(j.at("config"));
  for (const json& s : j.at("symbols")) bundle.symbols.push_back(symbol_from_json(s));
  return bundle;
}

}  // namespace retint
