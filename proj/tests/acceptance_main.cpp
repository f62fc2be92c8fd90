// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Usage: retint_acceptance --cli <path-to-retint-binary> --work-dir <dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "retint/errors.hpp"
#include "retint/ingest.hpp"
#include "retint/intervals.hpp"
#include "retint/memory.hpp"
#include "retint/pipeline.hpp"
#include "retint/scaling.hpp"
#include "retint/seeding.hpp"
#include "retint/surrogate.hpp"

using namespace retint;

namespace {

std::string g_cli_path;
std::filesystem::path g_work_dir;
int g_failures = 0;

void run_criterion(int number, const std::string& title,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto start = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n", ok ? "PASS" : "FAIL", number,
              title.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

SeFit make_se(double alpha, double gamma) {
  SeFit fit;
  fit.alpha = alpha;
  fit.gamma = gamma;
  fit.c = fit.c_normalized = se_normalization(alpha, gamma);
  fit.c_constrained = true;
  return fit;
}

double unit_mean_alpha(double gamma) {
  return std::pow(std::tgamma(2.0 / gamma) / std::tgamma(1.0 / gamma), gamma);
}

// ---------------------------------------------------------------- criterion 1

bool crossing_fixture(std::string& detail) {
  const double alpha_star = crossing_significance_from_cv(0.0580, 0.0520, 0.05);
  char buf[128];
  std::snprintf(buf, sizeof buf, "alpha*=%.4f%%, window [1.87%%, 2.11%%]",
                100.0 * alpha_star);
  detail = buf;
  return alpha_star >= 0.0187 && alpha_star <= 0.0211;
}

// ---------------------------------------------------------------- criterion 2

struct PublishedRow {
  const char* code;
  double ks, cv;
  bool scaling;
};

constexpr PublishedRow kPublishedRows[] = {
    {"000002", 0.0793, 0.0636, false}, {"000503", 0.0485, 0.0469, false},
    {"000625", 0.0233, 0.0509, true},  {"000839", 0.0705, 0.0490, false},
    {"000858", 0.0803, 0.0500, false}, {"000917", 0.0718, 0.0511, false},
    {"000930", 0.0699, 0.0518, false}, {"000983", 0.0509, 0.0496, false},
    {"600000", 0.0699, 0.0538, false}, {"600019", 0.0223, 0.0672, true},
    {"600026", 0.0277, 0.0511, true},  {"600028", 0.0670, 0.0653, false},
    {"600030", 0.0580, 0.0520, false}, {"600036", 0.0436, 0.0576, true},
    {"600073", 0.0501, 0.0500, false}, {"600088", 0.0540, 0.0497, false},
    {"600100", 0.0462, 0.0500, true},  {"600104", 0.0149, 0.0573, true},
    {"600110", 0.0911, 0.0506, false}, {"600171", 0.0377, 0.0530, true},
    {"600320", 0.0515, 0.0506, false}, {"600428", 0.0475, 0.0510, true},
    {"600550", 0.0198, 0.0498, true},  {"600601", 0.0218, 0.0637, true},
    {"600602", 0.0167, 0.0561, true},  {"600688", 0.0421, 0.0566, true},
    {"600770", 0.0647, 0.0478, false}, {"600797", 0.1179, 0.0647, false},
    {"600832", 0.0610, 0.0474, false}, {"600900", 0.0574, 0.0556, false},
};

bool verdict_fixtures(std::string& detail) {
  int matched = 0, scaling_count = 0;
  for (const PublishedRow& row : kPublishedRows) {
    const bool accept = row.ks < row.cv;
    if (accept == row.scaling) ++matched;
    if (accept) ++scaling_count;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d/30 rows match, %d scaling", matched, scaling_count);
  detail = buf;
  const bool examples_ok = (0.0233 < 0.0509) && !(0.0793 < 0.0636);
  return matched == 30 && scaling_count == 12 && examples_ok;
}

// ---------------------------------------------------------------- criterion 3

bool poisson_interval_oracle(std::string& detail) {
  // mean-interval law on one long series
  std::vector<double> series = student_returns(3.5, 1000000, 20240001);
  IntervalSeries i2 = extract_intervals(series, 2.0);
  const double p_hat = static_cast<double>(i2.exceedance_count) /
                       static_cast<double>(series.size());
  const double ratio = i2.tau_mean * p_hat;
  const bool mean_ok = std::fabs(ratio - 1.0) <= 0.03;

  // scaling collapse of q=2 versus q=3 across seeds
  int accepted = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> r = student_returns(3.5, 1000000, mix_seed(555000, t));
    try {
      ScaledIntervals a = scale(extract_intervals(r, 2.0));
      ScaledIntervals b = scale(extract_intervals(r, 3.0));
      if (ks_two_sample(a, b, 0.05).accept) ++accepted;
    } catch (const Error&) {
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "tau_mean*p_hat=%.4f (need within 3%%); KS accepts %d/100 (need >= 90)",
                ratio, accepted);
  detail = buf;
  return mean_ok && accepted >= 90;
}

// ---------------------------------------------------------------- criterion 4

bool stretched_exponential_recovery(std::string& detail) {
  SeFit truth = make_se(unit_mean_alpha(0.31), 0.31);
  std::vector<double> draws = sample_se(truth, 100000, 424242);
  ScaledIntervals sample;
  sample.values = std::move(draws);
  SeFit fit = fit_stretched_exponential(std::vector<ScaledIntervals>{sample});
  const bool gamma_ok = fit.gamma >= 0.28 && fit.gamma <= 0.34;

  double worst = 0.0;
  for (double gamma : {0.3, 0.5, 1.0}) {
    for (double alpha : {0.5, 1.0, 4.0}) {
      SeFit model = make_se(alpha, gamma);
      auto density = [&](double u) {
        return model.c_normalized * std::exp(-alpha * std::pow(u, gamma));
      };
      for (double x : {0.05, 0.2, 1.0, 3.0}) {
        const double quad = testutil::integrate(density, 0.0, x, 1e-12);
        worst = std::max(worst, std::fabs(se_cdf(model, x) - quad));
      }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "fitted gamma=%.4f in [0.28,0.34]; max |cdf-quad|=%.2e",
                fit.gamma, worst);
  detail = buf;
  return gamma_ok && worst < 1e-8;
}

// ---------------------------------------------------------------- criterion 5

bool bootstrap_calibration(std::string& detail) {
  SeFit fit = make_se(unit_mean_alpha(0.31), 0.31);
  const int trials = 200;
  const std::size_t n = 2000;
  int reject_ks = 0, reject_ksw = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> data = sample_se(fit, n, mix_seed(777000, t));
    GofEntry entry =
        bootstrap_gof(fit, data, 2.0, 1000, mix_seed(888000, t), 2);
    if (entry.p_ks < 0.05) ++reject_ks;
    if (entry.p_ksw < 0.05) ++reject_ksw;
  }
  const double rate_ks = 100.0 * reject_ks / trials;
  const double rate_ksw = 100.0 * reject_ksw / trials;
  char buf[128];
  std::snprintf(buf, sizeof buf, "rejection at 5%%: KS %.1f%%, KSW %.1f%% (need [3%%,7%%])",
                rate_ks, rate_ksw);
  detail = buf;
  return reject_ks >= 6 && reject_ks <= 14 && reject_ksw >= 6 && reject_ksw <= 14;
}

// ---------------------------------------------------------------- criterion 6

bool dfa_oracle(std::string& detail) {
  const std::size_t n = 1 << 16;
  DfaResult base_05 = dfa(fgn(0.5, n, 1001), log_spaced_windows(4, n / 4, 20));
  const double h05 = hurst_exponent(base_05).exponent;
  DfaResult base_08 = dfa(fgn(0.8, n, 1002), log_spaced_windows(4, n / 4, 20));
  const double h08 = hurst_exponent(base_08).exponent;

  std::vector<double> constant(8192, 3.14);
  DfaResult flat = dfa(constant, log_spaced_windows(4, 2048, 12));
  bool zero_ok = true;
  for (double f : flat.fluctuation) zero_ok &= (f == 0.0);

  NormalizedVolatilitySeries vol = long_memory_volatility(0.8, 3.5, 1 << 17, 52);
  IntervalSeries intervals = extract_intervals(vol, 2.0);
  std::vector<double> shuffled_tau;
  for (std::int64_t tau : shuffled(intervals.values, 53))
    shuffled_tau.push_back(static_cast<double>(tau));
  const auto m = static_cast<std::int64_t>(shuffled_tau.size());
  const double h_shuffled =
      hurst_exponent(dfa(shuffled_tau, log_spaced_windows(10, m / 32, 20))).exponent;

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "H(0.5)=%.3f+-0.04, H(0.8)=%.3f+-0.05, F(const)=0: %s, H(shuffled)=%.3f+-0.04",
                h05, h08, zero_ok ? "yes" : "no", h_shuffled);
  detail = buf;
  return std::fabs(h05 - 0.5) <= 0.04 && std::fabs(h08 - 0.8) <= 0.05 && zero_ok &&
         std::fabs(h_shuffled - 0.5) <= 0.04;
}

// ---------------------------------------------------------------- criterion 7

bool memory_sign_properties(std::string& detail) {
  NormalizedVolatilitySeries vol = long_memory_volatility(0.8, 3.5, 1 << 17, 71);
  IntervalSeries intervals = extract_intervals(vol, 2.0);

  ConditionalMeanCurve curve = mean_conditional_interval(intervals, 8);
  const double rho = testutil::spearman(curve.tau0_center, curve.mean);
  const bool increasing = rho == 1.0;

  auto [plus, minus] = cluster_conditional_mean(intervals, 8);
  std::vector<double> pn(plus.size.begin(), plus.size.end());
  std::vector<double> mn(minus.size.begin(), minus.size.end());
  const double plus_slope = testutil::least_squares(pn, plus.mean).slope;
  const double minus_slope = testutil::least_squares(mn, minus.mean).slope;

  IntervalSeries flat = intervals;
  flat.values = shuffled(intervals.values, 72);
  auto [plus_s, minus_s] = cluster_conditional_mean(flat, 8);
  bool flat_ok = true;
  for (std::size_t i = 0; i < plus_s.mean.size(); ++i)
    flat_ok &= std::fabs(plus_s.mean[i] - 1.0) <= 3.0 * plus_s.stderr_mean[i];
  for (std::size_t i = 0; i < minus_s.mean.size(); ++i)
    flat_ok &= std::fabs(minus_s.mean[i] - 1.0) <= 3.0 * minus_s.stderr_mean[i];

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "spearman=%.2f, cluster slopes %+0.4f/%+0.4f, shuffled flat: %s",
                rho, plus_slope, minus_slope, flat_ok ? "yes" : "no");
  detail = buf;
  return increasing && plus_slope > 0.0 && minus_slope < 0.0 && flat_ok;
}

// ---------------------------------------------------------------- criterion 8

bool preprocessing_invariants(std::string& detail) {
  std::mt19937_64 rng(31415);
  std::normal_distribution<double> step(0.0, 0.01);
  std::ostringstream records;
  const int days = 40, slots = 100;
  for (int d = 0; d < days; ++d) {
    double price = 50.0;
    char date[16];
    std::snprintf(date, sizeof date, "2005-%02d-%02d", 1 + d / 28, 1 + d % 28);
    for (int s = 0; s < slots; ++s) {
      price *= std::exp(step(rng));
      if ((rng() % 37) == 0) continue;  // sprinkle gaps
      records << date << ',' << s << ',' << price << '\n';
    }
  }
  std::istringstream in(records.str());
  PriceSeries prices = parse_minute_bars(in, GridSpec{slots}, "synthetic");

  VolatilitySeries vol = compute_volatility(prices);
  IntradayPattern pattern = intraday_pattern(vol);
  VolatilitySeries flat = deseasonalize(vol, pattern, nullptr);

  double worst_slot_mean = 0.0;
  std::vector<double> sum(slots, 0.0);
  std::vector<int> count(slots, 0);
  for (const auto& day : flat.days)
    for (std::size_t i = 0; i < day.slot.size(); ++i) {
      sum[static_cast<std::size_t>(day.slot[i])] += day.value[i];
      ++count[static_cast<std::size_t>(day.slot[i])];
    }
  for (int s = 0; s < slots; ++s)
    if (count[static_cast<std::size_t>(s)] > 0)
      worst_slot_mean = std::max(
          worst_slot_mean, std::fabs(sum[static_cast<std::size_t>(s)] /
                                         count[static_cast<std::size_t>(s)] -
                                     1.0));

  NormalizedVolatilitySeries series = normalize(flat);
  const double sd = std::sqrt(testutil::population_variance(series.r));

  bool no_cross_day = true;
  for (const auto& [day, slot] : series.origin) no_cross_day &= (slot >= 1);

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "per-slot mean err=%.2e (<=1e-12), std err=%.2e (<=1e-9), cross-day: %s",
                worst_slot_mean, std::fabs(sd - 1.0), no_cross_day ? "none" : "FOUND");
  detail = buf;
  return worst_slot_mean <= 1e-12 && std::fabs(sd - 1.0) <= 1e-9 && no_cross_day;
}

// ---------------------------------------------------------------- criterion 9

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool determinism_end_to_end(std::string& detail) {
  namespace fs = std::filesystem;
  const fs::path out_dir = g_work_dir / "det_out";
  const fs::path keep_dir = g_work_dir / "det_keep";
  fs::remove_all(out_dir);
  fs::remove_all(keep_dir);
  fs::create_directories(g_work_dir);

  const fs::path config_path = g_work_dir / "det.cfg";
  {
    std::ofstream cfg(config_path);
    cfg << "surrogate = lm0,H=0.8,nu=3.5,n=32768\n"
        << "seed = 20240\n"
        << "bootstrap = 200\n"
        << "workers = 2\n"
        << "out = " << out_dir.string() << "\n";
  }
  const std::string command =
      "'" + g_cli_path + "' report --config '" + config_path.string() + "'";
  if (std::system(command.c_str()) != 0) {
    detail = "first report run failed";
    return false;
  }
  fs::create_directories(keep_dir);
  for (const char* name : {"report.json", "table1.csv", "table2.csv"})
    fs::copy_file(out_dir / name, keep_dir / name);

  if (std::system(command.c_str()) != 0) {
    detail = "second report run failed";
    return false;
  }
  for (const char* name : {"report.json", "table1.csv", "table2.csv"}) {
    if (slurp(out_dir / name) != slurp(keep_dir / name)) {
      detail = std::string(name) + " differs between runs";
      return false;
    }
  }
  detail = "two runs byte-identical (report.json, table1.csv, table2.csv)";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") g_cli_path = argv[i + 1];
    if (flag == "--work-dir") g_work_dir = argv[i + 1];
  }
  if (g_work_dir.empty()) g_work_dir = std::filesystem::temp_directory_path() / "retint_acc";
  std::filesystem::create_directories(g_work_dir);

  run_criterion(1, "significance-crossing fixture", crossing_fixture);
  run_criterion(2, "published verdict fixtures", verdict_fixtures);
  run_criterion(3, "Poisson-interval oracle", poisson_interval_oracle);
  run_criterion(4, "stretched-exponential recovery", stretched_exponential_recovery);
  run_criterion(5, "bootstrap calibration", bootstrap_calibration);
  run_criterion(6, "DFA oracle", dfa_oracle);
  run_criterion(7, "memory-sign properties", memory_sign_properties);
  run_criterion(8, "preprocessing invariants", preprocessing_invariants);
  if (g_cli_path.empty()) {
    std::printf("[FAIL] criterion 9: end-to-end determinism (--cli not given)\n");
    ++g_failures;
  } else {
    run_criterion(9, "end-to-end determinism", determinism_end_to_end);
  }

  if (g_failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
