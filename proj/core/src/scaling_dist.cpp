#include <algorithm>
#include <cmath>
#include <string>

#include "retint/errors.hpp"
#include "retint/scaling.hpp"

namespace retint {

EmpiricalCdf::EmpiricalCdf(std::vector<double> sample) : sorted_(std::move(sample)) {
  if (sorted_.empty()) throw Error(errc::empty_series, "empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

EmpiricalCdf empirical_cdf(const ScaledIntervals& sample) {
  return EmpiricalCdf(sample.values);
}

BinnedPdf log_binned_pdf(std::span<const double> sample, int bins_per_decade) {
  if (sample.empty()) throw Error(errc::empty_series, "empty sample");
  if (bins_per_decade < 2)
    throw Error(errc::invalid_config, "bins_per_decade must be at least 2");

  double lo = sample[0], hi = sample[0];
  for (double x : sample) {
    if (!(x > 0.0) || !std::isfinite(x))
      throw Error(errc::invalid_sample, "log binning requires positive finite values");
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }

  const double width = 1.0 / bins_per_decade;  // decades per bin
  double log_lo = std::log10(lo);
  double log_hi = std::log10(hi);
  int nbins;
  if (log_hi - log_lo < 1e-12) {
    // point mass: one bin centered on the value
    log_lo -= width / 2;
    nbins = 1;
  } else {
    nbins = static_cast<int>(std::ceil((log_hi - log_lo) / width - 1e-9));
  }

  std::vector<std::int64_t> counts(static_cast<std::size_t>(nbins), 0);
  for (double x : sample) {
    int b = static_cast<int>(std::floor((std::log10(x) - log_lo) / width));
    b = std::clamp(b, 0, nbins - 1);
    ++counts[static_cast<std::size_t>(b)];
  }

  BinnedPdf out;
  out.total_count = static_cast<std::int64_t>(sample.size());
  const double n = static_cast<double>(sample.size());
  for (int b = 0; b < nbins; ++b) {
    if (counts[static_cast<std::size_t>(b)] == 0) continue;
    BinnedPdf::Bin bin;
    bin.lo = std::pow(10.0, log_lo + b * width);
    bin.hi = std::pow(10.0, log_lo + (b + 1) * width);
    bin.center = std::sqrt(bin.lo * bin.hi);
    bin.count = counts[static_cast<std::size_t>(b)];
    bin.density = static_cast<double>(bin.count) / (n * (bin.hi - bin.lo));
    out.bins.push_back(bin);
  }
  return out;
}

BinnedPdf log_binned_pdf(const ScaledIntervals& sample, int bins_per_decade) {
  return log_binned_pdf(std::span<const double>(sample.values), bins_per_decade);
}

double ks_coefficient(double significance) {
  if (!(significance > 0.0 && significance < 1.0))
    throw Error(errc::invalid_config, "significance must lie in (0,1)");
  return std::sqrt(-std::log(significance / 2.0) / 2.0);
}

double critical_value(std::size_t m, std::size_t n, double significance) {
  if (m < 1 || n < 1) throw Error(errc::invalid_config, "sample sizes must be positive");
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  return ks_coefficient(significance) / std::sqrt(dm * dn / (dm + dn));
}

double crossing_significance(double statistic, std::size_t m, std::size_t n) {
  const double dm = static_cast<double>(m), dn = static_cast<double>(n);
  const double z = statistic * std::sqrt(dm * dn / (dm + dn));
  return 2.0 * std::exp(-2.0 * z * z);
}

double crossing_significance_from_cv(double statistic, double cv, double significance) {
  const double root = ks_coefficient(significance) / cv;  // sqrt(mn/(m+n))
  const double z = statistic * root;
  return 2.0 * std::exp(-2.0 * z * z);
}

KsReport ks_two_sample(std::span<const double> a, std::span<const double> b,
                       double significance) {
  if (a.empty() || b.empty()) throw Error(errc::empty_series, "empty sample");

  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double lo = std::max(sa.front(), sb.front());
  const double hi = std::min(sa.back(), sb.back());
  if (lo > hi)
    throw Error(errc::no_overlap, "sample ranges do not overlap");

  auto cdf_at = [](const std::vector<double>& sorted, double x) {
    auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
  };

  double stat = 0.0;
  for (const std::vector<double>* s : {&sa, &sb}) {
    auto first = std::lower_bound(s->begin(), s->end(), lo);
    auto last = std::upper_bound(s->begin(), s->end(), hi);
    for (auto it = first; it != last; ++it) {
      if (it != first && *it == *(it - 1)) continue;
      stat = std::max(stat, std::fabs(cdf_at(sa, *it) - cdf_at(sb, *it)));
    }
  }

  KsReport report;
  report.statistic = stat;
  report.m = sa.size();
  report.n = sb.size();
  report.significance = significance;
  report.critical_value = critical_value(report.m, report.n, significance);
  report.accept = stat < report.critical_value;
  report.crossing_significance = crossing_significance(stat, report.m, report.n);
  return report;
}

KsReport ks_two_sample(const ScaledIntervals& a, const ScaledIntervals& b,
                       double significance) {
  return ks_two_sample(std::span<const double>(a.values),
                       std::span<const double>(b.values), significance);
}

ScalingVerdict scaling_verdict(const std::vector<GofEntry>& entries, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw Error(errc::invalid_config, "level must lie in (0,1)");
  const GofEntry* q2 = nullptr;
  const GofEntry* q5 = nullptr;
  for (const GofEntry& e : entries) {
    if (e.q == 2.0) q2 = &e;
    if (e.q == 5.0) q5 = &e;
  }
  if (!q2 || !q5)
    throw Error(errc::incomplete_input, "verdict needs entries for both q=2 and q=5");

  ScalingVerdict v;
  v.ks_reject = std::min(q2->p_ks, q5->p_ks) < level;
  v.ksw_reject = std::min(q2->p_ksw, q5->p_ksw) < level;
  return v;
}

}  // namespace retint
