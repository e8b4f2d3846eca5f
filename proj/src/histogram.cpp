#include "pof/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "pof/error.hpp"
#include "pof/table_io.hpp"

namespace pof {

double median_of(std::vector<double> samples) {
  require(!samples.empty(), "histogram", "median of an empty sample set");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

namespace {

Histogram build(const std::vector<double>& samples, int n_bins, bool log_bins) {
  require(!samples.empty(), "histogram", "cannot bin an empty sample set");
  require(n_bins >= 1, "histogram", "need at least one bin");

  double lo = *std::min_element(samples.begin(), samples.end());
  double hi = *std::max_element(samples.begin(), samples.end());
  if (log_bins) {
    require(lo > 0.0, "histogram", "log bins need strictly positive samples");
  }
  if (lo == hi) {
    // Degenerate spread: widen symmetrically so edges stay strictly increasing.
    const double pad = log_bins ? 0.5 * lo : std::max(0.5 * std::abs(lo), 0.5);
    lo -= log_bins ? pad : pad;
    hi += pad;
    if (log_bins && lo <= 0.0) lo = 0.5 * hi;
  }

  Histogram h;
  h.log_bins = log_bins;
  h.n_samples = static_cast<long long>(samples.size());
  h.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  const double a = log_bins ? std::log(lo) : lo;
  const double b = log_bins ? std::log(hi) : hi;
  for (int i = 0; i <= n_bins; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / n_bins;
    h.edges[static_cast<std::size_t>(i)] = log_bins ? std::exp(t) : t;
  }
  h.edges.front() = std::min(h.edges.front(), lo);
  h.edges.back() = std::max(h.edges.back(), hi);

  h.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : samples) {
    const double t = log_bins ? std::log(v) : v;
    int bin = static_cast<int>(std::floor((t - a) / (b - a) * n_bins));
    bin = std::clamp(bin, 0, n_bins - 1);
    // Guard against edge rounding: keep the sample inside its bin bounds.
    while (bin > 0 && v < h.edges[static_cast<std::size_t>(bin)]) --bin;
    while (bin < n_bins - 1 && v >= h.edges[static_cast<std::size_t>(bin) + 1]) ++bin;
    ++h.counts[static_cast<std::size_t>(bin)];
  }

  h.median = median_of(samples);
  const auto peak = std::max_element(h.counts.begin(), h.counts.end());
  const std::size_t p = static_cast<std::size_t>(peak - h.counts.begin());
  h.peak_bin_center = log_bins ? std::sqrt(h.edges[p] * h.edges[p + 1])
                               : 0.5 * (h.edges[p] + h.edges[p + 1]);
  return h;
}

}  // namespace

Histogram make_linear_histogram(const std::vector<double>& samples, int n_bins) {
  return build(samples, n_bins, false);
}

Histogram make_log_histogram(const std::vector<double>& samples, int n_bins) {
  return build(samples, n_bins, true);
}

void write_histogram(const Histogram& h, const std::filesystem::path& table_path,
                     const std::vector<std::pair<std::string, std::string>>& extra_summary) {
  TableWriter table(table_path, {"bin_lo", "bin_hi", "count"});
  for (int i = 0; i < h.n_bins(); ++i) {
    table.row({format_full(h.edges[static_cast<std::size_t>(i)]),
               format_full(h.edges[static_cast<std::size_t>(i) + 1]),
               std::to_string(h.counts[static_cast<std::size_t>(i)])});
  }

  auto summary_path = table_path;
  summary_path.replace_extension(".summary.txt");
  SummaryWriter summary(summary_path);
  summary.put("n_samples", static_cast<long long>(h.n_samples));
  summary.put("median", h.median);
  summary.put("peak_bin_center", h.peak_bin_center);
  summary.put("log_bins", h.log_bins);
  for (const auto& [k, v] : extra_summary) summary.put(k, v);
}

}  // namespace pof
