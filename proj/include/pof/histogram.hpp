#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pof/types.hpp"

namespace pof {

/// Binned empirical distribution plus the scalar summaries the reports use.
struct Histogram {
  std::vector<double> edges;  // n_bins + 1, strictly increasing
  std::vector<long long> counts;
  long long n_samples = 0;
  bool log_bins = false;
  double median = 0.0;
  double peak_bin_center = 0.0;  // geometric center for log bins

  int n_bins() const { return static_cast<int>(counts.size()); }
};

Histogram make_linear_histogram(const std::vector<double>& samples, int n_bins);

/// Log-spaced bins; every sample must be positive.
Histogram make_log_histogram(const std::vector<double>& samples, int n_bins);

double median_of(std::vector<double> samples);

/// Table of (bin_lo, bin_hi, count) plus a key=value summary footer written
/// next to it as <stem>.summary.txt.
void write_histogram(const Histogram& h, const std::filesystem::path& table_path,
                     const std::vector<std::pair<std::string, std::string>>& extra_summary = {});

}  // namespace pof
