#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pof/types.hpp"

namespace pof {

/// Shortest decimal form that round-trips a double bit-exactly.
std::string format_full(double v);

/// Tab-separated table writer. The header row is prefixed with '#' so the
/// files stay trivially loadable by plotting tools.
class TableWriter {
 public:
  TableWriter(const std::filesystem::path& path, const std::vector<std::string>& columns);

  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& cells);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

/// key = value summary file, one entry per line.
class SummaryWriter {
 public:
  explicit SummaryWriter(const std::filesystem::path& path);

  void put(const std::string& key, const std::string& value);
  void put(const std::string& key, double value);
  void put(const std::string& key, long long value);
  void put(const std::string& key, bool value);

 private:
  std::ofstream out_;
};

}  // namespace pof
