#include "pof/table_io.hpp"

#include <charconv>
#include <cstdio>

#include "pof/error.hpp"

namespace pof {

std::string format_full(double v) {
  char buf[64];
  // 17 significant digits round-trip any IEEE double.
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

TableWriter::TableWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
    : out_(path), n_columns_(columns.size()) {
  require(out_.good(), "io", "cannot open " + path.string() + " for writing");
  out_ << "#";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "\t" : "") << columns[i];
  out_ << "\n";
}

void TableWriter::row(const std::vector<std::string>& cells) {
  require(cells.size() == n_columns_, "io", "row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "\t" : "") << cells[i];
  out_ << "\n";
}

void TableWriter::row(const std::vector<double>& cells) {
  std::vector<std::string> text;
  text.reserve(cells.size());
  for (double v : cells) text.push_back(format_full(v));
  row(text);
}

SummaryWriter::SummaryWriter(const std::filesystem::path& path) : out_(path) {
  require(out_.good(), "io", "cannot open " + path.string() + " for writing");
}

void SummaryWriter::put(const std::string& key, const std::string& value) {
  out_ << key << " = " << value << "\n";
}

void SummaryWriter::put(const std::string& key, double value) { put(key, format_full(value)); }

void SummaryWriter::put(const std::string& key, long long value) { put(key, std::to_string(value)); }

void SummaryWriter::put(const std::string& key, bool value) {
  put(key, std::string(value ? "true" : "false"));
}

}  // namespace pof
