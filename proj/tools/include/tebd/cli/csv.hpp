#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace tebd::cli {

/// Formats a double with 17 significant digits, enough to round-trip.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Line-oriented CSV writer with a fixed header. Numeric cells go through
/// format_double so identical runs produce identical bytes.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns, bool append)
      : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path);
    if (!append) {
      for (size_t c = 0; c < columns.size(); ++c) {
        if (c) out_ << ',';
        out_ << columns[c];
      }
      out_ << '\n';
    }
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t c = 0; c < cells.size(); ++c) {
      if (c) out_ << ',';
      out_ << cells[c];
    }
    out_ << '\n';
  }

  void flush() { out_.flush(); }

private:
  std::ofstream out_;
};

}  // namespace tebd::cli
