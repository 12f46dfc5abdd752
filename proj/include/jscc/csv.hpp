#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "jscc/errors.hpp"

namespace jscc {

/// Formats a double with 17 significant digits (round-trip exact), so CSV
/// output is byte-reproducible.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Minimal CSV emitter: a fixed header row, then rows of preformatted cells.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path) {
    if (!out_) throw IoError("cannot open for writing: " + path);
    write_cells(header);
  }

  void row(const std::vector<std::string>& cells) { write_cells(cells); }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed while closing CSV output");
  }

 private:
  void write_cells(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw IoError("failed while writing CSV output");
  }

  std::ofstream out_;
};

}  // namespace jscc
