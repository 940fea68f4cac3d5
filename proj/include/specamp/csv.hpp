#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace specamp {

// Formats a double with full round-trip precision (deterministic bytes for
// deterministic values).
std::string format_double(double v);

// RFC 4180 quoting: quote when the cell contains comma, quote or newline.
std::string csv_quote(const std::string& cell);

// Minimal CSV emitter: one header row, then data rows.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);
    // convenience: doubles are formatted, strings quoted
    void row_values(const std::vector<double>& values);

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
    std::size_t n_cols_ = 0;
};

}  // namespace specamp
