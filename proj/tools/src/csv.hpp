#pragma once

#include <string>
#include <vector>

namespace kmzi::cli {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

std::string format_int(long long value);

/// RFC-4180 CSV accumulator: header row, CRLF line endings, '.' decimals.
class CsvBuilder {
  public:
    explicit CsvBuilder(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);

    const std::string& bytes() const { return data_; }
    std::size_t rows() const { return rows_; }

  private:
    void append_line(const std::vector<std::string>& cells);

    std::string data_;
    std::size_t columns_ = 0;
    std::size_t rows_ = 0;
};

/// Writes bytes verbatim (binary mode, no newline translation).
void write_file(const std::string& path, const std::string& bytes);

}  // namespace kmzi::cli
