#include "csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace kmzi::cli {

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("failed to format a double");
    }
    return std::string(buffer, ptr);
}

std::string format_int(long long value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw std::runtime_error("failed to format an integer");
    }
    return std::string(buffer, ptr);
}

CsvBuilder::CsvBuilder(std::vector<std::string> header) : columns_(header.size()) {
    append_line(header);
}

void CsvBuilder::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_) {
        throw std::logic_error("CSV row width does not match the header");
    }
    append_line(cells);
    ++rows_;
}

void CsvBuilder::append_line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            data_ += ',';
        }
        data_ += cells[i];
    }
    data_ += "\r\n";
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream stream(path, std::ios::binary);
    if (!stream) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    stream.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!stream) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

}  // namespace kmzi::cli
