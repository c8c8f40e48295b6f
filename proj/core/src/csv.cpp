#include "gnnrisk/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gnnrisk/error.hpp"

namespace gnnrisk {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0 into 0
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) fail(ErrorKind::IoError, "format_double: conversion failed");
  return std::string(buf, end);
}

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) : columns_(header.size()) {
  for (auto name : header) field(name);
  end_row();
  rows_ = 0;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
  for (const auto& name : header) field(name);
  end_row();
  rows_ = 0;
}

CsvWriter& CsvWriter::field(std::string_view text) {
  require(text.find_first_of(",\n\r") == std::string_view::npos, ErrorKind::InvalidParameter,
          "csv: field contains a separator: '" + std::string(text) + "'");
  if (pending_ > 0) text_.push_back(',');
  text_.append(text);
  ++pending_;
  return *this;
}

CsvWriter& CsvWriter::field(double value) { return field(format_double(value)); }

CsvWriter& CsvWriter::field(long long value) { return field(std::to_string(value)); }

void CsvWriter::end_row() {
  require(pending_ == columns_, ErrorKind::InvalidParameter,
          "csv: row has " + std::to_string(pending_) + " fields, header has " +
              std::to_string(columns_));
  text_.push_back('\n');
  pending_ = 0;
  ++rows_;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorKind::InvalidParameter, "csv: no column named '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      require(fields.size() == table.header.size(), ErrorKind::IoError,
              "csv: row width " + std::to_string(fields.size()) + " != header width " +
                  std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  require(!first, ErrorKind::IoError, "csv: empty input");
  return table;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    require(!ec, ErrorKind::IoError,
            "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::IoError, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  require(static_cast<bool>(out), ErrorKind::IoError, "write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gnnrisk
