#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace gnnrisk {

/// Shortest decimal text that round-trips to the same double. Identical on
/// every platform, which is what makes output files byte-comparable.
std::string format_double(double value);

/// Minimal CSV writer: no quoting, fields must not contain commas.
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header);
  explicit CsvWriter(const std::vector<std::string>& header);

  CsvWriter& field(std::string_view text);
  CsvWriter& field(double value);
  CsvWriter& field(long long value);
  CsvWriter& field(int value) { return field(static_cast<long long>(value)); }
  CsvWriter& field(std::size_t value) { return field(static_cast<long long>(value)); }
  CsvWriter& empty_field() { return field(std::string_view{}); }
  void end_row();

  std::size_t rows() const noexcept { return rows_; }
  const std::string& str() const noexcept { return text_; }

 private:
  std::string text_;
  std::size_t columns_;
  std::size_t pending_ = 0;
  std::size_t rows_ = 0;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws invalid-parameter when absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace gnnrisk
