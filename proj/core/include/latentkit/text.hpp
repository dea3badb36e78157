#pragma once

// Small text helpers shared by the readers, writers and the CLI: an RFC 4180
// CSV reader and shortest round-trip number formatting.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latentkit::text {

class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path);

  /// False at end of input. Throws MalformedFile on an unterminated quote.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const { return line_; }

 private:
  std::ifstream in_;
  std::string buffer_;
  std::size_t line_ = 0;
};

/// Header row plus a name lookup. Throws MalformedFile for an empty file.
struct CsvHeader {
  std::vector<std::string> names;
  std::optional<std::size_t> find(std::string_view name) const;
};
CsvHeader read_header(CsvReader& reader);

std::string csv_field(std::string_view value);

std::string format_double(double v);
std::string format_float(float v);

std::optional<double> parse_double(std::string_view s);
std::optional<float> parse_float(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

std::string_view trim(std::string_view s);

}  // namespace latentkit::text
