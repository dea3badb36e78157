#include "latentkit/text.hpp"

#include <charconv>
#include <cmath>

#include "latentkit/error.hpp"

namespace latentkit::text {

CsvReader::CsvReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
  if (!in_) fail(ErrorCode::MalformedFile, "cannot open " + path.string());
}

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (!std::getline(in_, buffer_)) return false;
  ++line_;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == buffer_.size()) {
      if (!quoted) break;
      // Quoted field spans a newline.
      field.push_back('\n');
      if (!std::getline(in_, buffer_)) {
        fail(ErrorCode::MalformedFile, "unterminated quote at line " + std::to_string(line_));
      }
      ++line_;
      i = 0;
      continue;
    }
    const char c = buffer_[i++];
    if (quoted) {
      if (c == '"') {
        if (i < buffer_.size() && buffer_[i] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r' && i == buffer_.size()) {
      // CRLF line ending
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return true;
}

std::optional<std::size_t> CsvHeader::find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return i;
  }
  return std::nullopt;
}

CsvHeader read_header(CsvReader& reader) {
  CsvHeader h;
  if (!reader.next(h.names)) fail(ErrorCode::MalformedFile, "CSV file has no header row");
  if (!h.names.empty() && h.names[0].starts_with("\xEF\xBB\xBF")) h.names[0].erase(0, 3);
  return h;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

namespace {

template <class T>
std::string shortest(T v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <class T>
std::optional<T> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string format_double(double v) { return shortest(v); }
std::string format_float(float v) { return shortest(v); }

std::optional<double> parse_double(std::string_view s) { return parse_number<double>(s); }
std::optional<float> parse_float(std::string_view s) { return parse_number<float>(s); }
std::optional<std::int64_t> parse_int(std::string_view s) { return parse_number<std::int64_t>(s); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace latentkit::text
