#pragma once

// Minimal Thrift compact protocol, enough for Parquet file and page metadata.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace latentkit::detail::thrift {

enum Type : std::uint8_t {
  kStop = 0,
  kBoolTrue = 1,
  kBoolFalse = 2,
  kByte = 3,
  kI16 = 4,
  kI32 = 5,
  kI64 = 6,
  kDouble = 7,
  kBinary = 8,
  kList = 9,
  kSet = 10,
  kMap = 11,
  kStruct = 12,
};

struct ListHeader {
  std::uint8_t elem_type;
  std::size_t size;
};

class CompactReader {
 public:
  explicit CompactReader(std::span<const std::uint8_t> data) : data_(data) {}

  /// Walk the fields of one struct; the callback must consume the value
  /// (read_* or skip) for every field it is handed.
  void read_struct(const std::function<void(std::int16_t, std::uint8_t)>& on_field);

  std::int32_t read_i32();
  std::int64_t read_i64();
  std::int8_t read_byte();
  double read_double();
  std::string read_binary();
  bool read_bool_field(std::uint8_t type) const { return type == kBoolTrue; }
  ListHeader read_list_header();

  void skip(std::uint8_t type);

  std::size_t position() const { return pos_; }

 private:
  std::uint64_t read_varint();
  std::uint8_t next();

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

class CompactWriter {
 public:
  void begin_struct();
  void end_struct();

  void field_i32(std::int16_t id, std::int32_t v);
  void field_i64(std::int16_t id, std::int64_t v);
  void field_byte(std::int16_t id, std::int8_t v);
  void field_bool(std::int16_t id, bool v);
  void field_binary(std::int16_t id, const std::string& v);
  /// Writes the header of a struct-typed field; follow with begin_struct().
  void field_struct(std::int16_t id);
  void field_list(std::int16_t id, std::uint8_t elem_type, std::size_t size);

  void list_header(std::uint8_t elem_type, std::size_t size);
  void value_i32(std::int32_t v);
  void value_binary(const std::string& v);

  const std::vector<std::uint8_t>& bytes() const { return out_; }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void field_header(std::int16_t id, std::uint8_t type);
  void varint(std::uint64_t v);

  std::vector<std::uint8_t> out_;
  std::vector<std::int16_t> last_ids_;
};

}  // namespace latentkit::detail::thrift
