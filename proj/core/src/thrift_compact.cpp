#include "thrift_compact.hpp"

#include <cstring>

#include "latentkit/error.hpp"

namespace latentkit::detail::thrift {
namespace {

constexpr int kMaxDepth = 64;

std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^
         static_cast<std::uint64_t>(v >> 63);
}

[[noreturn]] void corrupt(const std::string& what) {
  fail(ErrorCode::MalformedFile, "thrift: " + what);
}

}  // namespace

std::uint8_t CompactReader::next() {
  if (pos_ >= data_.size()) corrupt("unexpected end of metadata");
  return data_[pos_++];
}

std::uint64_t CompactReader::read_varint() {
  std::uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    const std::uint8_t b = next();
    v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if ((b & 0x80) == 0) return v;
  }
  corrupt("varint too long");
}

std::int32_t CompactReader::read_i32() {
  return static_cast<std::int32_t>(unzigzag(read_varint()));
}

std::int64_t CompactReader::read_i64() { return unzigzag(read_varint()); }

std::int8_t CompactReader::read_byte() { return static_cast<std::int8_t>(next()); }

double CompactReader::read_double() {
  if (pos_ + 8 > data_.size()) corrupt("truncated double");
  double v;
  std::memcpy(&v, data_.data() + pos_, 8);
  pos_ += 8;
  return v;
}

std::string CompactReader::read_binary() {
  const std::uint64_t len = read_varint();
  if (len > data_.size() - pos_) corrupt("binary length past end");
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), len);
  pos_ += len;
  return s;
}

ListHeader CompactReader::read_list_header() {
  const std::uint8_t b = next();
  std::size_t size = b >> 4;
  if (size == 15) size = read_varint();
  return {static_cast<std::uint8_t>(b & 0x0f), size};
}

void CompactReader::read_struct(
    const std::function<void(std::int16_t, std::uint8_t)>& on_field) {
  if (++depth_ > kMaxDepth) corrupt("nesting too deep");
  std::int16_t last = 0;
  for (;;) {
    const std::uint8_t b = next();
    const std::uint8_t type = b & 0x0f;
    if (type == kStop) break;
    const std::uint8_t delta = b >> 4;
    const std::int16_t id = delta != 0
                                ? static_cast<std::int16_t>(last + delta)
                                : static_cast<std::int16_t>(read_i32());
    last = id;
    on_field(id, type);
  }
  --depth_;
}

void CompactReader::skip(std::uint8_t type) {
  switch (type) {
    case kBoolTrue:
    case kBoolFalse:
      return;
    case kByte:
      next();
      return;
    case kI16:
    case kI32:
    case kI64:
      read_varint();
      return;
    case kDouble:
      read_double();
      return;
    case kBinary:
      read_binary();
      return;
    case kList:
    case kSet: {
      const ListHeader h = read_list_header();
      for (std::size_t i = 0; i < h.size; ++i) {
        if (h.elem_type == kBoolTrue || h.elem_type == kBoolFalse) {
          next();
        } else {
          skip(h.elem_type);
        }
      }
      return;
    }
    case kMap: {
      const std::uint64_t n = read_varint();
      if (n == 0) return;
      const std::uint8_t kv = next();
      for (std::uint64_t i = 0; i < n; ++i) {
        skip(kv >> 4);
        skip(kv & 0x0f);
      }
      return;
    }
    case kStruct:
      read_struct([this](std::int16_t, std::uint8_t t) { skip(t); });
      return;
    default:
      corrupt("unknown field type " + std::to_string(type));
  }
}

void CompactWriter::varint(std::uint64_t v) {
  while (v >= 0x80) {
    out_.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out_.push_back(static_cast<std::uint8_t>(v));
}

void CompactWriter::begin_struct() { last_ids_.push_back(0); }

void CompactWriter::end_struct() {
  out_.push_back(kStop);
  last_ids_.pop_back();
}

void CompactWriter::field_header(std::int16_t id, std::uint8_t type) {
  std::int16_t& last = last_ids_.back();
  const int delta = id - last;
  if (delta > 0 && delta <= 15) {
    out_.push_back(static_cast<std::uint8_t>((delta << 4) | type));
  } else {
    out_.push_back(type);
    varint(zigzag(id));
  }
  last = id;
}

void CompactWriter::field_i32(std::int16_t id, std::int32_t v) {
  field_header(id, kI32);
  varint(zigzag(v));
}

void CompactWriter::field_i64(std::int16_t id, std::int64_t v) {
  field_header(id, kI64);
  varint(zigzag(v));
}

void CompactWriter::field_byte(std::int16_t id, std::int8_t v) {
  field_header(id, kByte);
  out_.push_back(static_cast<std::uint8_t>(v));
}

void CompactWriter::field_bool(std::int16_t id, bool v) {
  field_header(id, v ? kBoolTrue : kBoolFalse);
}

void CompactWriter::field_binary(std::int16_t id, const std::string& v) {
  field_header(id, kBinary);
  value_binary(v);
}

void CompactWriter::field_struct(std::int16_t id) { field_header(id, kStruct); }

void CompactWriter::field_list(std::int16_t id, std::uint8_t elem_type,
                               std::size_t size) {
  field_header(id, kList);
  list_header(elem_type, size);
}

void CompactWriter::list_header(std::uint8_t elem_type, std::size_t size) {
  if (size < 15) {
    out_.push_back(static_cast<std::uint8_t>((size << 4) | elem_type));
  } else {
    out_.push_back(static_cast<std::uint8_t>(0xf0 | elem_type));
    varint(size);
  }
}

void CompactWriter::value_i32(std::int32_t v) { varint(zigzag(v)); }

void CompactWriter::value_binary(const std::string& v) {
  varint(v.size());
  out_.insert(out_.end(), v.begin(), v.end());
}

}  // namespace latentkit::detail::thrift
