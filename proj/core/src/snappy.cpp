#include "snappy.hpp"

#include <cstring>

#include "latentkit/error.hpp"

namespace latentkit::detail {
namespace {

[[noreturn]] void corrupt(const char* what) {
  fail(ErrorCode::MalformedFile, std::string("snappy: ") + what);
}

}  // namespace

std::vector<std::uint8_t> snappy_decompress(std::span<const std::uint8_t> in) {
  std::size_t pos = 0;
  std::uint64_t expected = 0;
  for (int shift = 0;; shift += 7) {
    if (pos >= in.size() || shift > 35) corrupt("bad length preamble");
    const std::uint8_t b = in[pos++];
    expected |= static_cast<std::uint64_t>(b & 0x7f) << shift;
    if ((b & 0x80) == 0) break;
  }

  std::vector<std::uint8_t> out;
  out.reserve(expected);
  while (pos < in.size()) {
    const std::uint8_t tag = in[pos++];
    const unsigned kind = tag & 3u;
    if (kind == 0) {
      std::size_t len = (tag >> 2) + 1u;
      if (len > 60) {
        const std::size_t extra = len - 60;
        if (pos + extra > in.size()) corrupt("truncated literal length");
        len = 0;
        for (std::size_t i = 0; i < extra; ++i) {
          len |= static_cast<std::size_t>(in[pos + i]) << (8 * i);
        }
        len += 1;
        pos += extra;
      }
      if (pos + len > in.size()) corrupt("truncated literal");
      out.insert(out.end(), in.begin() + static_cast<std::ptrdiff_t>(pos),
                 in.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;
      continue;
    }

    std::size_t len = 0;
    std::size_t offset = 0;
    if (kind == 1) {
      if (pos + 1 > in.size()) corrupt("truncated copy");
      len = 4 + ((tag >> 2) & 7u);
      offset = (static_cast<std::size_t>(tag >> 5) << 8) | in[pos];
      pos += 1;
    } else {
      const std::size_t width = kind == 2 ? 2 : 4;
      if (pos + width > in.size()) corrupt("truncated copy");
      len = 1 + (tag >> 2);
      for (std::size_t i = 0; i < width; ++i) {
        offset |= static_cast<std::size_t>(in[pos + i]) << (8 * i);
      }
      pos += width;
    }
    if (offset == 0 || offset > out.size()) corrupt("copy offset out of range");
    // Copies may overlap their own output, so go byte by byte.
    const std::size_t start = out.size() - offset;
    for (std::size_t i = 0; i < len; ++i) out.push_back(out[start + i]);
  }
  if (out.size() != expected) corrupt("decoded length does not match preamble");
  return out;
}

}  // namespace latentkit::detail
