#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace latentkit::detail {

/// Decode one raw snappy block (the framing used by Parquet pages).
std::vector<std::uint8_t> snappy_decompress(std::span<const std::uint8_t> in);

}  // namespace latentkit::detail
