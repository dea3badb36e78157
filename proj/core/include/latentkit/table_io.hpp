#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "latentkit/table.hpp"

namespace latentkit {

enum class TableFormat { Parquet, Csv, Jsonl };

std::optional<TableFormat> parse_table_format(std::string_view name);
/// From the file extension (.parquet, .csv, .jsonl/.ndjson).
TableFormat table_format_for(const std::filesystem::path& path);
std::string_view to_string(TableFormat format);

enum class ParquetCompression { None, Gzip };

EmbeddingTable read_embedding_table(const std::filesystem::path& path, TableFormat format);
EmbeddingTable read_embedding_table(const std::filesystem::path& path);

/// Floats are written in shortest round-trip form, so every format
/// reproduces 32-bit payloads bit-exactly.
void write_embedding_table(const EmbeddingTable& table, const std::filesystem::path& path,
                           TableFormat format,
                           ParquetCompression compression = ParquetCompression::None);

}  // namespace latentkit
