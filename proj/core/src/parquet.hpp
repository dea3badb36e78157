#pragma once

// A focused Parquet codec: flat primitive columns plus LIST-of-primitive
// columns, PLAIN and dictionary encodings, data page v1/v2, and
// uncompressed / snappy / gzip pages. This covers the embedding-table and
// registry layouts; anything else is rejected with UnsupportedFormat.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace latentkit::detail::parquet {

enum class PhysicalType : std::int32_t {
  Boolean = 0,
  Int32 = 1,
  Int64 = 2,
  Int96 = 3,
  Float = 4,
  Double = 5,
  ByteArray = 6,
  FixedLenByteArray = 7,
};

enum class Repetition : std::int32_t { Required = 0, Optional = 1, Repeated = 2 };

enum class Codec : std::int32_t {
  Uncompressed = 0,
  Snappy = 1,
  Gzip = 2,
  Lzo = 3,
  Brotli = 4,
  Lz4 = 5,
  Zstd = 6,
  Lz4Raw = 7,
};

struct LeafColumn {
  std::vector<std::string> path;
  PhysicalType type = PhysicalType::Int32;
  std::int16_t max_def = 0;
  std::int16_t max_rep = 0;
  /// Definition level reached once the innermost repeated ancestor holds an
  /// entry; -1 for non-repeated columns.
  std::int16_t repeated_def = -1;
  bool is_unsigned = false;
  bool is_string = false;
};

using Values = std::variant<std::vector<std::int32_t>, std::vector<std::int64_t>,
                            std::vector<float>, std::vector<double>,
                            std::vector<std::string>, std::vector<std::uint8_t>>;

struct ColumnData {
  std::vector<std::int16_t> def_levels;  // empty when max_def == 0
  std::vector<std::int16_t> rep_levels;  // empty when max_rep == 0
  Values values;                          // non-null leaf values only
  std::size_t num_slots = 0;              // level entries across all pages
};

struct ColumnChunkMeta {
  PhysicalType type = PhysicalType::Int32;
  std::vector<std::string> path;
  Codec codec = Codec::Uncompressed;
  std::int64_t num_values = 0;
  std::int64_t data_page_offset = 0;
  std::optional<std::int64_t> dictionary_page_offset;
  std::int64_t total_compressed_size = 0;
};

struct RowGroupMeta {
  std::vector<ColumnChunkMeta> columns;
  std::int64_t num_rows = 0;
};

class Reader {
 public:
  static Reader open(const std::filesystem::path& path);
  explicit Reader(std::vector<std::uint8_t> bytes);

  std::int64_t num_rows() const { return num_rows_; }
  const std::vector<LeafColumn>& leaves() const { return leaves_; }
  /// Index of the leaf whose top-level field is `name`.
  std::optional<std::size_t> find_leaf(const std::string& name) const;
  ColumnData read(std::size_t leaf) const;

 private:
  void parse_footer();

  std::vector<std::uint8_t> bytes_;
  std::int64_t num_rows_ = 0;
  std::vector<LeafColumn> leaves_;
  std::vector<RowGroupMeta> row_groups_;
};

/// Builds a single-row-group file. Columns are written in insertion order.
class Writer {
 public:
  explicit Writer(Codec codec = Codec::Uncompressed) : codec_(codec) {}

  void add_uint32(const std::string& name, std::vector<std::uint32_t> values);
  void add_int64(const std::string& name, std::vector<std::int64_t> values);
  void add_double(const std::string& name, std::vector<double> values);
  void add_string(const std::string& name, std::vector<std::string> values);
  /// Required list<float> column where every row holds `width` values.
  void add_float_list(const std::string& name, std::vector<float> flat,
                      std::size_t width);

  std::vector<std::uint8_t> serialize() const;
  void write(const std::filesystem::path& path) const;

 private:
  struct Column {
    std::string name;
    PhysicalType type;
    enum class Kind { UInt32, Int64, Double, String, FloatList } kind;
    std::vector<std::int32_t> i32;
    std::vector<std::int64_t> i64;
    std::vector<double> f64;
    std::vector<std::string> str;
    std::vector<float> f32;
    std::size_t width = 0;
  };

  std::size_t row_count() const;
  void check_rows(std::size_t rows) const;

  Codec codec_;
  std::vector<Column> columns_;
};

}  // namespace latentkit::detail::parquet
