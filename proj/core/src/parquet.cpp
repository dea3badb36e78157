#include "parquet.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>

#include "latentkit/error.hpp"
#include "snappy.hpp"
#include "thrift_compact.hpp"

namespace latentkit::detail::parquet {
namespace {

using thrift::CompactReader;
using thrift::CompactWriter;

constexpr char kMagic[4] = {'P', 'A', 'R', '1'};

// Page types
constexpr std::int32_t kDataPage = 0;
constexpr std::int32_t kIndexPage = 1;
constexpr std::int32_t kDictionaryPage = 2;
constexpr std::int32_t kDataPageV2 = 3;

// Encodings
constexpr std::int32_t kPlain = 0;
constexpr std::int32_t kPlainDictionary = 2;
constexpr std::int32_t kRle = 3;
constexpr std::int32_t kRleDictionary = 8;

// Converted types
constexpr std::int32_t kConvertedUtf8 = 0;
constexpr std::int32_t kConvertedList = 3;
constexpr std::int32_t kConvertedUint8 = 11;
constexpr std::int32_t kConvertedUint16 = 12;
constexpr std::int32_t kConvertedUint32 = 13;
constexpr std::int32_t kConvertedUint64 = 14;

[[noreturn]] void corrupt(const std::string& what) {
  fail(ErrorCode::MalformedFile, "parquet: " + what);
}

[[noreturn]] void unsupported(const std::string& what) {
  fail(ErrorCode::UnsupportedFormat, "parquet: " + what);
}

struct SchemaElement {
  std::string name;
  std::optional<PhysicalType> type;
  Repetition repetition = Repetition::Required;
  std::int32_t num_children = 0;
  std::optional<std::int32_t> converted_type;
  bool logical_unsigned = false;
  bool logical_string = false;
};

struct PageHeader {
  std::int32_t type = -1;
  std::int32_t uncompressed_size = 0;
  std::int32_t compressed_size = 0;
  std::int32_t num_values = 0;
  std::int32_t encoding = kPlain;
  std::int32_t def_encoding = kRle;
  std::int32_t rep_encoding = kRle;
  std::int32_t num_nulls = 0;
  std::int32_t def_length = 0;
  std::int32_t rep_length = 0;
  bool is_compressed = true;
};

template <class T>
T load_le(const std::uint8_t* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

int bit_width_for(std::int32_t max_value) {
  int w = 0;
  while ((1LL << w) <= max_value) ++w;
  return w;
}

// ---------------------------------------------------------------- metadata

SchemaElement parse_schema_element(CompactReader& r) {
  SchemaElement e;
  r.read_struct([&](std::int16_t id, std::uint8_t t) {
    switch (id) {
      case 1: e.type = static_cast<PhysicalType>(r.read_i32()); break;
      case 3: e.repetition = static_cast<Repetition>(r.read_i32()); break;
      case 4: e.name = r.read_binary(); break;
      case 5: e.num_children = r.read_i32(); break;
      case 6: e.converted_type = r.read_i32(); break;
      case 10:
        r.read_struct([&](std::int16_t lid, std::uint8_t lt) {
          if (lid == 1) {
            e.logical_string = true;
            r.skip(lt);
          } else if (lid == 10) {
            r.read_struct([&](std::int16_t iid, std::uint8_t it) {
              if (iid == 2) {
                e.logical_unsigned = !r.read_bool_field(it);
              } else {
                r.skip(it);
              }
            });
          } else {
            r.skip(lt);
          }
        });
        break;
      default: r.skip(t);
    }
  });
  return e;
}

ColumnChunkMeta parse_column_meta(CompactReader& r) {
  ColumnChunkMeta m;
  r.read_struct([&](std::int16_t id, std::uint8_t t) {
    switch (id) {
      case 1: m.type = static_cast<PhysicalType>(r.read_i32()); break;
      case 3: {
        const auto h = r.read_list_header();
        for (std::size_t i = 0; i < h.size; ++i) m.path.push_back(r.read_binary());
        break;
      }
      case 4: m.codec = static_cast<Codec>(r.read_i32()); break;
      case 5: m.num_values = r.read_i64(); break;
      case 7: m.total_compressed_size = r.read_i64(); break;
      case 9: m.data_page_offset = r.read_i64(); break;
      case 11: m.dictionary_page_offset = r.read_i64(); break;
      default: r.skip(t);
    }
  });
  return m;
}

RowGroupMeta parse_row_group(CompactReader& r) {
  RowGroupMeta g;
  r.read_struct([&](std::int16_t id, std::uint8_t t) {
    if (id == 1) {
      const auto h = r.read_list_header();
      for (std::size_t i = 0; i < h.size; ++i) {
        bool have_meta = false;
        ColumnChunkMeta meta;
        r.read_struct([&](std::int16_t cid, std::uint8_t ct) {
          if (cid == 3) {
            meta = parse_column_meta(r);
            have_meta = true;
          } else {
            r.skip(ct);
          }
        });
        if (!have_meta) unsupported("column chunk without inline metadata");
        g.columns.push_back(std::move(meta));
      }
    } else if (id == 3) {
      g.num_rows = r.read_i64();
    } else {
      r.skip(t);
    }
  });
  return g;
}

PageHeader parse_page_header(CompactReader& r) {
  PageHeader h;
  r.read_struct([&](std::int16_t id, std::uint8_t t) {
    switch (id) {
      case 1: h.type = r.read_i32(); break;
      case 2: h.uncompressed_size = r.read_i32(); break;
      case 3: h.compressed_size = r.read_i32(); break;
      case 5:
        r.read_struct([&](std::int16_t f, std::uint8_t ft) {
          switch (f) {
            case 1: h.num_values = r.read_i32(); break;
            case 2: h.encoding = r.read_i32(); break;
            case 3: h.def_encoding = r.read_i32(); break;
            case 4: h.rep_encoding = r.read_i32(); break;
            default: r.skip(ft);
          }
        });
        break;
      case 7:
        r.read_struct([&](std::int16_t f, std::uint8_t ft) {
          switch (f) {
            case 1: h.num_values = r.read_i32(); break;
            case 2: h.encoding = r.read_i32(); break;
            default: r.skip(ft);
          }
        });
        break;
      case 8:
        r.read_struct([&](std::int16_t f, std::uint8_t ft) {
          switch (f) {
            case 1: h.num_values = r.read_i32(); break;
            case 2: h.num_nulls = r.read_i32(); break;
            case 4: h.encoding = r.read_i32(); break;
            case 5: h.def_length = r.read_i32(); break;
            case 6: h.rep_length = r.read_i32(); break;
            case 7: h.is_compressed = r.read_bool_field(ft); break;
            default: r.skip(ft);
          }
        });
        break;
      default: r.skip(t);
    }
  });
  return h;
}

// ---------------------------------------------------------------- decoding

std::vector<std::uint8_t> decompress(Codec codec, std::span<const std::uint8_t> in,
                                     std::size_t expected) {
  switch (codec) {
    case Codec::Uncompressed:
      return {in.begin(), in.end()};
    case Codec::Snappy: {
      auto out = snappy_decompress(in);
      if (out.size() != expected) corrupt("snappy page size mismatch");
      return out;
    }
    case Codec::Gzip: {
      std::vector<std::uint8_t> out(expected);
      z_stream zs{};
      if (inflateInit2(&zs, 15 + 32) != Z_OK) corrupt("zlib init failed");
      zs.next_in = const_cast<Bytef*>(in.data());
      zs.avail_in = static_cast<uInt>(in.size());
      zs.next_out = out.data();
      zs.avail_out = static_cast<uInt>(out.size());
      const int rc = inflate(&zs, Z_FINISH);
      const std::size_t produced = zs.total_out;
      inflateEnd(&zs);
      if (rc != Z_STREAM_END || produced != expected) corrupt("gzip page inflate failed");
      return out;
    }
    default:
      unsupported("compression codec " + std::to_string(static_cast<int>(codec)) +
                  " (supported: uncompressed, snappy, gzip)");
  }
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> s) : s_(s) {}

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = byte();
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return v;
    }
    corrupt("varint too long");
  }
  std::uint8_t byte() {
    need(1);
    return s_[pos_++];
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto out = s_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::span<const std::uint8_t> rest() const { return s_.subspan(pos_); }
  void need(std::size_t n) const {
    if (n > s_.size() - pos_) corrupt("page data truncated");
  }

 private:
  std::span<const std::uint8_t> s_;
  std::size_t pos_ = 0;
};

// RLE / bit-packing hybrid.
template <class Out>
void decode_hybrid(std::span<const std::uint8_t> in, int bit_width, std::size_t count,
                   Out& out) {
  Cursor c(in);
  std::size_t produced = 0;
  const std::size_t value_bytes = static_cast<std::size_t>((bit_width + 7) / 8);
  while (produced < count) {
    const std::uint64_t header = c.varint();
    if (header & 1) {
      const std::size_t n = static_cast<std::size_t>(header >> 1) * 8;
      const auto packed = c.take(static_cast<std::size_t>(header >> 1) *
                                 static_cast<std::size_t>(bit_width));
      for (std::size_t i = 0; i < n && produced < count; ++i, ++produced) {
        std::uint64_t v = 0;
        for (int b = 0; b < bit_width; ++b) {
          const std::size_t bit = i * static_cast<std::size_t>(bit_width) +
                                  static_cast<std::size_t>(b);
          v |= static_cast<std::uint64_t>((packed[bit / 8] >> (bit % 8)) & 1u) << b;
        }
        out.push_back(static_cast<typename Out::value_type>(v));
      }
    } else {
      const std::size_t run = static_cast<std::size_t>(header >> 1);
      if (run == 0) corrupt("zero-length RLE run");
      const auto raw = c.take(value_bytes);
      std::uint64_t v = 0;
      for (std::size_t b = 0; b < value_bytes; ++b) {
        v |= static_cast<std::uint64_t>(raw[b]) << (8 * b);
      }
      for (std::size_t i = 0; i < run && produced < count; ++i, ++produced) {
        out.push_back(static_cast<typename Out::value_type>(v));
      }
    }
  }
}

Values empty_values(PhysicalType type) {
  switch (type) {
    case PhysicalType::Boolean: return std::vector<std::uint8_t>{};
    case PhysicalType::Int32: return std::vector<std::int32_t>{};
    case PhysicalType::Int64: return std::vector<std::int64_t>{};
    case PhysicalType::Float: return std::vector<float>{};
    case PhysicalType::Double: return std::vector<double>{};
    case PhysicalType::ByteArray: return std::vector<std::string>{};
    default: unsupported("physical type " + std::to_string(static_cast<int>(type)));
  }
}

template <class T>
void plain_fixed(Cursor& c, std::size_t n, std::vector<T>& out) {
  const auto raw = c.take(n * sizeof(T));
  const std::size_t base = out.size();
  out.resize(base + n);
  std::memcpy(out.data() + base, raw.data(), n * sizeof(T));
}

void decode_plain(std::span<const std::uint8_t> in, std::size_t n, Values& out) {
  Cursor c(in);
  std::visit(
      [&](auto& vec) {
        using T = typename std::decay_t<decltype(vec)>::value_type;
        if constexpr (std::is_same_v<T, std::string>) {
          for (std::size_t i = 0; i < n; ++i) {
            const auto len_bytes = c.take(4);
            const auto len = load_le<std::uint32_t>(len_bytes.data());
            const auto s = c.take(len);
            vec.emplace_back(reinterpret_cast<const char*>(s.data()), s.size());
          }
        } else if constexpr (std::is_same_v<T, std::uint8_t>) {
          const auto raw = c.take((n + 7) / 8);
          for (std::size_t i = 0; i < n; ++i) {
            vec.push_back(static_cast<std::uint8_t>((raw[i / 8] >> (i % 8)) & 1u));
          }
        } else {
          plain_fixed(c, n, vec);
        }
      },
      out);
}

void decode_dictionary(std::span<const std::uint8_t> in, std::size_t n,
                       const Values& dict, Values& out) {
  if (n == 0) return;
  Cursor c(in);
  const int width = c.byte();
  if (width > 32) corrupt("dictionary index bit width > 32");
  std::vector<std::uint32_t> idx;
  idx.reserve(n);
  decode_hybrid(c.rest(), width, n, idx);
  std::visit(
      [&](auto& vec) {
        using V = std::decay_t<decltype(vec)>;
        const auto* d = std::get_if<V>(&dict);
        if (d == nullptr) corrupt("dictionary type mismatch");
        for (std::uint32_t i : idx) {
          if (i >= d->size()) corrupt("dictionary index out of range");
          vec.push_back((*d)[i]);
        }
      },
      out);
}

void decode_values(std::int32_t encoding, std::span<const std::uint8_t> in,
                   std::size_t n, const std::optional<Values>& dict, Values& out) {
  if (encoding == kPlain) {
    decode_plain(in, n, out);
  } else if (encoding == kPlainDictionary || encoding == kRleDictionary) {
    if (!dict) corrupt("dictionary-encoded page without dictionary");
    decode_dictionary(in, n, *dict, out);
  } else {
    unsupported("value encoding " + std::to_string(encoding) +
                " (supported: PLAIN, PLAIN_DICTIONARY, RLE_DICTIONARY)");
  }
}

std::size_t count_present(const std::vector<std::int16_t>& defs, std::size_t from,
                          std::int16_t max_def) {
  return static_cast<std::size_t>(std::count(
      defs.begin() + static_cast<std::ptrdiff_t>(from), defs.end(), max_def));
}

// ---------------------------------------------------------------- encoding

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

// Levels as length-prefixed RLE runs (data page v1 layout).
void put_levels(std::vector<std::uint8_t>& out, const std::vector<std::int16_t>& levels,
                int bit_width) {
  std::vector<std::uint8_t> body;
  const std::size_t value_bytes = static_cast<std::size_t>((bit_width + 7) / 8);
  for (std::size_t i = 0; i < levels.size();) {
    std::size_t j = i;
    while (j < levels.size() && levels[j] == levels[i]) ++j;
    put_varint(body, static_cast<std::uint64_t>(j - i) << 1);
    for (std::size_t b = 0; b < value_bytes; ++b) {
      body.push_back(static_cast<std::uint8_t>(levels[i] >> (8 * b)));
    }
    i = j;
  }
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  out.insert(out.end(), body.begin(), body.end());
}

std::vector<std::uint8_t> compress(Codec codec, const std::vector<std::uint8_t>& in) {
  if (codec == Codec::Uncompressed) return in;
  if (codec != Codec::Gzip) unsupported("writer supports uncompressed and gzip only");
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    corrupt("zlib deflate init failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(in.size())) + 32);
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) corrupt("gzip deflate failed");
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Reader

Reader Reader::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MalformedFile, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return Reader(std::move(bytes));
}

Reader::Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
  parse_footer();
}

void Reader::parse_footer() {
  if (bytes_.size() < 12 || std::memcmp(bytes_.data(), kMagic, 4) != 0 ||
      std::memcmp(bytes_.data() + bytes_.size() - 4, kMagic, 4) != 0) {
    corrupt("missing PAR1 magic");
  }
  const auto meta_len = load_le<std::uint32_t>(bytes_.data() + bytes_.size() - 8);
  if (meta_len > bytes_.size() - 12) corrupt("footer length out of range");
  const std::size_t meta_start = bytes_.size() - 8 - meta_len;

  CompactReader r(std::span<const std::uint8_t>(bytes_).subspan(meta_start, meta_len));
  std::vector<SchemaElement> schema;
  r.read_struct([&](std::int16_t id, std::uint8_t t) {
    switch (id) {
      case 2: {
        const auto h = r.read_list_header();
        for (std::size_t i = 0; i < h.size; ++i) schema.push_back(parse_schema_element(r));
        break;
      }
      case 3: num_rows_ = r.read_i64(); break;
      case 4: {
        const auto h = r.read_list_header();
        for (std::size_t i = 0; i < h.size; ++i) row_groups_.push_back(parse_row_group(r));
        break;
      }
      default: r.skip(t);
    }
  });
  if (schema.empty()) corrupt("empty schema");

  std::size_t next = 1;
  std::vector<std::string> path;
  std::function<void(std::int32_t, std::int16_t, std::int16_t, std::int16_t)> walk =
      [&](std::int32_t children, std::int16_t def, std::int16_t rep, std::int16_t rdef) {
        for (std::int32_t c = 0; c < children; ++c) {
          if (next >= schema.size()) corrupt("schema tree truncated");
          const SchemaElement& e = schema[next++];
          const std::int16_t d = static_cast<std::int16_t>(
              def + (e.repetition != Repetition::Required ? 1 : 0));
          const std::int16_t p = static_cast<std::int16_t>(
              rep + (e.repetition == Repetition::Repeated ? 1 : 0));
          const std::int16_t rd = e.repetition == Repetition::Repeated ? d : rdef;
          path.push_back(e.name);
          if (e.type) {
            LeafColumn leaf;
            leaf.path = path;
            leaf.type = *e.type;
            leaf.max_def = d;
            leaf.max_rep = p;
            leaf.repeated_def = rd;
            const auto ct = e.converted_type.value_or(-1);
            leaf.is_unsigned = e.logical_unsigned || ct == kConvertedUint8 ||
                               ct == kConvertedUint16 || ct == kConvertedUint32 ||
                               ct == kConvertedUint64;
            leaf.is_string = e.logical_string || ct == kConvertedUtf8;
            leaves_.push_back(std::move(leaf));
          } else {
            walk(e.num_children, d, p, rd);
          }
          path.pop_back();
        }
      };
  walk(schema[0].num_children, 0, 0, -1);

  for (const auto& g : row_groups_) {
    if (g.columns.size() != leaves_.size()) corrupt("row group column count mismatch");
    for (std::size_t i = 0; i < leaves_.size(); ++i) {
      if (!g.columns[i].path.empty() && g.columns[i].path != leaves_[i].path) {
        corrupt("column chunk path does not match schema");
      }
    }
  }
}

std::optional<std::size_t> Reader::find_leaf(const std::string& name) const {
  for (std::size_t i = 0; i < leaves_.size(); ++i) {
    if (!leaves_[i].path.empty() && leaves_[i].path.front() == name) return i;
  }
  return std::nullopt;
}

ColumnData Reader::read(std::size_t leaf_index) const {
  const LeafColumn& leaf = leaves_.at(leaf_index);
  ColumnData out;
  out.values = empty_values(leaf.type);
  const int def_width = bit_width_for(leaf.max_def);
  const int rep_width = bit_width_for(leaf.max_rep);
  const std::span<const std::uint8_t> file(bytes_);

  for (const RowGroupMeta& g : row_groups_) {
    const ColumnChunkMeta& chunk = g.columns[leaf_index];
    if (chunk.type != leaf.type) corrupt("column chunk type differs from schema");
    std::int64_t pos = chunk.data_page_offset;
    if (chunk.dictionary_page_offset && *chunk.dictionary_page_offset > 0 &&
        *chunk.dictionary_page_offset < pos) {
      pos = *chunk.dictionary_page_offset;
    }
    std::optional<Values> dict;
    std::int64_t seen = 0;
    while (seen < chunk.num_values) {
      if (pos < 0 || static_cast<std::size_t>(pos) >= file.size()) {
        corrupt("page offset out of range");
      }
      CompactReader hr(file.subspan(static_cast<std::size_t>(pos)));
      const PageHeader h = parse_page_header(hr);
      const std::size_t body_start = static_cast<std::size_t>(pos) + hr.position();
      if (h.compressed_size < 0 || h.uncompressed_size < 0 ||
          static_cast<std::size_t>(h.compressed_size) > file.size() - body_start) {
        corrupt("page body out of range");
      }
      const auto body = file.subspan(body_start, static_cast<std::size_t>(h.compressed_size));
      pos = static_cast<std::int64_t>(body_start) + h.compressed_size;

      if (h.type == kDictionaryPage) {
        const auto raw = decompress(chunk.codec, body,
                                    static_cast<std::size_t>(h.uncompressed_size));
        dict = empty_values(leaf.type);
        decode_plain(raw, static_cast<std::size_t>(h.num_values), *dict);
        continue;
      }
      if (h.type == kIndexPage) continue;
      if (h.type != kDataPage && h.type != kDataPageV2) {
        unsupported("page type " + std::to_string(h.type));
      }

      const std::size_t n = static_cast<std::size_t>(h.num_values);
      const std::size_t level_start = out.def_levels.size();
      std::vector<std::uint8_t> raw;
      std::span<const std::uint8_t> values_span;

      if (h.type == kDataPage) {
        raw = decompress(chunk.codec, body, static_cast<std::size_t>(h.uncompressed_size));
        Cursor c(raw);
        if (leaf.max_rep > 0) {
          if (h.rep_encoding != kRle) unsupported("non-RLE repetition levels");
          const auto len = load_le<std::uint32_t>(c.take(4).data());
          decode_hybrid(c.take(len), rep_width, n, out.rep_levels);
        }
        if (leaf.max_def > 0) {
          if (h.def_encoding != kRle) unsupported("non-RLE definition levels");
          const auto len = load_le<std::uint32_t>(c.take(4).data());
          decode_hybrid(c.take(len), def_width, n, out.def_levels);
        }
        values_span = c.rest();
      } else {
        const std::size_t levels_len =
            static_cast<std::size_t>(h.rep_length) + static_cast<std::size_t>(h.def_length);
        if (h.rep_length < 0 || h.def_length < 0 || levels_len > body.size()) {
          corrupt("v2 level lengths out of range");
        }
        if (leaf.max_rep > 0) {
          decode_hybrid(body.subspan(0, static_cast<std::size_t>(h.rep_length)), rep_width, n,
                        out.rep_levels);
        }
        if (leaf.max_def > 0) {
          decode_hybrid(body.subspan(static_cast<std::size_t>(h.rep_length),
                                     static_cast<std::size_t>(h.def_length)),
                        def_width, n, out.def_levels);
        }
        const auto payload = body.subspan(levels_len);
        if (h.is_compressed && chunk.codec != Codec::Uncompressed) {
          raw = decompress(chunk.codec, payload,
                           static_cast<std::size_t>(h.uncompressed_size) - levels_len);
          values_span = raw;
        } else {
          values_span = payload;
        }
      }

      const std::size_t present =
          leaf.max_def > 0 ? count_present(out.def_levels, level_start, leaf.max_def) : n;
      decode_values(h.encoding, values_span, present, dict, out.values);
      out.num_slots += n;
      seen += h.num_values;
    }
  }
  return out;
}

// ---------------------------------------------------------------- Writer

void Writer::check_rows(std::size_t rows) const {
  if (!columns_.empty() && rows != row_count()) {
    fail(ErrorCode::InvalidArgument, "parquet writer: column length mismatch");
  }
}

std::size_t Writer::row_count() const {
  if (columns_.empty()) return 0;
  const Column& c = columns_.front();
  switch (c.kind) {
    case Column::Kind::UInt32: return c.i32.size();
    case Column::Kind::Int64: return c.i64.size();
    case Column::Kind::Double: return c.f64.size();
    case Column::Kind::String: return c.str.size();
    case Column::Kind::FloatList: return c.width == 0 ? 0 : c.f32.size() / c.width;
  }
  return 0;
}

void Writer::add_uint32(const std::string& name, std::vector<std::uint32_t> values) {
  check_rows(values.size());
  Column c{name, PhysicalType::Int32, Column::Kind::UInt32, {}, {}, {}, {}, {}, 0};
  c.i32.reserve(values.size());
  for (std::uint32_t v : values) c.i32.push_back(static_cast<std::int32_t>(v));
  columns_.push_back(std::move(c));
}

void Writer::add_int64(const std::string& name, std::vector<std::int64_t> values) {
  check_rows(values.size());
  Column c{name, PhysicalType::Int64, Column::Kind::Int64, {}, std::move(values), {}, {}, {}, 0};
  columns_.push_back(std::move(c));
}

void Writer::add_double(const std::string& name, std::vector<double> values) {
  check_rows(values.size());
  Column c{name, PhysicalType::Double, Column::Kind::Double, {}, {}, std::move(values), {}, {}, 0};
  columns_.push_back(std::move(c));
}

void Writer::add_string(const std::string& name, std::vector<std::string> values) {
  check_rows(values.size());
  Column c{name, PhysicalType::ByteArray, Column::Kind::String, {}, {}, {}, std::move(values), {}, 0};
  columns_.push_back(std::move(c));
}

void Writer::add_float_list(const std::string& name, std::vector<float> flat,
                            std::size_t width) {
  if (width == 0 ? !flat.empty() : flat.size() % width != 0) {
    fail(ErrorCode::InvalidArgument, "parquet writer: list payload not a multiple of width");
  }
  check_rows(width == 0 ? 0 : flat.size() / width);
  Column c{name, PhysicalType::Float, Column::Kind::FloatList, {}, {}, {}, {}, std::move(flat), width};
  columns_.push_back(std::move(c));
}

std::vector<std::uint8_t> Writer::serialize() const {
  const std::size_t rows = row_count();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);

  struct ChunkInfo {
    std::int64_t offset;
    std::int64_t num_values;
    std::int64_t uncompressed;
    std::int64_t compressed;
  };
  std::vector<ChunkInfo> chunks;
  std::int64_t total_bytes = 0;

  for (const Column& col : columns_) {
    const std::size_t row_bytes = [&]() -> std::size_t {
      switch (col.kind) {
        case Column::Kind::UInt32: return 4;
        case Column::Kind::Int64:
        case Column::Kind::Double: return 8;
        case Column::Kind::String: return 32;
        case Column::Kind::FloatList: return 4 * std::max<std::size_t>(col.width, 1) + 2;
      }
      return 8;
    }();
    const std::size_t rows_per_page = std::max<std::size_t>(1, (1u << 20) / row_bytes);

    ChunkInfo info{static_cast<std::int64_t>(out.size()), 0, 0, 0};
    for (std::size_t r0 = 0; r0 < rows; r0 += rows_per_page) {
      const std::size_t r1 = std::min(rows, r0 + rows_per_page);
      std::vector<std::uint8_t> page;
      std::size_t slots = r1 - r0;
      switch (col.kind) {
        case Column::Kind::UInt32:
          for (std::size_t r = r0; r < r1; ++r) put_u32(page, static_cast<std::uint32_t>(col.i32[r]));
          break;
        case Column::Kind::Int64:
          for (std::size_t r = r0; r < r1; ++r) {
            const auto v = static_cast<std::uint64_t>(col.i64[r]);
            for (int b = 0; b < 8; ++b) page.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
          }
          break;
        case Column::Kind::Double:
          for (std::size_t r = r0; r < r1; ++r) {
            std::uint64_t v;
            std::memcpy(&v, &col.f64[r], 8);
            for (int b = 0; b < 8; ++b) page.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
          }
          break;
        case Column::Kind::String:
          for (std::size_t r = r0; r < r1; ++r) {
            put_u32(page, static_cast<std::uint32_t>(col.str[r].size()));
            page.insert(page.end(), col.str[r].begin(), col.str[r].end());
          }
          break;
        case Column::Kind::FloatList: {
          slots = (r1 - r0) * col.width;
          std::vector<std::int16_t> rep(slots, 1), def(slots, 1);
          for (std::size_t r = 0; r < r1 - r0; ++r) rep[r * col.width] = 0;
          put_levels(page, rep, 1);
          put_levels(page, def, 1);
          const std::size_t base = page.size();
          page.resize(base + slots * 4);
          std::memcpy(page.data() + base, col.f32.data() + r0 * col.width, slots * 4);
          break;
        }
      }
      const auto body = compress(codec_, page);

      CompactWriter w;
      w.begin_struct();
      w.field_i32(1, kDataPage);
      w.field_i32(2, static_cast<std::int32_t>(page.size()));
      w.field_i32(3, static_cast<std::int32_t>(body.size()));
      w.field_struct(5);
      w.begin_struct();
      w.field_i32(1, static_cast<std::int32_t>(slots));
      w.field_i32(2, kPlain);
      w.field_i32(3, kRle);
      w.field_i32(4, kRle);
      w.end_struct();
      w.end_struct();
      const auto& header = w.bytes();

      out.insert(out.end(), header.begin(), header.end());
      out.insert(out.end(), body.begin(), body.end());
      info.num_values += static_cast<std::int64_t>(slots);
      info.uncompressed += static_cast<std::int64_t>(header.size() + page.size());
      info.compressed += static_cast<std::int64_t>(header.size() + body.size());
    }
    total_bytes += info.uncompressed;
    chunks.push_back(info);
  }

  CompactWriter w;
  w.begin_struct();
  w.field_i32(1, 1);
  // schema
  std::size_t n_elements = 1;
  for (const Column& c : columns_) n_elements += c.kind == Column::Kind::FloatList ? 3 : 1;
  w.field_list(2, thrift::kStruct, n_elements);
  w.begin_struct();
  w.field_binary(4, "schema");
  w.field_i32(5, static_cast<std::int32_t>(columns_.size()));
  w.end_struct();
  for (const Column& c : columns_) {
    if (c.kind == Column::Kind::FloatList) {
      w.begin_struct();
      w.field_i32(3, static_cast<std::int32_t>(Repetition::Required));
      w.field_binary(4, c.name);
      w.field_i32(5, 1);
      w.field_i32(6, kConvertedList);
      w.field_struct(10);
      w.begin_struct();
      w.field_struct(3);
      w.begin_struct();
      w.end_struct();
      w.end_struct();
      w.end_struct();

      w.begin_struct();
      w.field_i32(3, static_cast<std::int32_t>(Repetition::Repeated));
      w.field_binary(4, "list");
      w.field_i32(5, 1);
      w.end_struct();

      w.begin_struct();
      w.field_i32(1, static_cast<std::int32_t>(PhysicalType::Float));
      w.field_i32(3, static_cast<std::int32_t>(Repetition::Required));
      w.field_binary(4, "element");
      w.end_struct();
      continue;
    }
    w.begin_struct();
    w.field_i32(1, static_cast<std::int32_t>(c.type));
    w.field_i32(3, static_cast<std::int32_t>(Repetition::Required));
    w.field_binary(4, c.name);
    if (c.kind == Column::Kind::UInt32) {
      w.field_i32(6, kConvertedUint32);
      w.field_struct(10);
      w.begin_struct();
      w.field_struct(10);
      w.begin_struct();
      w.field_byte(1, 32);
      w.field_bool(2, false);
      w.end_struct();
      w.end_struct();
    } else if (c.kind == Column::Kind::String) {
      w.field_i32(6, kConvertedUtf8);
      w.field_struct(10);
      w.begin_struct();
      w.field_struct(1);
      w.begin_struct();
      w.end_struct();
      w.end_struct();
    }
    w.end_struct();
  }
  w.field_i64(3, static_cast<std::int64_t>(rows));
  // row groups: none for an empty table
  w.field_list(4, thrift::kStruct, rows == 0 ? 0 : 1);
  if (rows > 0) {
    w.begin_struct();
    w.field_list(1, thrift::kStruct, columns_.size());
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      const Column& c = columns_[i];
      const ChunkInfo& info = chunks[i];
      w.begin_struct();
      w.field_i64(2, info.offset);
      w.field_struct(3);
      w.begin_struct();
      w.field_i32(1, static_cast<std::int32_t>(c.type));
      w.field_list(2, thrift::kI32, 2);
      w.value_i32(kPlain);
      w.value_i32(kRle);
      if (c.kind == Column::Kind::FloatList) {
        w.field_list(3, thrift::kBinary, 3);
        w.value_binary(c.name);
        w.value_binary("list");
        w.value_binary("element");
      } else {
        w.field_list(3, thrift::kBinary, 1);
        w.value_binary(c.name);
      }
      w.field_i32(4, static_cast<std::int32_t>(codec_));
      w.field_i64(5, info.num_values);
      w.field_i64(6, info.uncompressed);
      w.field_i64(7, info.compressed);
      w.field_i64(9, info.offset);
      w.end_struct();
      w.end_struct();
    }
    w.field_i64(2, total_bytes);
    w.field_i64(3, static_cast<std::int64_t>(rows));
    w.end_struct();
  }
  w.field_binary(6, "latentkit parquet writer");
  w.end_struct();

  const auto& meta = w.bytes();
  out.insert(out.end(), meta.begin(), meta.end());
  put_u32(out, static_cast<std::uint32_t>(meta.size()));
  out.insert(out.end(), kMagic, kMagic + 4);
  return out;
}

void Writer::write(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::InvalidArgument, "short write to " + path.string());
}

}  // namespace latentkit::detail::parquet
