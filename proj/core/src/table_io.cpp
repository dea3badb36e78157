#include "latentkit/table_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "latentkit/error.hpp"
#include "latentkit/text.hpp"
#include "parquet.hpp"

namespace latentkit {
namespace {

namespace pq = detail::parquet;

std::uint32_t checked_id(std::int64_t v, const std::string& where) {
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::MalformedFile, where + ": id " + std::to_string(v) + " is not a uint32");
  }
  return static_cast<std::uint32_t>(v);
}

void parse_embedding(std::string_view s, std::vector<float>& out, const std::string& where) {
  out.clear();
  s = text::trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') {
    fail(ErrorCode::MalformedFile, where + ": embedding is not a JSON array");
  }
  s = text::trim(s.substr(1, s.size() - 2));
  if (s.empty()) return;
  while (true) {
    const auto comma = s.find(',');
    const auto tok = s.substr(0, comma);
    const auto v = text::parse_float(tok);
    if (!v) fail(ErrorCode::MalformedFile, where + ": bad embedding value '" + std::string(tok) + "'");
    out.push_back(*v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
}

std::string embedding_text(std::span<const float> e) {
  std::string out = "[";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out.push_back(',');
    const auto v = text::format_float(e[i]);
    // JSON readers parse "-0" as the integer 0.
    out += v == "-0" ? "-0.0" : v;
  }
  out.push_back(']');
  return out;
}

EmbeddingTable read_csv(const std::filesystem::path& path) {
  text::CsvReader reader(path);
  const auto header = text::read_header(reader);
  const auto id_col = header.find("id");
  const auto name_col = header.find("model_name");
  const auto emb_col = header.find("embedding");
  for (const auto& [col, name] : {std::pair{id_col, "id"}, std::pair{name_col, "model_name"},
                                  std::pair{emb_col, "embedding"}}) {
    if (!col) fail(ErrorCode::MissingColumn, path.string() + ": no '" + name + "' column");
  }
  std::vector<std::string> label_names;
  std::vector<std::size_t> label_cols;
  for (std::size_t i = 0; i < header.names.size(); ++i) {
    if (i != *id_col && i != *name_col && i != *emb_col) {
      label_names.push_back(header.names[i]);
      label_cols.push_back(i);
    }
  }
  EmbeddingTable table(label_names);
  std::vector<std::string> fields;
  std::vector<float> emb;
  std::vector<std::int64_t> labels(label_cols.size());
  while (reader.next(fields)) {
    const std::string where = path.string() + ":" + std::to_string(reader.line());
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.names.size()) {
      fail(ErrorCode::MalformedFile, where + ": expected " + std::to_string(header.names.size()) +
                                         " fields, got " + std::to_string(fields.size()));
    }
    const auto id = text::parse_int(fields[*id_col]);
    if (!id) fail(ErrorCode::MalformedFile, where + ": bad id '" + fields[*id_col] + "'");
    for (std::size_t c = 0; c < label_cols.size(); ++c) {
      const auto v = text::parse_int(fields[label_cols[c]]);
      if (!v) {
        fail(ErrorCode::MalformedFile,
             where + ": label '" + label_names[c] + "' is not an integer: '" + fields[label_cols[c]] + "'");
      }
      labels[c] = *v;
    }
    parse_embedding(fields[*emb_col], emb, where);
    table.append(checked_id(*id, where), labels, fields[*name_col], emb);
  }
  return table;
}

EmbeddingTable read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::MalformedFile, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::optional<EmbeddingTable> table;
  std::vector<std::string> label_names;
  std::vector<std::int64_t> labels;
  std::vector<float> emb;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    nlohmann::ordered_json row;
    try {
      row = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::MalformedFile, where + ": " + e.what());
    }
    if (!row.is_object()) fail(ErrorCode::MalformedFile, where + ": row is not an object");
    for (const char* key : {"id", "model_name", "embedding"}) {
      if (!row.contains(key)) fail(ErrorCode::MissingColumn, where + ": no '" + key + "' field");
    }
    if (!table) {
      for (const auto& [key, value] : row.items()) {
        if (key != "id" && key != "model_name" && key != "embedding") label_names.push_back(key);
      }
      table.emplace(label_names);
      labels.resize(label_names.size());
    }
    if (row.size() != label_names.size() + 3) {
      fail(ErrorCode::MissingColumn, where + ": row fields differ from the first row");
    }
    try {
      for (std::size_t c = 0; c < label_names.size(); ++c) {
        const auto& v = row.at(label_names[c]);
        if (!v.is_number_integer()) {
          fail(ErrorCode::MalformedFile, where + ": label '" + label_names[c] + "' is not an integer");
        }
        labels[c] = v.get<std::int64_t>();
      }
      const auto& id = row.at("id");
      if (!id.is_number_integer()) fail(ErrorCode::MalformedFile, where + ": id is not an integer");
      const auto& e = row.at("embedding");
      if (!e.is_array()) fail(ErrorCode::MalformedFile, where + ": embedding is not an array");
      emb.clear();
      for (const auto& v : e) {
        if (!v.is_number()) fail(ErrorCode::MalformedFile, where + ": non-numeric embedding value");
        emb.push_back(static_cast<float>(v.get<double>()));
      }
      table->append(checked_id(id.get<std::int64_t>(), where), labels,
                    row.at("model_name").get<std::string>(), emb);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::MalformedFile, where + ": " + e.what());
    }
  }
  return table ? std::move(*table) : EmbeddingTable{};
}

template <class T, class F>
void for_each_int(const pq::Values& values, F&& f) {
  if (const auto* v = std::get_if<std::vector<std::int32_t>>(&values)) {
    for (auto x : *v) f(static_cast<T>(x));
  } else if (const auto* w = std::get_if<std::vector<std::int64_t>>(&values)) {
    for (auto x : *w) f(static_cast<T>(x));
  } else {
    fail(ErrorCode::MalformedFile, "expected an integer column");
  }
}

std::vector<std::int64_t> read_int_column(const pq::Reader& r, std::size_t leaf,
                                          const std::string& name) {
  const auto& meta = r.leaves()[leaf];
  if (meta.max_rep != 0 || meta.path.size() != 1) {
    fail(ErrorCode::MalformedFile, "column '" + name + "' is not a flat column");
  }
  const auto data = r.read(leaf);
  if (meta.max_def > 0 &&
      std::any_of(data.def_levels.begin(), data.def_levels.end(),
                  [&](std::int16_t d) { return d != meta.max_def; })) {
    fail(ErrorCode::MalformedFile, "column '" + name + "' contains nulls");
  }
  std::vector<std::int64_t> out;
  out.reserve(data.num_slots);
  const bool u32 = meta.is_unsigned && meta.type == pq::PhysicalType::Int32;
  for_each_int<std::int64_t>(data.values, [&](std::int64_t v) {
    out.push_back(u32 ? static_cast<std::int64_t>(static_cast<std::uint32_t>(v)) : v);
  });
  return out;
}

EmbeddingTable read_parquet(const std::filesystem::path& path) {
  const auto reader = pq::Reader::open(path);
  const auto find = [&](const char* name) {
    const auto leaf = reader.find_leaf(name);
    if (!leaf) fail(ErrorCode::MissingColumn, path.string() + ": no '" + name + "' column");
    return *leaf;
  };
  const std::size_t id_leaf = find("id");
  const std::size_t name_leaf = find("model_name");
  const std::size_t emb_leaf = find("embedding");

  std::vector<std::string> label_names;
  std::vector<std::size_t> label_leaves;
  for (std::size_t i = 0; i < reader.leaves().size(); ++i) {
    if (i == id_leaf || i == name_leaf || i == emb_leaf) continue;
    label_names.push_back(reader.leaves()[i].path.front());
    label_leaves.push_back(i);
  }

  const auto n = static_cast<std::size_t>(reader.num_rows());
  const auto ids = read_int_column(reader, id_leaf, "id");
  std::vector<std::vector<std::int64_t>> label_values;
  for (std::size_t c = 0; c < label_leaves.size(); ++c) {
    label_values.push_back(read_int_column(reader, label_leaves[c], label_names[c]));
  }

  const auto& name_meta = reader.leaves()[name_leaf];
  const auto names_data = reader.read(name_leaf);
  const auto* names = std::get_if<std::vector<std::string>>(&names_data.values);
  if (names == nullptr || name_meta.max_rep != 0 || names->size() != n) {
    fail(ErrorCode::MalformedFile, path.string() + ": model_name must be a non-null string column");
  }

  const auto& emb_meta = reader.leaves()[emb_leaf];
  if (emb_meta.max_rep != 1) {
    fail(ErrorCode::MalformedFile, path.string() + ": embedding must be a list column");
  }
  const auto emb_data = reader.read(emb_leaf);
  std::vector<float> flat;
  if (const auto* f = std::get_if<std::vector<float>>(&emb_data.values)) {
    flat = *f;
  } else if (const auto* d = std::get_if<std::vector<double>>(&emb_data.values)) {
    flat.assign(d->begin(), d->end());
  } else {
    fail(ErrorCode::MalformedFile, path.string() + ": embedding elements must be float or double");
  }

  // Row boundaries from repetition levels; each row's element count from
  // definition levels (below repeated_def means an empty or null list).
  std::vector<std::size_t> row_len;
  row_len.reserve(n);
  for (std::size_t s = 0; s < emb_data.num_slots; ++s) {
    if (emb_data.rep_levels[s] == 0) row_len.push_back(0);
    if (row_len.empty()) fail(ErrorCode::MalformedFile, "embedding levels start mid-row");
    const std::int16_t def = emb_meta.max_def > 0 ? emb_data.def_levels[s] : 0;
    if (def >= emb_meta.repeated_def) {
      if (def != emb_meta.max_def) {
        fail(ErrorCode::MalformedFile, path.string() + ": null embedding element");
      }
      ++row_len.back();
    }
  }
  if (ids.size() != n || row_len.size() != n) {
    fail(ErrorCode::MalformedFile, path.string() + ": column lengths disagree with row count");
  }

  EmbeddingTable table(label_names);
  if (n > 0) table.reserve(n, row_len.front());
  std::vector<std::int64_t> labels(label_names.size());
  std::size_t offset = 0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < labels.size(); ++c) labels[c] = label_values[c][r];
    table.append(checked_id(ids[r], path.string()), labels, (*names)[r],
                 std::span<const float>(flat.data() + offset, row_len[r]));
    offset += row_len[r];
  }
  return table;
}

void write_csv(const EmbeddingTable& t, std::ostream& out) {
  out << "id";
  for (const auto& name : t.label_columns()) out << ',' << text::csv_field(name);
  out << ",model_name,embedding\n";
  for (std::size_t r = 0; r < t.size(); ++r) {
    out << t.ids()[r];
    for (std::size_t c = 0; c < t.label_columns().size(); ++c) out << ',' << t.labels(c)[r];
    out << ',' << text::csv_field(t.model_name()) << ','
        << text::csv_field(embedding_text(t.embedding(r))) << '\n';
  }
}

void write_jsonl(const EmbeddingTable& t, std::ostream& out) {
  const std::string name = nlohmann::json(t.model_name()).dump();
  for (std::size_t r = 0; r < t.size(); ++r) {
    out << "{\"id\":" << t.ids()[r];
    for (std::size_t c = 0; c < t.label_columns().size(); ++c) {
      out << ',' << nlohmann::json(t.label_columns()[c]).dump() << ':' << t.labels(c)[r];
    }
    out << ",\"model_name\":" << name << ",\"embedding\":" << embedding_text(t.embedding(r))
        << "}\n";
  }
}

void write_parquet(const EmbeddingTable& t, const std::filesystem::path& path,
                   ParquetCompression compression) {
  pq::Writer w(compression == ParquetCompression::Gzip ? pq::Codec::Gzip : pq::Codec::Uncompressed);
  w.add_uint32("id", t.ids());
  for (std::size_t c = 0; c < t.label_columns().size(); ++c) {
    w.add_int64(t.label_columns()[c], t.labels(c));
  }
  w.add_string("model_name", std::vector<std::string>(t.size(), t.model_name()));
  w.add_float_list("embedding", t.embeddings(), t.dim());
  w.write(path);
}

}  // namespace

std::optional<TableFormat> parse_table_format(std::string_view name) {
  if (name == "parquet") return TableFormat::Parquet;
  if (name == "csv") return TableFormat::Csv;
  if (name == "jsonl" || name == "ndjson") return TableFormat::Jsonl;
  return std::nullopt;
}

TableFormat table_format_for(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (!ext.empty()) ext.erase(0, 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (const auto f = parse_table_format(ext)) return *f;
  if (ext == "pq") return TableFormat::Parquet;
  fail(ErrorCode::UnsupportedFormat, "cannot infer table format from '" + path.string() + "'");
}

std::string_view to_string(TableFormat format) {
  switch (format) {
    case TableFormat::Parquet: return "parquet";
    case TableFormat::Csv: return "csv";
    case TableFormat::Jsonl: return "jsonl";
  }
  return "unknown";
}

EmbeddingTable read_embedding_table(const std::filesystem::path& path, TableFormat format) {
  switch (format) {
    case TableFormat::Parquet: return read_parquet(path);
    case TableFormat::Csv: return read_csv(path);
    case TableFormat::Jsonl: return read_jsonl(path);
  }
  fail(ErrorCode::UnsupportedFormat, "unknown table format");
}

EmbeddingTable read_embedding_table(const std::filesystem::path& path) {
  return read_embedding_table(path, table_format_for(path));
}

void write_embedding_table(const EmbeddingTable& table, const std::filesystem::path& path,
                           TableFormat format, ParquetCompression compression) {
  if (format == TableFormat::Parquet) {
    write_parquet(table, path, compression);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
  if (format == TableFormat::Csv) {
    write_csv(table, out);
  } else {
    write_jsonl(table, out);
  }
  if (!out) fail(ErrorCode::InvalidArgument, "short write to " + path.string());
}

}  // namespace latentkit
