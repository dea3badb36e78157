#include "latentkit/registry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "latentkit/error.hpp"
#include "latentkit/text.hpp"
#include "parquet.hpp"

namespace latentkit {
namespace {

namespace pq = detail::parquet;

std::optional<std::int64_t> parse_count(const std::string& s) {
  if (const auto v = text::parse_int(s)) return *v >= 1 ? v : std::nullopt;
  // pandas writes integer columns with gaps as floats ("86567656.0").
  if (const auto d = text::parse_double(s)) {
    if (std::isfinite(*d) && *d >= 1 && *d < 9.2e18 && std::floor(*d) == *d) {
      return static_cast<std::int64_t>(*d);
    }
  }
  return std::nullopt;
}

RegistryEntry make_entry(std::string name, std::map<std::string, std::string> raw) {
  RegistryEntry e;
  e.model_name = std::move(name);
  for (auto& [key, value] : raw) {
    if (!is_missing_text(value)) e.fields.emplace(key, std::move(value));
  }
  if (const auto it = e.fields.find("num_parameters"); it != e.fields.end()) {
    e.num_parameters = parse_count(it->second);
  }
  if (const auto it = e.fields.find("latent_dim"); it != e.fields.end()) {
    e.latent_dim = parse_count(it->second);
  }
  return e;
}

ModelRegistry load_csv(const std::filesystem::path& path) {
  text::CsvReader reader(path);
  const auto header = text::read_header(reader);
  const auto key = header.find("model_name");
  if (!key) fail(ErrorCode::MissingKeyColumn, path.string() + ": no 'model_name' column");
  std::vector<RegistryEntry> entries;
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != header.names.size()) {
      fail(ErrorCode::MalformedFile, path.string() + ":" + std::to_string(reader.line()) +
                                         ": field count differs from header");
    }
    std::map<std::string, std::string> raw;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i != *key) raw[header.names[i]] = fields[i];
    }
    entries.push_back(make_entry(fields[*key], std::move(raw)));
  }
  return ModelRegistry(std::move(entries));
}

std::vector<std::optional<std::string>> column_as_text(const pq::Reader& r, std::size_t leaf) {
  const auto& meta = r.leaves()[leaf];
  const auto data = r.read(leaf);
  std::vector<std::optional<std::string>> out;
  out.reserve(data.num_slots);
  std::size_t next = 0;
  std::visit(
      [&](const auto& values) {
        using T = typename std::decay_t<decltype(values)>::value_type;
        for (std::size_t s = 0; s < data.num_slots; ++s) {
          if (meta.max_def > 0 && data.def_levels[s] != meta.max_def) {
            out.emplace_back();
            continue;
          }
          const T& v = values[next++];
          if constexpr (std::is_same_v<T, std::string>) {
            out.emplace_back(v);
          } else if constexpr (std::is_same_v<T, std::uint8_t>) {
            out.emplace_back(v ? "true" : "false");
          } else if constexpr (std::is_same_v<T, std::int32_t>) {
            out.emplace_back(meta.is_unsigned ? std::to_string(static_cast<std::uint32_t>(v))
                                              : std::to_string(v));
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            out.emplace_back(std::to_string(v));
          } else if constexpr (std::is_same_v<T, float>) {
            out.emplace_back(text::format_float(v));
          } else {
            out.emplace_back(text::format_double(v));
          }
        }
      },
      data.values);
  return out;
}

ModelRegistry load_parquet(const std::filesystem::path& path) {
  const auto reader = pq::Reader::open(path);
  const auto key = reader.find_leaf("model_name");
  if (!key) fail(ErrorCode::MissingKeyColumn, path.string() + ": no 'model_name' column");
  const auto n = static_cast<std::size_t>(reader.num_rows());
  std::vector<std::pair<std::string, std::vector<std::optional<std::string>>>> columns;
  for (std::size_t i = 0; i < reader.leaves().size(); ++i) {
    const auto& leaf = reader.leaves()[i];
    if (leaf.max_rep > 0 || leaf.path.size() != 1) continue;  // nested columns are not registry fields
    columns.emplace_back(leaf.path.front(), column_as_text(reader, i));
    if (columns.back().second.size() != n) {
      fail(ErrorCode::MalformedFile, path.string() + ": column length differs from row count");
    }
  }
  std::vector<RegistryEntry> entries;
  entries.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::optional<std::string> name;
    std::map<std::string, std::string> raw;
    for (const auto& [col, values] : columns) {
      if (col == "model_name") {
        name = values[r];
      } else if (values[r]) {
        raw[col] = *values[r];
      }
    }
    if (!name || name->empty()) {
      fail(ErrorCode::MalformedFile, path.string() + ": null model_name in row " + std::to_string(r));
    }
    entries.push_back(make_entry(*name, std::move(raw)));
  }
  return ModelRegistry(std::move(entries));
}

}  // namespace

bool is_missing_text(std::string_view value) {
  const auto v = text::trim(value);
  if (v.empty()) return true;
  std::string lower(v);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower == "na" || lower == "nan" || lower == "null" || lower == "none" || lower == "<na>";
}

std::optional<std::string> RegistryEntry::field(const std::string& name) const {
  if (const auto it = fields.find(name); it != fields.end()) return it->second;
  const auto dot = model_name.find('.');
  if (name == "architecture") return model_name.substr(0, dot);
  if (name == "pretrain_config" && dot != std::string::npos && dot + 1 < model_name.size()) {
    return model_name.substr(dot + 1);
  }
  return std::nullopt;
}

ModelRegistry::ModelRegistry(std::vector<RegistryEntry> entries) : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end(),
            [](const RegistryEntry& a, const RegistryEntry& b) { return a.model_name < b.model_name; });
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].model_name == entries_[i - 1].model_name) {
      fail(ErrorCode::DuplicateModelName, "model_name '" + entries_[i].model_name + "' appears twice");
    }
  }
}

const RegistryEntry* ModelRegistry::find(const std::string& model_name) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), model_name,
      [](const RegistryEntry& e, const std::string& name) { return e.model_name < name; });
  return it != entries_.end() && it->model_name == model_name ? &*it : nullptr;
}

ModelRegistry load_registry(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".parquet" || ext == ".pq") return load_parquet(path);
  if (ext == ".csv") return load_csv(path);
  fail(ErrorCode::UnsupportedFormat, "registry must be .csv or .parquet: " + path.string());
}

std::optional<RegistryIssue> validate_against_registry(const EmbeddingTable& table,
                                                       const ModelRegistry& registry) {
  const RegistryEntry* e = registry.find(table.model_name());
  if (e == nullptr) {
    return RegistryIssue{RegistryIssue::Kind::UnknownModel,
                         "model '" + table.model_name() + "' is not in the registry"};
  }
  if (!e->latent_dim) {
    return RegistryIssue{RegistryIssue::Kind::MissingLatentDim,
                         "registry has no latent_dim for '" + e->model_name + "'"};
  }
  if (static_cast<std::int64_t>(table.dim()) != *e->latent_dim) {
    return RegistryIssue{RegistryIssue::Kind::LatentDimMismatch,
                         "'" + e->model_name + "': embedding width " + std::to_string(table.dim()) +
                             " but registry latent_dim " + std::to_string(*e->latent_dim)};
  }
  return std::nullopt;
}

}  // namespace latentkit
