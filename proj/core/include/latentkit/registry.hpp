#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latentkit/table.hpp"

namespace latentkit {

/// One registry row. Text fields that were empty or null-like on disk are
/// absent from `fields`.
struct RegistryEntry {
  std::string model_name;
  std::map<std::string, std::string> fields;
  std::optional<std::int64_t> num_parameters;
  std::optional<std::int64_t> latent_dim;

  /// Stored field, or the derived `architecture` (text before the first dot
  /// of model_name) and `pretrain_config` (text after it) when not stored.
  std::optional<std::string> field(const std::string& name) const;
};

class ModelRegistry {
 public:
  ModelRegistry() = default;
  /// Throws DuplicateModelName.
  explicit ModelRegistry(std::vector<RegistryEntry> entries);

  const RegistryEntry* find(const std::string& model_name) const;
  /// Sorted by model_name.
  const std::vector<RegistryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<RegistryEntry> entries_;
};

/// CSV or Parquet, chosen by extension. Throws MissingKeyColumn and
/// DuplicateModelName.
ModelRegistry load_registry(const std::filesystem::path& path);

bool is_missing_text(std::string_view value);

struct RegistryIssue {
  enum class Kind { UnknownModel, MissingLatentDim, LatentDimMismatch };
  Kind kind;
  std::string message;
};

/// Checks a table's model against the registry; nullopt when consistent.
std::optional<RegistryIssue> validate_against_registry(const EmbeddingTable& table,
                                                       const ModelRegistry& registry);

}  // namespace latentkit
