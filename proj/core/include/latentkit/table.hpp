#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "latentkit/linalg.hpp"

namespace latentkit {

/// Rows of one (model, dataset, split) file. Columnar storage; rows are
/// validated as they are appended.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::vector<std::string> label_columns);

  /// Throws RaggedEmbedding, DuplicateId or MixedModelName.
  void append(std::uint32_t id, std::span<const std::int64_t> labels,
              std::string_view model_name, std::span<const float> embedding);
  void reserve(std::size_t rows, std::size_t dim);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  /// Embedding width; 0 until the first row arrives.
  std::size_t dim() const { return dim_; }
  const std::string& model_name() const { return model_name_; }
  const std::vector<std::string>& label_columns() const { return label_columns_; }
  const std::vector<std::uint32_t>& ids() const { return ids_; }
  const std::vector<std::int64_t>& labels(std::size_t column) const {
    return labels_.at(column);
  }
  std::span<const float> embedding(std::size_t row) const {
    return {embeddings_.data() + row * dim_, dim_};
  }
  const std::vector<float>& embeddings() const { return embeddings_; }

 private:
  std::vector<std::string> label_columns_;
  std::string model_name_;
  std::size_t dim_ = 0;
  std::vector<std::uint32_t> ids_;
  std::vector<std::vector<std::int64_t>> labels_;
  std::vector<float> embeddings_;
  std::unordered_set<std::uint32_t> seen_;
};

/// Analysis view of one latent space: rows sorted by ascending id.
struct PointCloud {
  Matrix X;
  std::vector<std::uint32_t> ids;
  std::map<std::string, std::vector<std::int64_t>> labels;
  std::string model_name;

  Eigen::Index rows() const { return X.rows(); }
  Eigen::Index dim() const { return X.cols(); }
  /// Throws MissingColumn when the label column is absent.
  const std::vector<std::int64_t>& label(const std::string& column) const;
  PointCloud select(std::span<const Eigen::Index> rows) const;

  /// Synthetic cloud with ids 0..n-1 and an optional "label" column.
  static PointCloud from_matrix(Matrix x, std::vector<std::int64_t> label = {},
                                std::string model_name = {});
};

/// Throws EmptyTable.
PointCloud to_point_cloud(const EmbeddingTable& table);

struct PairedClouds {
  PointCloud A;
  PointCloud B;
};

enum class PairPolicy { Strict, Intersect };

/// Throws IdMismatch (strict), EmptyIntersection, LabelConflict, EmptyTable.
PairedClouds pair_by_id(const PointCloud& a, const PointCloud& b, PairPolicy policy);

}  // namespace latentkit
