#include "latentkit/table.hpp"

#include <algorithm>
#include <numeric>

#include "latentkit/error.hpp"

namespace latentkit {

EmbeddingTable::EmbeddingTable(std::vector<std::string> label_columns)
    : label_columns_(std::move(label_columns)), labels_(label_columns_.size()) {
  for (const auto& name : label_columns_) {
    if (name == "id" || name == "model_name" || name == "embedding") {
      fail(ErrorCode::InvalidArgument, "label column may not be named '" + name + "'");
    }
  }
}

void EmbeddingTable::reserve(std::size_t rows, std::size_t dim) {
  ids_.reserve(rows);
  for (auto& col : labels_) col.reserve(rows);
  embeddings_.reserve(rows * dim);
  seen_.reserve(rows);
}

void EmbeddingTable::append(std::uint32_t id, std::span<const std::int64_t> labels,
                            std::string_view model_name, std::span<const float> embedding) {
  if (labels.size() != label_columns_.size()) {
    fail(ErrorCode::MissingColumn, "row " + std::to_string(id) + " has " +
                                       std::to_string(labels.size()) + " labels, expected " +
                                       std::to_string(label_columns_.size()));
  }
  if (embedding.empty()) {
    fail(ErrorCode::RaggedEmbedding, "row " + std::to_string(id) + " has an empty embedding");
  }
  if (ids_.empty()) {
    dim_ = embedding.size();
    model_name_ = std::string(model_name);
  } else {
    if (embedding.size() != dim_) {
      fail(ErrorCode::RaggedEmbedding, "row " + std::to_string(id) + " has length " +
                                           std::to_string(embedding.size()) + ", expected " +
                                           std::to_string(dim_));
    }
    if (model_name != model_name_) {
      fail(ErrorCode::MixedModelName,
           "model_name '" + std::string(model_name) + "' differs from '" + model_name_ + "'");
    }
  }
  if (!seen_.insert(id).second) {
    fail(ErrorCode::DuplicateId, "id " + std::to_string(id) + " appears twice");
  }
  ids_.push_back(id);
  for (std::size_t c = 0; c < labels.size(); ++c) labels_[c].push_back(labels[c]);
  embeddings_.insert(embeddings_.end(), embedding.begin(), embedding.end());
}

const std::vector<std::int64_t>& PointCloud::label(const std::string& column) const {
  const auto it = labels.find(column);
  if (it == labels.end()) fail(ErrorCode::MissingColumn, "no label column '" + column + "'");
  return it->second;
}

PointCloud PointCloud::select(std::span<const Eigen::Index> rows) const {
  PointCloud out;
  out.model_name = model_name;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), X.cols());
  out.ids.reserve(rows.size());
  for (const auto& [name, col] : labels) out.labels[name].reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    out.X.row(static_cast<Eigen::Index>(i)) = X.row(r);
    out.ids.push_back(ids[static_cast<std::size_t>(r)]);
    for (const auto& [name, col] : labels) {
      out.labels[name].push_back(col[static_cast<std::size_t>(r)]);
    }
  }
  return out;
}

PointCloud PointCloud::from_matrix(Matrix x, std::vector<std::int64_t> label,
                                   std::string model_name) {
  if (!label.empty() && static_cast<Eigen::Index>(label.size()) != x.rows()) {
    fail(ErrorCode::DimensionMismatch, "label length differs from row count");
  }
  PointCloud out;
  out.ids.resize(static_cast<std::size_t>(x.rows()));
  std::iota(out.ids.begin(), out.ids.end(), 0u);
  out.X = std::move(x);
  if (!label.empty()) out.labels["label"] = std::move(label);
  out.model_name = std::move(model_name);
  return out;
}

PointCloud to_point_cloud(const EmbeddingTable& table) {
  if (table.empty()) fail(ErrorCode::EmptyTable, "cannot build a point cloud from an empty table");
  const std::size_t n = table.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& ids = table.ids();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

  PointCloud out;
  out.model_name = table.model_name();
  out.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(table.dim()));
  out.ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = table.embedding(order[i]);
    for (std::size_t j = 0; j < src.size(); ++j) {
      out.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = src[j];
    }
    out.ids[i] = ids[order[i]];
  }
  for (std::size_t c = 0; c < table.label_columns().size(); ++c) {
    const auto& col = table.labels(c);
    auto& dst = out.labels[table.label_columns()[c]];
    dst.resize(n);
    for (std::size_t i = 0; i < n; ++i) dst[i] = col[order[i]];
  }
  return out;
}

PairedClouds pair_by_id(const PointCloud& a, const PointCloud& b, PairPolicy policy) {
  if (a.ids.empty() || b.ids.empty()) fail(ErrorCode::EmptyTable, "pairing needs non-empty clouds");
  if (!std::is_sorted(a.ids.begin(), a.ids.end()) || !std::is_sorted(b.ids.begin(), b.ids.end())) {
    fail(ErrorCode::InvalidArgument, "point cloud ids must be sorted ascending");
  }
  std::vector<Eigen::Index> ra;
  std::vector<Eigen::Index> rb;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.ids.size() && j < b.ids.size()) {
    if (a.ids[i] == b.ids[j]) {
      ra.push_back(static_cast<Eigen::Index>(i++));
      rb.push_back(static_cast<Eigen::Index>(j++));
    } else if (a.ids[i] < b.ids[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  if (policy == PairPolicy::Strict && (ra.size() != a.ids.size() || rb.size() != b.ids.size())) {
    fail(ErrorCode::IdMismatch, "id sets differ (" + std::to_string(a.ids.size()) + " vs " +
                                    std::to_string(b.ids.size()) + " ids, " +
                                    std::to_string(ra.size()) + " shared)");
  }
  if (ra.empty()) fail(ErrorCode::EmptyIntersection, "clouds share no ids");

  for (const auto& [name, col_a] : a.labels) {
    const auto it = b.labels.find(name);
    if (it == b.labels.end()) continue;
    for (std::size_t r = 0; r < ra.size(); ++r) {
      const auto va = col_a[static_cast<std::size_t>(ra[r])];
      const auto vb = it->second[static_cast<std::size_t>(rb[r])];
      if (va != vb) {
        fail(ErrorCode::LabelConflict, "label '" + name + "' differs at id " +
                                           std::to_string(a.ids[static_cast<std::size_t>(ra[r])]));
      }
    }
  }
  return {a.select(ra), b.select(rb)};
}

}  // namespace latentkit
