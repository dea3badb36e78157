#include "latentkit/concepts.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "latentkit/error.hpp"
#include "latentkit/hungarian.hpp"
#include "latentkit/kmeans.hpp"
#include "latentkit/seeding.hpp"

namespace latentkit {
namespace {

constexpr std::uint64_t kSamplingStream = 1000;

Matrix prototype_matrix(const Matrix& x, const AnchorSets& sets, const PsiMap& psi) {
  Matrix p;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    Matrix rows(static_cast<Eigen::Index>(sets[i].size()), x.cols());
    for (std::size_t r = 0; r < sets[i].size(); ++r) {
      rows.row(static_cast<Eigen::Index>(r)) = x.row(sets[i][r]);
    }
    const Matrix mapped = psi ? psi(rows) : rows;
    if (mapped.rows() != rows.rows()) {
      fail(ErrorCode::InvalidArgument, "psi must map each row to one row");
    }
    if (i == 0) p.resize(static_cast<Eigen::Index>(sets.size()), mapped.cols());
    if (mapped.cols() != p.cols()) fail(ErrorCode::InvalidArgument, "psi output width varies");
    p.row(static_cast<Eigen::Index>(i)) = mapped.colwise().mean();
  }
  return p;
}

int cluster_count(const std::vector<int>& assign) {
  int k = 0;
  for (int a : assign) {
    if (a < 0) fail(ErrorCode::InvalidArgument, "cluster labels must be non-negative");
    k = std::max(k, a + 1);
  }
  return k;
}

}  // namespace

Prototypes prototypical_anchors(const Matrix& x, int kappa, const AnchorOptions& options) {
  const Eigen::Index n = x.rows();
  if (kappa < 1) fail(ErrorCode::InvalidArgument, "kappa must be >= 1");
  if (options.rho && *options.rho < 1) fail(ErrorCode::InvalidArgument, "rho must be >= 1");

  Prototypes out;
  if (options.existing) {
    const AnchorSets& sets = *options.existing;
    if (static_cast<int>(sets.size()) != kappa) {
      fail(ErrorCode::InvalidArgument, "supplied anchor sets do not match kappa");
    }
    for (const auto& s : sets) {
      if (s.empty()) fail(ErrorCode::EmptyCluster, "supplied anchor set is empty");
      for (auto idx : s) {
        if (idx < 0 || idx >= n) fail(ErrorCode::InvalidArgument, "anchor index out of range");
      }
    }
    out.anchor_sets = sets;
    out.P = prototype_matrix(x, out.anchor_sets, options.psi);
    return out;
  }

  const std::int64_t need = static_cast<std::int64_t>(kappa) * options.rho.value_or(1);
  if (need > n) {
    fail(ErrorCode::TooFewSamples, "kappa*rho = " + std::to_string(need) + " exceeds " +
                                       std::to_string(n) + " rows");
  }

  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const std::uint64_t seed = attempt == 0 ? options.seed : mix_seed(options.seed, attempt);
    KMeansResult km = kmeans(x, kappa, seed);
    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(kappa));
    for (Eigen::Index i = 0; i < n; ++i) {
      members[static_cast<std::size_t>(km.assignment[static_cast<std::size_t>(i)])].push_back(i);
    }
    const std::size_t smallest =
        std::min_element(members.begin(), members.end(), [](const auto& a, const auto& b) {
          return a.size() < b.size();
        })->size();
    if (smallest < static_cast<std::size_t>(options.rho.value_or(1))) continue;

    std::mt19937_64 rng(mix_seed(seed, kSamplingStream));
    out.anchor_sets.clear();
    for (auto& m : members) {
      if (options.rho) {
        std::shuffle(m.begin(), m.end(), rng);
        m.resize(static_cast<std::size_t>(*options.rho));
        std::sort(m.begin(), m.end());
      }
      out.anchor_sets.push_back(std::move(m));
    }
    out.assignment = std::move(km.assignment);
    out.clustering_attempts = attempt + 1;
    out.P = prototype_matrix(x, out.anchor_sets, options.psi);
    return out;
  }
  fail(ErrorCode::EmptyCluster, "a cluster had fewer than rho=" +
                                    std::to_string(options.rho.value_or(1)) + " members after " +
                                    std::to_string(options.max_retries + 1) + " clustering attempts");
}

Matrix jaccard_matrix(const std::vector<int>& assign_a, const std::vector<int>& assign_b) {
  if (assign_a.size() != assign_b.size()) {
    fail(ErrorCode::LengthMismatch, "assignments have lengths " + std::to_string(assign_a.size()) +
                                        " and " + std::to_string(assign_b.size()));
  }
  const int ka = cluster_count(assign_a);
  const int kb = cluster_count(assign_b);
  Matrix inter = Matrix::Zero(ka, kb);
  Vector size_a = Vector::Zero(ka);
  Vector size_b = Vector::Zero(kb);
  for (std::size_t i = 0; i < assign_a.size(); ++i) {
    inter(assign_a[i], assign_b[i]) += 1.0;
    size_a(assign_a[i]) += 1.0;
    size_b(assign_b[i]) += 1.0;
  }
  Matrix j = Matrix::Zero(ka, kb);
  for (int a = 0; a < ka; ++a) {
    for (int b = 0; b < kb; ++b) {
      const double uni = size_a(a) + size_b(b) - inter(a, b);
      if (uni > 0) j(a, b) = inter(a, b) / uni;
    }
  }
  return j;
}

std::string_view to_string(MatchScheme scheme) {
  switch (scheme) {
    case MatchScheme::Hungarian: return "hungarian";
    case MatchScheme::Injected: return "injected";
    case MatchScheme::Spectral: return "spectral";
  }
  return "unknown";
}

Matching hungarian_match(const Matrix& jaccard) {
  const Assignment a = solve_assignment(-jaccard);
  Matching m;
  m.scheme = MatchScheme::Hungarian;
  for (std::size_t i = 0; i < a.col_for_row.size(); ++i) {
    const int c = a.col_for_row[i];
    if (c < 0) continue;
    m.pairs.push_back({static_cast<int>(i), c, jaccard(static_cast<Eigen::Index>(i), c)});
  }
  double total = 0.0;
  for (const auto& p : m.pairs) total += p.similarity;
  m.mean_similarity = m.pairs.empty() ? 0.0 : total / static_cast<double>(m.pairs.size());
  return m;
}

Matching injected_match(const std::vector<int>& assign_a) {
  Matching m;
  m.scheme = MatchScheme::Injected;
  const int k = cluster_count(assign_a);
  m.groups.resize(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < assign_a.size(); ++i) {
    m.groups[static_cast<std::size_t>(assign_a[i])].push_back(static_cast<int>(i));
  }
  for (int j = 0; j < k; ++j) m.pairs.push_back({j, j, 1.0});
  m.mean_similarity = k > 0 ? 1.0 : 0.0;
  return m;
}

Matching spectral_match(const Matrix& jaccard, std::uint64_t seed) {
  linalg::require_finite(jaccard, "Jaccard matrix");
  if ((jaccard.array() < 0.0).any()) {
    fail(ErrorCode::InvalidArgument, "spectral matching needs non-negative similarities");
  }
  const Eigen::Index ka = jaccard.rows();
  const Eigen::Index kb = jaccard.cols();
  const Eigen::Index n = ka + kb;
  Matching m;
  m.scheme = MatchScheme::Spectral;
  if (n == 0) return m;

  Matrix adj = Matrix::Zero(n, n);
  adj.topRightCorner(ka, kb) = jaccard;
  adj.bottomLeftCorner(kb, ka) = jaccard.transpose();
  const Vector deg = adj.rowwise().sum();
  Vector dinv(n);
  for (Eigen::Index i = 0; i < n; ++i) dinv(i) = deg(i) > 0 ? 1.0 / std::sqrt(deg(i)) : 0.0;
  Matrix lap = -(dinv.asDiagonal() * adj * dinv.asDiagonal());
  lap.diagonal().array() += 1.0;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(lap);
  if (eig.info() != Eigen::Success) fail(ErrorCode::NonFiniteInput, "Laplacian eigensolve failed");
  m.eigenvalues = eig.eigenvalues();

  int k_est = 1;
  if (n >= 3) {
    Eigen::Index best = 1;
    double gap = -1.0;
    for (Eigen::Index l = 1; l <= n - 2; ++l) {
      const double g = m.eigenvalues(l + 1) - m.eigenvalues(l);
      if (g > gap) {
        gap = g;
        best = l;
      }
    }
    k_est = static_cast<int>(best) + 1;
  }
  m.k_est = k_est;

  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (deg(i) > 0) {
      active.push_back(i);
    } else {
      m.groups.push_back({static_cast<int>(i)});
    }
  }
  if (!active.empty()) {
    Matrix emb(static_cast<Eigen::Index>(active.size()), k_est);
    for (std::size_t r = 0; r < active.size(); ++r) {
      const auto row = eig.eigenvectors().row(active[r]).head(k_est);
      const double norm = row.norm();
      emb.row(static_cast<Eigen::Index>(r)) = norm > 0 ? Eigen::RowVectorXd(row / norm) : Eigen::RowVectorXd(row);
    }
    const int k = std::min<int>(k_est, static_cast<int>(active.size()));
    const KMeansResult km = kmeans(emb, k, seed);
    std::vector<std::vector<int>> groups(static_cast<std::size_t>(k));
    for (std::size_t r = 0; r < active.size(); ++r) {
      groups[static_cast<std::size_t>(km.assignment[r])].push_back(static_cast<int>(active[r]));
    }
    for (auto& g : groups) {
      if (!g.empty()) m.groups.push_back(std::move(g));
    }
  }
  std::sort(m.groups.begin(), m.groups.end());
  return m;
}

nlohmann::json Matching::to_json() const {
  nlohmann::json j;
  j["scheme"] = std::string(to_string(scheme));
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : pairs) j["pairs"].push_back({{"a", p.a}, {"b", p.b}, {"similarity", p.similarity}});
  j["mean_similarity"] = mean_similarity;
  j["groups"] = groups;
  if (scheme == MatchScheme::Spectral) {
    j["k_est"] = k_est;
    j["eigenvalues"] = std::vector<double>(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  }
  return j;
}

}  // namespace latentkit
