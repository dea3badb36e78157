#include "latentkit/align.hpp"

#include <algorithm>
#include <string>

#include <nlohmann/json.hpp>

#include "json_matrix.hpp"
#include "latentkit/error.hpp"

namespace latentkit {
namespace {

constexpr double kGramFloor = 1e-6;
constexpr double kParsevalTol = 1e-6;
constexpr int kFormatVersion = 1;

void require_pair(const PairedClouds& pair) {
  if (pair.A.rows() != pair.B.rows()) {
    fail(ErrorCode::DimensionMismatch, "paired clouds have different row counts");
  }
  if (pair.A.rows() < 2) fail(ErrorCode::DegenerateInput, "alignment needs at least two rows");
}

void check_k(int k, Eigen::Index da, Eigen::Index db) {
  const Eigen::Index hi = std::min(da, db);
  if (k < 1 || k > hi) {
    fail(ErrorCode::KOutOfRange, "k=" + std::to_string(k) + " outside [1, " + std::to_string(hi) + "]");
  }
}

// F = P^T (P P^T)^{-1/2}; P is kappa x d.
Matrix parseval_frame(const Matrix& p, const char* side) {
  const Matrix gram = p * p.transpose();
  const Matrix f = p.transpose() * linalg::inverse_sqrt_psd(gram, kGramFloor);
  const Matrix defect = f.transpose() * f - Matrix::Identity(p.rows(), p.rows());
  const double worst = defect.cwiseAbs().maxCoeff();
  if (!(worst < kParsevalTol)) {
    fail(ErrorCode::RankDeficientAnchors,
         std::string(side) + " anchor Gram matrix is numerically singular (|F^T F - I|_max = " +
             std::to_string(worst) + ")");
  }
  return f;
}

CcaOperator cca_operator(const std::shared_ptr<const CcaBasis>& basis, const Vector& mu_a,
                         const Vector& mu_b, int k) {
  CcaOperator op;
  op.basis = basis;
  op.mu_A = mu_a;
  op.mu_B = mu_b;
  op.W_A = basis->saa_isqrt * basis->U.leftCols(k);
  op.W_B = basis->sbb_isqrt * basis->V.leftCols(k);
  op.W_B_pinv = linalg::pseudo_inverse(op.W_B);
  op.correlations = basis->correlations.head(k);
  return op;
}

}  // namespace

std::string_view to_string(AlignMethod method) {
  switch (method) {
    case AlignMethod::Ppfe: return "ppfe";
    case AlignMethod::Linear: return "linear";
    case AlignMethod::Cca: return "cca";
  }
  return "unknown";
}

std::optional<AlignMethod> parse_align_method(std::string_view name) {
  if (name == "ppfe") return AlignMethod::Ppfe;
  if (name == "linear") return AlignMethod::Linear;
  if (name == "cca") return AlignMethod::Cca;
  return std::nullopt;
}

Eigen::Index AlignmentMap::source_dim() const {
  return std::visit(
      [](const auto& o) -> Eigen::Index {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, PpfeOperator>) return o.F_T.rows();
        if constexpr (std::is_same_v<T, LinearOperator>) return o.svd->V.rows();
        if constexpr (std::is_same_v<T, CcaOperator>) return o.W_A.rows();
      },
      op);
}

Eigen::Index AlignmentMap::target_dim() const {
  return std::visit(
      [](const auto& o) -> Eigen::Index {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, PpfeOperator>) return o.F_R.rows();
        if constexpr (std::is_same_v<T, LinearOperator>) return o.svd->U.rows();
        if constexpr (std::is_same_v<T, CcaOperator>) return o.W_B.rows();
      },
      op);
}

Matrix AlignmentMap::right_operator() const {
  return std::visit(
      [this](const auto& o) -> Matrix {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, PpfeOperator>) {
          return o.F_T * o.F_R.transpose();
        } else if constexpr (std::is_same_v<T, LinearOperator>) {
          const auto& s = *o.svd;
          return s.V.leftCols(k) * s.sigma.head(k).asDiagonal() * s.U.leftCols(k).transpose();
        } else {
          return o.W_A * o.W_B_pinv;
        }
      },
      op);
}

AlignmentMap fit_ppfe(const PairedClouds& pair, int kappa, const PpfeOptions& options) {
  require_pair(pair);
  AlignmentMap m;
  const auto max_k = std::min(pair.A.dim(), pair.B.dim());
  if (kappa < 1 || kappa > max_k) {
    fail(ErrorCode::KOutOfRange, "kappa = " + std::to_string(kappa) +
                                     " anchors cannot form a Parseval frame in dimension " +
                                     std::to_string(max_k));
  }
  m.method = AlignMethod::Ppfe;
  m.k = kappa;
  m.whiten_a = fit_whitener(pair.A.X, options.epsilon);
  m.whiten_b = fit_whitener(pair.B.X, options.epsilon);
  const Matrix a = prewhiten(*m.whiten_a, pair.A.X);
  const Matrix b = prewhiten(*m.whiten_b, pair.B.X);

  AnchorOptions anchor_opts;
  anchor_opts.rho = options.rho;
  anchor_opts.seed = options.seed;
  anchor_opts.psi = options.psi;
  anchor_opts.max_retries = options.max_retries;
  const Prototypes pa = prototypical_anchors(a, kappa, anchor_opts);
  // Injected matching: B's prototypes average the same rows.
  anchor_opts.existing = pa.anchor_sets;
  const Prototypes pb = prototypical_anchors(b, kappa, anchor_opts);

  PpfeOperator op;
  op.F_T = parseval_frame(pa.P, "source");
  op.F_R = parseval_frame(pb.P, "target");
  op.anchors = pa.anchor_sets;
  m.op = std::move(op);
  return m;
}

AlignmentMap fit_linear(const PairedClouds& pair, double epsilon) {
  require_pair(pair);
  AlignmentMap m;
  m.method = AlignMethod::Linear;
  m.whiten_a = fit_whitener(pair.A.X, epsilon);
  m.whiten_b = fit_whitener(pair.B.X, epsilon);
  const Matrix a = prewhiten(*m.whiten_a, pair.A.X);
  const Matrix b = prewhiten(*m.whiten_b, pair.B.X);
  // b~_i = A a~_i for every row: A = B~^T pinv(A~)^T.
  const Matrix op = b.transpose() * linalg::pseudo_inverse(a).transpose();
  Eigen::BDCSVD<Matrix> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
  auto s = std::make_shared<LinearSvd>();
  s->U = svd.matrixU();
  s->sigma = svd.singularValues();
  s->V = svd.matrixV();
  m.k = static_cast<int>(s->sigma.size());
  m.op = LinearOperator{std::move(s)};
  return m;
}

AlignmentMap truncate_linear(const AlignmentMap& full, int k) {
  if (full.method != AlignMethod::Linear) {
    fail(ErrorCode::InvalidArgument, "truncate_linear needs a linear map");
  }
  check_k(k, full.source_dim(), full.target_dim());
  AlignmentMap m = full;
  m.k = k;
  return m;
}

AlignmentMap fit_cca(const PairedClouds& pair, int k, double epsilon) {
  require_pair(pair);
  linalg::require_finite(pair.A.X, "CCA source");
  linalg::require_finite(pair.B.X, "CCA target");
  check_k(k, pair.A.dim(), pair.B.dim());
  const auto n = static_cast<double>(pair.A.rows());
  const Vector mu_a = linalg::column_mean(pair.A.X);
  const Vector mu_b = linalg::column_mean(pair.B.X);
  const Matrix xa = linalg::centered(pair.A.X, mu_a);
  const Matrix xb = linalg::centered(pair.B.X, mu_b);
  Matrix saa = xa.transpose() * xa / (n - 1.0);
  Matrix sbb = xb.transpose() * xb / (n - 1.0);
  saa.diagonal().array() += epsilon;
  sbb.diagonal().array() += epsilon;
  const Matrix sab = xa.transpose() * xb / (n - 1.0);

  auto basis = std::make_shared<CcaBasis>();
  basis->saa_isqrt = linalg::inverse_sqrt_psd(saa, kGramFloor);
  basis->sbb_isqrt = linalg::inverse_sqrt_psd(sbb, kGramFloor);
  const Matrix t = basis->saa_isqrt * sab * basis->sbb_isqrt;
  Eigen::BDCSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);
  basis->U = svd.matrixU();
  basis->V = svd.matrixV();
  basis->correlations = svd.singularValues();

  AlignmentMap m;
  m.method = AlignMethod::Cca;
  m.k = k;
  m.op = cca_operator(basis, mu_a, mu_b, k);
  return m;
}

AlignmentMap truncate_cca(const AlignmentMap& fitted, int k) {
  const auto* op = std::get_if<CcaOperator>(&fitted.op);
  if (op == nullptr) fail(ErrorCode::InvalidArgument, "truncate_cca needs a CCA map");
  if (!op->basis) fail(ErrorCode::InvalidArgument, "CCA map has no stored decomposition");
  check_k(k, fitted.source_dim(), fitted.target_dim());
  AlignmentMap m;
  m.method = AlignMethod::Cca;
  m.k = k;
  m.op = cca_operator(op->basis, op->mu_A, op->mu_B, k);
  return m;
}

Matrix transmit(const AlignmentMap& m, const Matrix& a) {
  if (a.cols() != m.source_dim()) {
    fail(ErrorCode::DimensionMismatch, "transmit: input has " + std::to_string(a.cols()) +
                                           " columns, map expects " + std::to_string(m.source_dim()));
  }
  if (const auto* cca = std::get_if<CcaOperator>(&m.op)) {
    Matrix out = (linalg::centered(a, cca->mu_A) * cca->W_A) * cca->W_B_pinv;
    out.rowwise() += cca->mu_B.transpose();
    return out;
  }
  if (!m.whiten_a || !m.whiten_b) fail(ErrorCode::InvalidArgument, "map is missing its whiteners");
  const Matrix aw = prewhiten(*m.whiten_a, a);
  Matrix bw;
  if (const auto* ppfe = std::get_if<PpfeOperator>(&m.op)) {
    bw = (aw * ppfe->F_T) * ppfe->F_R.transpose();
  } else {
    const auto& s = *std::get<LinearOperator>(m.op).svd;
    bw = ((aw * s.V.leftCols(m.k)) * s.sigma.head(m.k).asDiagonal()) * s.U.leftCols(m.k).transpose();
  }
  return dewhiten(*m.whiten_b, bw);
}

PointCloud transmit(const AlignmentMap& m, const PointCloud& a) {
  PointCloud out;
  out.X = transmit(m, a.X);
  out.ids = a.ids;
  out.labels = a.labels;
  out.model_name = a.model_name;
  return out;
}

nlohmann::json AlignmentMap::to_json() const {
  using detail::matrix_to_json;
  using detail::vector_to_json;
  nlohmann::json j;
  j["format"] = "latentkit.alignment_map";
  j["version"] = kFormatVersion;
  j["method"] = std::string(to_string(method));
  j["k"] = k;
  if (whiten_a) j["whiten_a"] = whiten_a->to_json();
  if (whiten_b) j["whiten_b"] = whiten_b->to_json();
  std::visit(
      [&](const auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, PpfeOperator>) {
          j["F_T"] = matrix_to_json(o.F_T);
          j["F_R"] = matrix_to_json(o.F_R);
          j["anchors"] = o.anchors;
        } else if constexpr (std::is_same_v<T, LinearOperator>) {
          j["U"] = matrix_to_json(o.svd->U);
          j["sigma"] = vector_to_json(o.svd->sigma);
          j["V"] = matrix_to_json(o.svd->V);
        } else {
          j["W_A"] = matrix_to_json(o.W_A);
          j["W_B"] = matrix_to_json(o.W_B);
          j["W_B_pinv"] = matrix_to_json(o.W_B_pinv);
          j["mu_A"] = vector_to_json(o.mu_A);
          j["mu_B"] = vector_to_json(o.mu_B);
          j["correlations"] = vector_to_json(o.correlations);
        }
      },
      op);
  return j;
}

AlignmentMap AlignmentMap::from_json(const nlohmann::json& j) {
  using detail::matrix_from_json;
  using detail::vector_from_json;
  try {
    if (j.at("format").get<std::string>() != "latentkit.alignment_map" ||
        j.at("version").get<int>() != kFormatVersion) {
      fail(ErrorCode::MalformedFile, "not a version-1 alignment map");
    }
    AlignmentMap m;
    const auto method = parse_align_method(j.at("method").get<std::string>());
    if (!method) fail(ErrorCode::MalformedFile, "unknown alignment method");
    m.method = *method;
    m.k = j.at("k").get<int>();
    if (j.contains("whiten_a")) m.whiten_a = WhitenModel::from_json(j.at("whiten_a"));
    if (j.contains("whiten_b")) m.whiten_b = WhitenModel::from_json(j.at("whiten_b"));
    switch (m.method) {
      case AlignMethod::Ppfe: {
        PpfeOperator o;
        o.F_T = matrix_from_json(j.at("F_T"));
        o.F_R = matrix_from_json(j.at("F_R"));
        o.anchors = j.at("anchors").get<AnchorSets>();
        m.op = std::move(o);
        break;
      }
      case AlignMethod::Linear: {
        auto s = std::make_shared<LinearSvd>();
        s->U = matrix_from_json(j.at("U"));
        s->sigma = vector_from_json(j.at("sigma"));
        s->V = matrix_from_json(j.at("V"));
        if (m.k < 1 || m.k > s->sigma.size()) fail(ErrorCode::MalformedFile, "k exceeds stored rank");
        m.op = LinearOperator{std::move(s)};
        break;
      }
      case AlignMethod::Cca: {
        CcaOperator o;
        o.W_A = matrix_from_json(j.at("W_A"));
        o.W_B = matrix_from_json(j.at("W_B"));
        o.W_B_pinv = matrix_from_json(j.at("W_B_pinv"));
        o.mu_A = vector_from_json(j.at("mu_A"));
        o.mu_B = vector_from_json(j.at("mu_B"));
        o.correlations = vector_from_json(j.at("correlations"));
        m.op = std::move(o);
        break;
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedFile, std::string("alignment map JSON: ") + e.what());
  }
}

}  // namespace latentkit
