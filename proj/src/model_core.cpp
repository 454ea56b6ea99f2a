#include "gmvp/model_core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <limits>

#include "gmvp/errors.hpp"
#include "gmvp/linalg.hpp"

namespace gmvp {

namespace {

constexpr double kWeightSumTol = 1e-10;
constexpr double kAsymmetryTol = 1e-6;
constexpr double kOnesFormFloor = 1e-12;

Index detect_rank(const VectorXd& values) {
    if (values.size() == 0) return 0;
    const double cutoff = static_cast<double>(values.size()) *
                          std::numeric_limits<double>::epsilon() *
                          std::max(values(0), 0.0);
    Index rank = 0;
    while (rank < values.size() && values(rank) > cutoff) ++rank;
    return rank;
}

void check_weight_sum(const VectorXd& w, const char* who) {
    if (std::abs(w.sum() - 1.0) > kWeightSumTol) {
        throw InputError(std::string(who) + ": weights must sum to 1");
    }
}

}  // namespace

ReturnsMatrix::ReturnsMatrix(MatrixXd d) : data(std::move(d)) {
    if (data.rows() < 2 || data.cols() < 2) {
        throw InputError("ReturnsMatrix: need n >= 2 and p >= 2");
    }
    if (!data.allFinite()) {
        throw InputError("ReturnsMatrix: non-finite entries");
    }
}

PortfolioWeights::PortfolioWeights(VectorXd w, WeightSource s)
    : weights(std::move(w)), source(s) {
    if (weights.size() < 1 || !weights.allFinite()) {
        throw InputError("PortfolioWeights: empty or non-finite");
    }
    check_weight_sum(weights, "PortfolioWeights");
}

CovarianceModel CovarianceModel::from_matrix(const MatrixXd& m,
                                             std::optional<InverseKind> kind,
                                             std::optional<Index> rank_override) {
    if (m.rows() != m.cols() || m.rows() < 1) {
        throw InputError("CovarianceModel: matrix must be square");
    }
    if (!m.allFinite()) throw InputError("CovarianceModel: non-finite entries");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > kAsymmetryTol * scale) {
        throw InputError("CovarianceModel: matrix is not symmetric");
    }
    MatrixXd sym = 0.5 * (m + m.transpose());
    linalg::SymEigen eig = linalg::eigen_sym_descending(sym);
    CovarianceModel out;
    out.matrix_ = std::move(sym);
    out.values_ = std::move(eig.values);
    out.vectors_ = std::move(eig.vectors);
    out.detected_rank_ = detect_rank(out.values_);
    out.rank_ = rank_override.value_or(out.detected_rank_);
    if (out.rank_ < 0 || out.rank_ > out.dim()) {
        throw InputError("CovarianceModel: rank override outside [0, p]");
    }
    out.kind_ = kind.value_or(out.rank_ == out.dim() ? InverseKind::Classical
                                                     : InverseKind::MoorePenrose);
    if (out.kind_ == InverseKind::Classical && out.rank_ != out.dim()) {
        throw InputError("CovarianceModel: Classical inverse requires full rank");
    }
    return out;
}

CovarianceModel CovarianceModel::from_eigen(VectorXd values, MatrixXd vectors,
                                            std::optional<InverseKind> kind,
                                            std::optional<Index> rank_override) {
    if (vectors.rows() < 1 || vectors.cols() != values.size()) {
        throw InputError("CovarianceModel: eigenvector/eigenvalue size mismatch");
    }
    if (vectors.cols() < vectors.rows()) {
        // Partial spectrum: the remaining eigenvalues are zero, the basis is
        // completed orthonormally.
        const Index p = vectors.rows();
        VectorXd padded = VectorXd::Zero(p);
        padded.head(values.size()) = values;
        values = std::move(padded);
        vectors = linalg::complete_orthonormal_basis(vectors);
    }
    CovarianceModel out;
    out.matrix_ = vectors * values.asDiagonal() * vectors.transpose();
    out.values_ = std::move(values);
    out.vectors_ = std::move(vectors);
    out.detected_rank_ = detect_rank(out.values_);
    out.rank_ = rank_override.value_or(out.detected_rank_);
    out.kind_ = kind.value_or(out.rank_ == out.dim() ? InverseKind::Classical
                                                     : InverseKind::MoorePenrose);
    if (out.kind_ == InverseKind::Classical && out.rank_ != out.dim()) {
        throw InputError("CovarianceModel: Classical inverse requires full rank");
    }
    return out;
}

MatrixXd CovarianceModel::inverse_matrix() const {
    if (rank_ == 0) throw DegenerateError("CovarianceModel: rank 0 has no inverse");
    const Index r = std::min(rank_, values_.size());
    MatrixXd vr = vectors_.leftCols(r);
    VectorXd inv = values_.head(r).cwiseInverse();
    return vr * inv.asDiagonal() * vr.transpose();
}

double CovarianceModel::ones_inverse_quadratic() const {
    if (rank_ == 0) throw DegenerateError("CovarianceModel: rank 0");
    const Index r = std::min(rank_, values_.size());
    const VectorXd t = vectors_.leftCols(r).transpose() * VectorXd::Ones(dim());
    double acc = 0.0;
    for (Index i = 0; i < r; ++i) acc += t(i) * t(i) / values_(i);
    return acc;
}

CovarianceModel sample_covariance(const ReturnsMatrix& returns) {
    MatrixXd xc = linalg::center_columns(returns.data);
    linalg::SymEigen eig = linalg::sample_covariance_eigen(xc);
    return CovarianceModel::from_eigen(std::move(eig.values), std::move(eig.vectors));
}

CovarianceModel pseudo_inverse(const CovarianceModel& cov) {
    if (cov.rank() == 0) throw DegenerateError("pseudo_inverse: rank 0");
    const Index p = cov.dim();
    const Index r = cov.rank();
    VectorXd values = VectorXd::Zero(p);
    MatrixXd vectors(p, p);
    // Inverted spectrum, reordered to keep eigenvalues nonincreasing.
    for (Index i = 0; i < r; ++i) {
        values(i) = 1.0 / cov.eigenvalues()(r - 1 - i);
        vectors.col(i) = cov.eigenvectors().col(r - 1 - i);
    }
    for (Index i = r; i < p; ++i) vectors.col(i) = cov.eigenvectors().col(i);
    return CovarianceModel::from_eigen(std::move(values), std::move(vectors),
                                       cov.rank() == p ? InverseKind::Classical
                                                       : InverseKind::MoorePenrose,
                                       r);
}

PortfolioWeights gmvp_weights(const CovarianceModel& cov) {
    if (cov.rank() == 0) throw DegenerateError("gmvp_weights: rank 0");
    const MatrixXd sinv = cov.inverse_matrix();
    const VectorXd num = sinv.rowwise().sum();
    const double denom = num.sum();
    const double floor = kOnesFormFloor * sinv.cwiseAbs().maxCoeff();
    if (!(denom > floor)) {
        throw DegenerateError("gmvp_weights: 1'S^+1 below the conditioning floor");
    }
    return PortfolioWeights(num / denom,
                            cov.inverse_kind() == InverseKind::MoorePenrose
                                ? WeightSource::SampleMoorePenrose
                                : WeightSource::Sample);
}

MatrixXd q_matrix(const CovarianceModel& cov) {
    const MatrixXd sinv = cov.inverse_matrix();
    const VectorXd s1 = sinv.rowwise().sum();
    const double denom = s1.sum();
    const double floor = kOnesFormFloor * sinv.cwiseAbs().maxCoeff();
    if (!(denom > floor)) {
        throw DegenerateError("q_matrix: 1'S^+1 below the conditioning floor");
    }
    return sinv - (s1 * s1.transpose()) / denom;
}

EffectSize lambda_dense(const CovarianceModel& cov, const PortfolioWeights& r) {
    if (cov.dim() < 2) throw InputError("lambda_dense: p >= 2 required");
    if (cov.rank() != cov.dim()) {
        throw DegenerateError("lambda_dense: full rank required");
    }
    if (r.weights.size() != cov.dim()) throw InputError("lambda_dense: size mismatch");
    check_weight_sum(r.weights, "lambda_dense");
    // 1'S^{-1}1 (w* - r*)'(Q*)^{-1}(w* - r*) collapses algebraically to
    // (1'S^{-1}1)(r'Sr) - 1; the block-definition route is kept as a test
    // oracle.
    const double s11 = cov.ones_inverse_quadratic();
    const double rsr = r.weights.dot(cov.matrix() * r.weights);
    return EffectSize{EffectKind::LambdaDense, std::max(0.0, s11 * rsr - 1.0)};
}

EffectSize lambda_singular(const CovarianceModel& cov, const MatrixXd& l,
                           const VectorXd& r_star) {
    const Index p = cov.dim();
    const Index k = l.rows();
    const Index q = cov.rank();
    if (l.cols() != p) throw InputError("lambda_singular: L must have p columns");
    if (r_star.size() != k) throw InputError("lambda_singular: r* must have k entries");
    if (k < 1 || k > q) throw InputError("lambda_singular: need 1 <= k <= q");
    {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(l.transpose());
        if (qr.rank() != k) throw InputError("lambda_singular: L must have rank k");
    }
    const Index r = q;
    const MatrixXd vr = cov.eigenvectors().leftCols(r);
    const VectorXd root_inv = cov.eigenvalues().head(r).cwiseSqrt().cwiseInverse();
    const VectorXd u = root_inv.asDiagonal() * (vr.transpose() * VectorXd::Ones(p));
    const double s11 = u.squaredNorm();
    if (!(s11 > 0.0)) throw DegenerateError("lambda_singular: 1'S^+1 vanishes");
    const MatrixXd b = l * vr * root_inv.asDiagonal();  // k x q
    const VectorXd bu = b * u;                          // L S^+ 1
    const MatrixXd q_star = b * b.transpose() - (bu * bu.transpose()) / s11;
    const VectorXd diff = bu / s11 - r_star;
    Eigen::LLT<MatrixXd> llt(q_star);
    if (llt.info() != Eigen::Success) {
        throw DegenerateError("lambda_singular: Q* is numerically singular");
    }
    const double quad = diff.dot(llt.solve(diff));
    return EffectSize{EffectKind::LambdaSingular, std::max(0.0, s11 * quad)};
}

EffectSize relative_loss(const CovarianceModel& cov, const PortfolioWeights& b) {
    if (b.weights.size() != cov.dim()) throw InputError("relative_loss: size mismatch");
    check_weight_sum(b.weights, "relative_loss");
    const double s11 = cov.ones_inverse_quadratic();
    const double bsb = b.weights.dot(cov.matrix() * b.weights);
    double value = s11 * bsb - 1.0;
    if (value < 0.0) {
        if (value < -1e-9) {
            throw InputError(
                "relative_loss: negative loss; the target carries null-space mass "
                "outside the admissible set");
        }
        value = 0.0;
    }
    const EffectKind kind = cov.inverse_kind() == InverseKind::MoorePenrose
                                ? EffectKind::RelativeLossMP
                                : EffectKind::RelativeLoss;
    return EffectSize{kind, value};
}

}  // namespace gmvp
