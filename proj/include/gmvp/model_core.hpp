#pragma once

#include <Eigen/Core>
#include <optional>

namespace gmvp {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// n x p panel of asset returns, rows are observations.
struct ReturnsMatrix {
    MatrixXd data;

    explicit ReturnsMatrix(MatrixXd d);
    Index n() const { return data.rows(); }
    Index p() const { return data.cols(); }
};

enum class InverseKind { Classical, MoorePenrose };

enum class WeightSource { Population, Sample, SampleMoorePenrose };

struct PortfolioWeights {
    VectorXd weights;
    WeightSource source = WeightSource::Population;

    PortfolioWeights(VectorXd w, WeightSource s = WeightSource::Population);
};

enum class EffectKind { LambdaDense, RelativeLoss, LambdaSingular, RelativeLossMP };

struct EffectSize {
    EffectKind kind;
    double value;  // >= 0
};

// A symmetric covariance matrix together with its spectral decomposition,
// detected (or overridden) rank, and the inverse convention to use.
class CovarianceModel {
public:
    // Symmetrizes m as (M + M')/2; relative asymmetry beyond 1e-6 raises
    // InputError. Rank is detected as #{eigenvalues > threshold_scale *
    // eps * max eigenvalue} unless rank_override is given (the override
    // always wins; a mismatch with the detected rank is reported through
    // detected_rank()). The default inverse kind is Classical at full rank
    // and MoorePenrose otherwise.
    static CovarianceModel from_matrix(const MatrixXd& m,
                                       std::optional<InverseKind> kind = std::nullopt,
                                       std::optional<Index> rank_override = std::nullopt);

    // Assemble directly from a spectral decomposition (columns of vectors
    // are orthonormal, values nonincreasing).
    static CovarianceModel from_eigen(VectorXd values, MatrixXd vectors,
                                      std::optional<InverseKind> kind = std::nullopt,
                                      std::optional<Index> rank_override = std::nullopt);

    const MatrixXd& matrix() const { return matrix_; }
    const VectorXd& eigenvalues() const { return values_; }
    const MatrixXd& eigenvectors() const { return vectors_; }
    Index dim() const { return matrix_.rows(); }
    Index rank() const { return rank_; }
    Index detected_rank() const { return detected_rank_; }
    InverseKind inverse_kind() const { return kind_; }

    // Classical inverse or Moore-Penrose pseudo-inverse per inverse_kind.
    MatrixXd inverse_matrix() const;

    // 1' S^+ 1 through the spectral form.
    double ones_inverse_quadratic() const;

private:
    CovarianceModel() = default;
    MatrixXd matrix_;
    VectorXd values_;   // nonincreasing
    MatrixXd vectors_;  // orthonormal columns
    Index rank_ = 0;
    Index detected_rank_ = 0;
    InverseKind kind_ = InverseKind::Classical;
};

// Demeaned 1/(n-1) cross-product estimator with its spectral decomposition.
CovarianceModel sample_covariance(const ReturnsMatrix& returns);

// Moore-Penrose inverse as a CovarianceModel (eigenvalues above the rank cut
// inverted, the rest zeroed). Coincides with the classical inverse at full
// rank. Rank 0 raises DegenerateError.
CovarianceModel pseudo_inverse(const CovarianceModel& cov);

// S^+ 1 / (1' S^+ 1). DegenerateError when 1'S^+1 falls below
// 1e-12 * max|S^+| (ones vector orthogonal to the column space).
PortfolioWeights gmvp_weights(const CovarianceModel& cov);

// Q = S^+ - S^+ 1 1' S^+ / (1' S^+ 1); annihilates the ones vector.
MatrixXd q_matrix(const CovarianceModel& cov);

// Noncentrality of the Mahalanobis test: 1'S^{-1}1 times the quadratic form
// of (w* - r*) against the inverse of the leading (p-1) block of Q. Requires
// full rank; r must sum to one.
EffectSize lambda_dense(const CovarianceModel& cov, const PortfolioWeights& r);

// Rank-deficient analogue against a k x p selection matrix L (rank k <= q)
// and a hypothesized k-vector for L w.
EffectSize lambda_singular(const CovarianceModel& cov, const MatrixXd& l,
                           const VectorXd& r_star);

// Relative loss of target b: (1'S^+1)(b'Sb) - 1.
EffectSize relative_loss(const CovarianceModel& cov, const PortfolioWeights& b);

}  // namespace gmvp
