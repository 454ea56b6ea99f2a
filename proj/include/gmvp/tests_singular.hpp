#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "gmvp/model_core.hpp"
#include "gmvp/tests_dense.hpp"

namespace gmvp {

// Standardization scale for the rank-deficient Mahalanobis test. SqrtK is
// the default, consistent with the general CLT; SqrtQMinus1 reproduces the
// alternative wording of the null statement.
enum class SingularScaling { SqrtK, SqrtQMinus1 };

struct SingularTestConfig {
    Index q;     // known rank, caller-supplied; always wins over detection
    MatrixXd l;  // k x p selection/constants matrix, rank k <= q
    double alpha = 0.05;
    SingularScaling scaling = SingularScaling::SqrtK;
    // Optional sink for diagnostics (declared vs detected rank mismatch).
    std::function<void(const std::string&)> warn;
};

// Selection matrix keeping coordinates [first, first + k).
MatrixXd selection_matrix(Index p, Index first, Index k);

// (n-q)/k (1'S^+1)(w~* - r*)'(Q~*)^{-1}(w~* - r*) on the Moore-Penrose
// inverse of the sample covariance with the declared rank q.
double mahalanobis_statistic_singular(const ReturnsMatrix& returns,
                                      const SingularTestConfig& config,
                                      const VectorXd& r_star);

TestOutcome mahalanobis_test_singular(const ReturnsMatrix& returns,
                                      const SingularTestConfig& config,
                                      const VectorXd& r_star);

// 1 - Phi((sqrt(2(1-c~+b~)/(1-c~)) z_{1-a} - lambda~ (n-q+k)/sqrt(k)) / C~),
// c~ = q/n, b~ = k/n.
double power_singular_asymptotic(double lambda_tilde, Index q, Index k, Index n,
                                 double alpha);

// Spread of the alternative-law CLT for the rank-deficient statistic.
double c_spread_singular(double lambda_tilde, double c_tilde, double b_tilde);

// R+ = (1 - q/n) 1'S^+1 b'Sb - 1 and the induced intensity estimate. The
// optional sink reports a declared-vs-detected rank mismatch; results always
// follow the declared q.
ShrinkageEstimate shrinkage_intensity_singular(
    const ReturnsMatrix& returns, const PortfolioWeights& b, Index q,
    const std::function<void(const std::string&)>& warn = {});

// S+_n = sqrt(n) alpha_hat+(b = r) against N(0, 2(1-c~)/c~).
TestOutcome shrinkage_test_singular(
    const ReturnsMatrix& returns, const PortfolioWeights& r, Index q, double alpha,
    const std::function<void(const std::string&)>& warn = {});

double power_shrinkage_singular(double relative_loss_mp, Index q, Index n,
                                double alpha);

// Whole-vector hypothesis via contiguous coordinate blocks, each tested at
// alpha / #blocks; rejects when any block rejects.
struct BonferroniOutcome {
    std::vector<TestOutcome> blocks;
    std::vector<std::pair<Index, Index>> block_ranges;  // [first, first + k)
    bool reject = false;
    double alpha = 0.05;
    double per_block_alpha = 0.05;
};

BonferroniOutcome bonferroni_full_test(const ReturnsMatrix& returns,
                                       const PortfolioWeights& r, Index q,
                                       double alpha, Index block_size);

namespace detail {
// Spectral sufficient statistics of the singular tests for declared rank q.
struct SingularForms {
    double ones_inv_quad;  // 1'S^+1
    double target_quad;    // r'Sr (b'Sb)
    MatrixXd root_cols;    // V_q Lambda_q^{-1/2}, p x q
    VectorXd u;            // Lambda_q^{-1/2} V_q' 1
    Index detected_rank;
};
SingularForms singular_forms(const ReturnsMatrix& returns, Index q,
                             const VectorXd& target);
}  // namespace detail

}  // namespace gmvp
