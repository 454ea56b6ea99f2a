#pragma once

#include "gmvp/model_core.hpp"

namespace gmvp {

enum class ReferenceDist { FExact, NormalAsymptotic };

// One-sided test result. reject is always p_value < alpha (a statistic
// exactly at the critical value does not reject). standardized is the
// normal-scale score under the high-dimensional null law regardless of the
// reference used for the decision.
struct TestOutcome {
    double statistic = 0.0;
    double standardized = 0.0;
    ReferenceDist reference = ReferenceDist::NormalAsymptotic;
    double p_value = 1.0;
    bool reject = false;
    double alpha = 0.05;
    double effect_estimate = 0.0;
    double c_n = 0.0;
};

// Center/spread of an asymptotic normal approximation.
struct CltParams {
    double center;
    double spread;  // > 0
};

struct ShrinkageEstimate {
    double r_hat;      // estimated relative loss; may be negative in finite samples
    double alpha_hat;  // estimated optimal shrinkage intensity (not clamped)
    PortfolioWeights target;
    double c_n;
};

// (n-p)/(p-1) (1'S^{-1}1)(w* - r*)'(Q*)^{-1}(w* - r*) on the sample estimate.
double mahalanobis_statistic(const ReturnsMatrix& returns, const PortfolioWeights& r);

// FExact: decision against the f quantile with p-1 and n-p degrees of
// freedom. NormalAsymptotic: one-sided z test of sqrt(p-1)(T - 1) with null
// variance 2/(1 - c_n).
TestOutcome mahalanobis_test(const ReturnsMatrix& returns, const PortfolioWeights& r,
                             double alpha, ReferenceDist mode);

// Spread of the alternative-law CLT for the Mahalanobis statistic,
// sqrt(2 + 2L^2/c + 4L/c + 2c/(1-c)(1 + L/c)^2) at L = lambda, c = c_n.
double c_spread(double lambda, double c_n);

// 1 - Phi((sqrt(2/(1-c)) z_{1-a} - sqrt(p-1) lambda / c) / C_n), c = p/n.
double power_mahalanobis_asymptotic(double lambda, Index p, Index n, double alpha);

// Exact power by Gauss-Legendre integration of the noncentral-F tail over
// the chi-squared(n-1) mixing density, truncated at its 1e-10 tails.
// Guarded to p <= 50 and n <= 200 (UnsupportedError beyond).
double power_mahalanobis_exact(double lambda, Index p, Index n, double alpha);

// R_hat = (1 - p/n) b'Sb 1'S^{-1}1 - 1 and the induced intensity estimate.
ShrinkageEstimate shrinkage_intensity(const ReturnsMatrix& returns,
                                      const PortfolioWeights& b);

// Center A_n and spread B_n of sqrt(n)(alpha_hat - A_n)/B_n.
CltParams shrinkage_clt_params(double relative_loss, double c_n);

// S_n = sqrt(n) alpha_hat(b = r), rejected against N(0, 2(1-c)/c).
TestOutcome shrinkage_test(const ReturnsMatrix& returns, const PortfolioWeights& r,
                           double alpha);

// 1 - Phi((sqrt(2(1-c)/c) z_{1-a} - sqrt(n) A_n) / B_n), c = p/n.
double power_shrinkage_asymptotic(double relative_loss, Index p, Index n, double alpha);

namespace detail {
// Shared sufficient statistics of the dense tests: 1'S^{-1}1 and r'Sr from
// the sample covariance of `returns`. Throws DegenerateError when the
// Cholesky factorization fails (singular sample covariance).
struct DenseForms {
    double ones_inv_quad;  // 1'S^{-1}1
    double target_quad;    // r'Sr
};
DenseForms dense_forms(const ReturnsMatrix& returns, const VectorXd& r);
}  // namespace detail

}  // namespace gmvp
