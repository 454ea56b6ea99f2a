#include "gmvp/tests_singular.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <string>

#include "gmvp/distributions.hpp"
#include "gmvp/errors.hpp"
#include "gmvp/linalg.hpp"

namespace gmvp {

namespace {

constexpr double kWeightSumTol = 1e-10;

double as_d(Index v) { return static_cast<double>(v); }

}  // namespace

namespace detail {

SingularForms singular_forms(const ReturnsMatrix& returns, Index q,
                             const VectorXd& target) {
    const Index n = returns.n();
    const Index p = returns.p();
    if (q < 1) throw InputError("singular test: q must be >= 1");
    if (n <= q) throw InputError("singular test: requires n > q");
    if (q > p) throw InputError("singular test: q cannot exceed p");
    MatrixXd xc = linalg::center_columns(returns.data);
    const double scale = 1.0 / as_d(n - 1);
    // r'Sr without the spectral route.
    const double target_quad = (xc * target).squaredNorm() * scale;
    linalg::SymEigen eig = linalg::sample_covariance_eigen(xc);
    Index detected = 0;
    if (eig.values.size() > 0) {
        const double cutoff = as_d(p) * std::numeric_limits<double>::epsilon() *
                              std::max(eig.values(0), 0.0);
        while (detected < eig.values.size() && eig.values(detected) > cutoff) ++detected;
    }
    if (q > eig.values.size() || !(eig.values(q - 1) > 0.0)) {
        throw DegenerateError(
            "singular test: declared rank exceeds the positive spectrum of the "
            "sample covariance");
    }
    SingularForms out;
    out.detected_rank = detected;
    out.target_quad = target_quad;
    const VectorXd root_inv = eig.values.head(q).cwiseSqrt().cwiseInverse();
    out.root_cols = eig.vectors.leftCols(q) * root_inv.asDiagonal();
    out.u = out.root_cols.transpose() * VectorXd::Ones(p);
    out.ones_inv_quad = out.u.squaredNorm();
    if (!(out.ones_inv_quad > 1e-12 / std::max(eig.values(q - 1), 1e-300))) {
        throw DegenerateError("singular test: 1'S^+1 below the conditioning floor");
    }
    return out;
}

}  // namespace detail

MatrixXd selection_matrix(Index p, Index first, Index k) {
    if (first < 0 || k < 1 || first + k > p) {
        throw InputError("selection_matrix: block outside [0, p)");
    }
    MatrixXd l = MatrixXd::Zero(k, p);
    for (Index i = 0; i < k; ++i) l(i, first + i) = 1.0;
    return l;
}

double mahalanobis_statistic_singular(const ReturnsMatrix& returns,
                                      const SingularTestConfig& config,
                                      const VectorXd& r_star) {
    const Index n = returns.n();
    const Index p = returns.p();
    const Index q = config.q;
    const Index k = config.l.rows();
    if (config.l.cols() != p) throw InputError("singular test: L must have p columns");
    if (k < 1 || k > q) throw InputError("singular test: need 1 <= k <= q");
    if (r_star.size() != k) throw InputError("singular test: r* must have k entries");
    {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(config.l.transpose());
        if (qr.rank() != k) throw InputError("singular test: L must have rank k");
    }
    const auto forms = detail::singular_forms(returns, q, VectorXd::Zero(p));
    if (config.warn && forms.detected_rank != q) {
        config.warn("declared rank q=" + std::to_string(q) +
                    " differs from detected numerical rank " +
                    std::to_string(forms.detected_rank));
    }
    const MatrixXd b = config.l * forms.root_cols;  // k x q
    const VectorXd bu = b * forms.u;                // L S^+ 1
    const double s11 = forms.ones_inv_quad;
    const MatrixXd q_star = b * b.transpose() - (bu * bu.transpose()) / s11;
    const VectorXd diff = bu / s11 - r_star;
    Eigen::LLT<MatrixXd> llt(q_star);
    if (llt.info() != Eigen::Success) {
        throw DegenerateError("singular test: Q~* is numerically singular");
    }
    const double quad = diff.dot(llt.solve(diff));
    return std::max(0.0, as_d(n - q) / as_d(k) * s11 * quad);
}

TestOutcome mahalanobis_test_singular(const ReturnsMatrix& returns,
                                      const SingularTestConfig& config,
                                      const VectorXd& r_star) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw InputError("singular test: alpha outside (0,1)");
    }
    const Index n = returns.n();
    const Index q = config.q;
    const Index k = config.l.rows();
    const double t = mahalanobis_statistic_singular(returns, config, r_star);
    const double c_t = as_d(q) / as_d(n);
    const double b_t = as_d(k) / as_d(n);
    const double scale = config.scaling == SingularScaling::SqrtK
                             ? std::sqrt(as_d(k))
                             : std::sqrt(as_d(q - 1));
    const double null_sd = std::sqrt(2.0 * (1.0 - c_t + b_t) / (1.0 - c_t));
    TestOutcome out;
    out.statistic = t;
    out.reference = ReferenceDist::NormalAsymptotic;
    out.alpha = config.alpha;
    out.c_n = c_t;
    out.standardized = scale * (t - 1.0) / null_sd;
    out.effect_estimate = t * as_d(k) / as_d(n - q);
    out.p_value = 1.0 - dist::normal_cdf(out.standardized);
    out.reject = out.p_value < config.alpha;
    return out;
}

double c_spread_singular(double lambda_tilde, double c_tilde, double b_tilde) {
    if (!(c_tilde > 0.0 && c_tilde < 1.0)) {
        throw InputError("c_spread_singular: c~ outside (0,1)");
    }
    if (!(b_tilde > 0.0 && b_tilde < 1.0)) {
        throw InputError("c_spread_singular: b~ outside (0,1)");
    }
    if (lambda_tilde < 0.0) throw InputError("c_spread_singular: lambda~ < 0");
    const double g = (1.0 - c_tilde + b_tilde) * lambda_tilde / b_tilde;
    return std::sqrt(2.0 + 2.0 * g * lambda_tilde + 4.0 * g +
                     2.0 * b_tilde / (1.0 - c_tilde) * (1.0 + g) * (1.0 + g));
}

double power_singular_asymptotic(double lambda_tilde, Index q, Index k, Index n,
                                 double alpha) {
    if (lambda_tilde < 0.0) throw InputError("power_singular_asymptotic: lambda~ < 0");
    if (!(k >= 1 && k <= q && q < n)) {
        throw InputError("power_singular_asymptotic: need 1 <= k <= q < n");
    }
    const double c_t = as_d(q) / as_d(n);
    const double b_t = as_d(k) / as_d(n);
    const double z = dist::normal_quantile(1.0 - alpha);
    const double null_sd = c_spread_singular(0.0, c_t, b_t);
    const double spread = c_spread_singular(lambda_tilde, c_t, b_t);
    const double shift = lambda_tilde * as_d(n - q + k) / std::sqrt(as_d(k));
    return 1.0 - dist::normal_cdf((null_sd * z - shift) / spread);
}

ShrinkageEstimate shrinkage_intensity_singular(
    const ReturnsMatrix& returns, const PortfolioWeights& b, Index q,
    const std::function<void(const std::string&)>& warn) {
    const Index n = returns.n();
    const Index p = returns.p();
    if (b.weights.size() != p) throw InputError("shrinkage_intensity_singular: size mismatch");
    if (std::abs(b.weights.sum() - 1.0) > kWeightSumTol) {
        throw InputError("shrinkage_intensity_singular: target weights must sum to 1");
    }
    const auto forms = detail::singular_forms(returns, q, b.weights);
    if (warn && forms.detected_rank != q) {
        warn("declared rank q=" + std::to_string(q) +
             " differs from detected numerical rank " +
             std::to_string(forms.detected_rank));
    }
    const double c_t = as_d(q) / as_d(n);
    const double r_hat = (1.0 - c_t) * forms.ones_inv_quad * forms.target_quad - 1.0;
    const double denom = c_t + (1.0 - c_t) * r_hat;
    if (!(std::abs(denom) > 1e-300)) {
        throw DegenerateError("shrinkage_intensity_singular: vanishing denominator");
    }
    return ShrinkageEstimate{r_hat, (1.0 - c_t) * r_hat / denom, b, c_t};
}

TestOutcome shrinkage_test_singular(
    const ReturnsMatrix& returns, const PortfolioWeights& r, Index q, double alpha,
    const std::function<void(const std::string&)>& warn) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("shrinkage_test_singular: alpha outside (0,1)");
    }
    const ShrinkageEstimate est = shrinkage_intensity_singular(returns, r, q, warn);
    const Index n = returns.n();
    const double s_n = std::sqrt(as_d(n)) * est.alpha_hat;
    const double null_sd = std::sqrt(2.0 * (1.0 - est.c_n) / est.c_n);
    TestOutcome out;
    out.statistic = s_n;
    out.standardized = s_n / null_sd;
    out.reference = ReferenceDist::NormalAsymptotic;
    out.alpha = alpha;
    out.c_n = est.c_n;
    out.effect_estimate = est.alpha_hat;
    out.p_value = 1.0 - dist::normal_cdf(out.standardized);
    out.reject = out.p_value < alpha;
    return out;
}

double power_shrinkage_singular(double relative_loss_mp, Index q, Index n,
                                double alpha) {
    if (relative_loss_mp < 0.0) throw InputError("power_shrinkage_singular: R+ < 0");
    if (!(q >= 1 && q < n)) throw InputError("power_shrinkage_singular: need 1 <= q < n");
    const double c_t = as_d(q) / as_d(n);
    const double z = dist::normal_quantile(1.0 - alpha);
    const CltParams params = shrinkage_clt_params(relative_loss_mp, c_t);
    const double null_sd = shrinkage_clt_params(0.0, c_t).spread;
    const double arg =
        (null_sd * z - std::sqrt(as_d(n)) * params.center) / params.spread;
    return 1.0 - dist::normal_cdf(arg);
}

BonferroniOutcome bonferroni_full_test(const ReturnsMatrix& returns,
                                       const PortfolioWeights& r, Index q,
                                       double alpha, Index block_size) {
    const Index p = returns.p();
    if (r.weights.size() != p) throw InputError("bonferroni_full_test: size mismatch");
    if (block_size < 1 || block_size > q) {
        throw InputError("bonferroni_full_test: need 1 <= block_size <= q");
    }
    // The last weight is pinned by the sum constraint; blocks cover the
    // first p - 1 coordinates in input order.
    const Index covered = p - 1;
    const Index n_blocks = (covered + block_size - 1) / block_size;
    BonferroniOutcome out;
    out.alpha = alpha;
    out.per_block_alpha = alpha / static_cast<double>(n_blocks);
    for (Index first = 0; first < covered; first += block_size) {
        const Index k = std::min(block_size, covered - first);
        SingularTestConfig config;
        config.q = q;
        config.l = selection_matrix(p, first, k);
        config.alpha = out.per_block_alpha;
        const VectorXd r_star = r.weights.segment(first, k);
        TestOutcome block = mahalanobis_test_singular(returns, config, r_star);
        out.reject = out.reject || block.reject;
        out.blocks.push_back(block);
        out.block_ranges.emplace_back(first, first + k);
    }
    return out;
}

}  // namespace gmvp
