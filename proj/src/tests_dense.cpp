#include "gmvp/tests_dense.hpp"

#include <cmath>

#include "gmvp/distributions.hpp"
#include "gmvp/errors.hpp"
#include "gmvp/linalg.hpp"

namespace gmvp {

namespace {

constexpr double kWeightSumTol = 1e-10;

void require_target(const VectorXd& r, Index p, const char* who) {
    if (r.size() != p) throw InputError(std::string(who) + ": target size mismatch");
    if (std::abs(r.sum() - 1.0) > kWeightSumTol) {
        throw InputError(std::string(who) + ": target weights must sum to 1");
    }
}

// Nodes/weights of the 20-point Gauss-Legendre rule on [-1, 1].
constexpr int kGlPoints = 20;
constexpr double kGlNodes[kGlPoints] = {
    -0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
    -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
    -0.5108670019508271, -0.3737060887154195, -0.2277858511416451,
    -0.0765265211334973, 0.0765265211334973,  0.2277858511416451,
    0.3737060887154195,  0.5108670019508271,  0.6360536807265150,
    0.7463319064601508,  0.8391169718222188,  0.9122344282513259,
    0.9639719272779138,  0.9931285991850949};
constexpr double kGlWeights[kGlPoints] = {
    0.0176140071391521, 0.0406014298003869, 0.0626720483341091,
    0.0832767415767048, 0.1019301198172404, 0.1181945319615184,
    0.1316886384491766, 0.1420961093183820, 0.1491729864726037,
    0.1527533871307258, 0.1527533871307258, 0.1491729864726037,
    0.1420961093183820, 0.1316886384491766, 0.1181945319615184,
    0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};

double mixture_tail_integral(double lambda, Index p, Index n, double f_crit,
                             int panels) {
    const double d1 = static_cast<double>(p - 1);
    const double d2 = static_cast<double>(n - p);
    const double df_mix = static_cast<double>(n - 1);
    const double lo = dist::chi_squared_quantile(1e-10, df_mix);
    const double hi = dist::chi_squared_quantile(1.0 - 1e-10, df_mix);
    const double width = (hi - lo) / panels;
    double acc = 0.0;
    for (int s = 0; s < panels; ++s) {
        const double a = lo + s * width;
        const double mid = a + 0.5 * width;
        const double half = 0.5 * width;
        for (int i = 0; i < kGlPoints; ++i) {
            const double t = mid + half * kGlNodes[i];
            acc += kGlWeights[i] * half * dist::chi_squared_pdf(t, df_mix) *
                   dist::noncentral_f_sf(f_crit, d1, d2, lambda * t);
        }
    }
    return acc;
}

}  // namespace

namespace detail {

DenseForms dense_forms(const ReturnsMatrix& returns, const VectorXd& r) {
    const Index n = returns.n();
    const Index p = returns.p();
    if (n <= p) {
        throw InputError("dense test: requires n > p (use the singular path)");
    }
    MatrixXd xc = linalg::center_columns(returns.data);
    MatrixXd s = linalg::gram(xc);
    s *= 1.0 / static_cast<double>(n - 1);
    const double rsr = linalg::quad_form(s, r);
    if (!linalg::cholesky_upper_inplace(s)) {
        throw DegenerateError("dense test: sample covariance is singular");
    }
    const double s11 = linalg::inv_quad_form(s, VectorXd::Ones(p));
    return DenseForms{s11, rsr};
}

}  // namespace detail

double mahalanobis_statistic(const ReturnsMatrix& returns, const PortfolioWeights& r) {
    const Index n = returns.n();
    const Index p = returns.p();
    require_target(r.weights, p, "mahalanobis_statistic");
    const auto forms = detail::dense_forms(returns, r.weights);
    // (w* - r*)'(Q*)^{-1}(w* - r*) = r'Sr - 1/(1'S^{-1}1) exactly.
    const double quad = forms.ones_inv_quad * forms.target_quad - 1.0;
    const double scale = static_cast<double>(n - p) / static_cast<double>(p - 1);
    return std::max(0.0, scale * quad);
}

TestOutcome mahalanobis_test(const ReturnsMatrix& returns, const PortfolioWeights& r,
                             double alpha, ReferenceDist mode) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("mahalanobis_test: alpha outside (0,1)");
    }
    const Index n = returns.n();
    const Index p = returns.p();
    const double t = mahalanobis_statistic(returns, r);
    const double c_n = static_cast<double>(p) / static_cast<double>(n);
    TestOutcome out;
    out.statistic = t;
    out.reference = mode;
    out.alpha = alpha;
    out.c_n = c_n;
    out.standardized =
        std::sqrt(static_cast<double>(p - 1)) * (t - 1.0) / std::sqrt(2.0 / (1.0 - c_n));
    out.effect_estimate =
        t * static_cast<double>(p - 1) / static_cast<double>(n - p);
    if (mode == ReferenceDist::FExact) {
        out.p_value = 1.0 - dist::f_cdf(t, static_cast<double>(p - 1),
                                        static_cast<double>(n - p));
    } else {
        out.p_value = 1.0 - dist::normal_cdf(out.standardized);
    }
    out.reject = out.p_value < alpha;
    return out;
}

double c_spread(double lambda, double c_n) {
    if (!(c_n > 0.0 && c_n < 1.0)) throw InputError("c_spread: c_n outside (0,1)");
    if (lambda < 0.0) throw InputError("c_spread: lambda must be >= 0");
    const double ratio = lambda / c_n;
    return std::sqrt(2.0 + 2.0 * lambda * ratio + 4.0 * ratio +
                     2.0 * c_n / (1.0 - c_n) * (1.0 + ratio) * (1.0 + ratio));
}

double power_mahalanobis_asymptotic(double lambda, Index p, Index n, double alpha) {
    if (lambda < 0.0) throw InputError("power_mahalanobis_asymptotic: lambda < 0");
    if (n <= p || p < 2) throw InputError("power_mahalanobis_asymptotic: need n > p >= 2");
    const double c_n = static_cast<double>(p) / static_cast<double>(n);
    const double z = dist::normal_quantile(1.0 - alpha);
    const double null_sd = c_spread(0.0, c_n);
    const double spread = c_spread(lambda, c_n);
    const double shift = std::sqrt(static_cast<double>(p - 1)) * lambda / c_n;
    return 1.0 - dist::normal_cdf((null_sd * z - shift) / spread);
}

double power_mahalanobis_exact(double lambda, Index p, Index n, double alpha) {
    if (lambda < 0.0) throw InputError("power_mahalanobis_exact: lambda < 0");
    if (n <= p || p < 2) throw InputError("power_mahalanobis_exact: need n > p >= 2");
    if (p > 50 || n > 200) {
        throw UnsupportedError(
            "power_mahalanobis_exact: limited to p <= 50, n <= 200; "
            "use power_mahalanobis_asymptotic");
    }
    const double d1 = static_cast<double>(p - 1);
    const double d2 = static_cast<double>(n - p);
    const double f_crit = dist::f_quantile(1.0 - alpha, d1, d2);
    if (lambda == 0.0) return 1.0 - dist::f_cdf(f_crit, d1, d2);
    // Double the panel count until the quadrature settles.
    double prev = mixture_tail_integral(lambda, p, n, f_crit, 8);
    for (int panels = 16; panels <= 128; panels *= 2) {
        const double cur = mixture_tail_integral(lambda, p, n, f_crit, panels);
        if (std::abs(cur - prev) < 1e-9) return cur;
        prev = cur;
    }
    return prev;
}

ShrinkageEstimate shrinkage_intensity(const ReturnsMatrix& returns,
                                      const PortfolioWeights& b) {
    const Index n = returns.n();
    const Index p = returns.p();
    require_target(b.weights, p, "shrinkage_intensity");
    const auto forms = detail::dense_forms(returns, b.weights);
    const double c_n = static_cast<double>(p) / static_cast<double>(n);
    const double r_hat = (1.0 - c_n) * forms.target_quad * forms.ones_inv_quad - 1.0;
    const double denom = c_n + (1.0 - c_n) * r_hat;
    if (!(std::abs(denom) > 1e-300)) {
        throw DegenerateError("shrinkage_intensity: vanishing intensity denominator");
    }
    return ShrinkageEstimate{r_hat, (1.0 - c_n) * r_hat / denom, b, c_n};
}

CltParams shrinkage_clt_params(double relative_loss, double c_n) {
    if (!(c_n > 0.0 && c_n < 1.0)) throw InputError("shrinkage_clt_params: c_n outside (0,1)");
    if (relative_loss < 0.0) throw InputError("shrinkage_clt_params: R must be >= 0");
    const double r = relative_loss;
    const double denom = c_n + r * (1.0 - c_n);
    const double center = (1.0 - c_n) * r / denom;
    const double b2 = 2.0 * c_n * c_n * (1.0 - c_n) * (2.0 - c_n) * (r + 1.0) /
                      (denom * denom * denom * denom) * (r + c_n / (2.0 - c_n));
    return CltParams{center, std::sqrt(b2)};
}

TestOutcome shrinkage_test(const ReturnsMatrix& returns, const PortfolioWeights& r,
                           double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("shrinkage_test: alpha outside (0,1)");
    const ShrinkageEstimate est = shrinkage_intensity(returns, r);
    const Index n = returns.n();
    const double s_n = std::sqrt(static_cast<double>(n)) * est.alpha_hat;
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

double power_shrinkage_asymptotic(double relative_loss, Index p, Index n, double alpha) {
    if (relative_loss < 0.0) throw InputError("power_shrinkage_asymptotic: R < 0");
    if (n <= p || p < 1) throw InputError("power_shrinkage_asymptotic: need n > p >= 1");
    const double c_n = static_cast<double>(p) / static_cast<double>(n);
    const double z = dist::normal_quantile(1.0 - alpha);
    const CltParams params = shrinkage_clt_params(relative_loss, c_n);
    const double null_sd = shrinkage_clt_params(0.0, c_n).spread;
    const double arg =
        (null_sd * z - std::sqrt(static_cast<double>(n)) * params.center) / params.spread;
    return 1.0 - dist::normal_cdf(arg);
}

}  // namespace gmvp
