#include "gmvp/samplers.hpp"

#include <cmath>

#include "gmvp/distributions.hpp"
#include "gmvp/errors.hpp"

namespace gmvp {

double sample_tn_stochastic(double lambda, Index p, Index n, Rng& rng) {
    if (lambda < 0.0) throw InputError("sample_tn_stochastic: lambda < 0");
    if (p < 2 || n <= p) throw InputError("sample_tn_stochastic: need n > p >= 2");
    const double w1 = rng.normal();
    const double xi2 = rng.chi_squared(static_cast<double>(n - p));
    const double xi3 = rng.chi_squared(static_cast<double>(n - 1));
    const double xi4 = rng.chi_squared(static_cast<double>(p - 2));
    const double shifted = std::sqrt(lambda * xi3) + w1;
    return static_cast<double>(n - p) / static_cast<double>(p - 1) *
           (shifted * shifted + xi4) / xi2;
}

double sample_tn_singular_stochastic(double lambda_tilde, Index q, Index k, Index n,
                                     Rng& rng) {
    if (lambda_tilde < 0.0) throw InputError("sample_tn_singular_stochastic: lambda~ < 0");
    if (!(k >= 1 && k <= q && q < n)) {
        throw InputError("sample_tn_singular_stochastic: need 1 <= k <= q < n");
    }
    const double w1 = rng.normal();
    const double xi2 = rng.chi_squared(static_cast<double>(n - q));
    const double xi3 = rng.chi_squared(static_cast<double>(n - q + k));
    const double xi4 = rng.chi_squared(static_cast<double>(k - 1));
    const double shifted = std::sqrt(lambda_tilde * xi3) + w1;
    return static_cast<double>(n - q) / static_cast<double>(k) *
           (shifted * shifted + xi4) / xi2;
}

Estimate empirical_power_stochastic(double lambda, Index p, Index n, double alpha,
                                    Index b, RngStream stream) {
    if (b < 100) throw InputError("empirical_power_stochastic: need B >= 100");
    const double c_n = static_cast<double>(p) / static_cast<double>(n);
    const double z = dist::normal_quantile(1.0 - alpha);
    const double null_sd = std::sqrt(2.0 / (1.0 - c_n));
    const double scale = std::sqrt(static_cast<double>(p - 1));
    Rng rng(stream);
    long long rejections = 0;
    for (Index i = 0; i < b; ++i) {
        const double t = sample_tn_stochastic(lambda, p, n, rng);
        if (scale * (t - 1.0) / null_sd > z) ++rejections;
    }
    const double est = static_cast<double>(rejections) / static_cast<double>(b);
    return Estimate{est, std::sqrt(est * (1.0 - est) / static_cast<double>(b))};
}

}  // namespace gmvp
