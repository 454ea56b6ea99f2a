#include "gmvp/distributions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/non_central_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "gmvp/errors.hpp"

namespace gmvp::dist {

namespace bm = boost::math;

double normal_cdf(double x) { return bm::cdf(bm::normal_distribution<>(), x); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p outside (0,1)");
    return bm::quantile(bm::normal_distribution<>(), p);
}

double f_cdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    return bm::cdf(bm::fisher_f_distribution<>(d1, d2), x);
}

double f_pdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    return bm::pdf(bm::fisher_f_distribution<>(d1, d2), x);
}

double f_quantile(double p, double d1, double d2) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("f_quantile: p outside (0,1)");
    return bm::quantile(bm::fisher_f_distribution<>(d1, d2), p);
}

double chi_squared_pdf(double x, double df) {
    if (x < 0.0) return 0.0;
    return bm::pdf(bm::chi_squared_distribution<>(df), x);
}

double chi_squared_cdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    return bm::cdf(bm::chi_squared_distribution<>(df), x);
}

double chi_squared_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("chi_squared_quantile: p outside (0,1)");
    return bm::quantile(bm::chi_squared_distribution<>(df), p);
}

double noncentral_f_sf(double x, double d1, double d2, double delta) {
    if (x <= 0.0) return 1.0;
    if (delta <= 0.0) return bm::cdf(bm::complement(bm::fisher_f_distribution<>(d1, d2), x));
    return bm::cdf(bm::complement(bm::non_central_f_distribution<>(d1, d2, delta), x));
}

double hyp2f1_series(double a, double b, double c, double z) {
    if (!(std::abs(z) < 1.0)) throw InputError("hyp2f1_series: |z| must be < 1");
    double term = 1.0;
    double sum = 1.0;
    for (int i = 0; i < 100000; ++i) {
        const double di = static_cast<double>(i);
        term *= (a + di) * (b + di) / (c + di) * z / (di + 1.0);
        sum += term;
        if (std::abs(term) < 1e-14 * std::abs(sum)) break;
    }
    return sum;
}

double mahalanobis_alternative_density_series(double x, double lambda,
                                              Eigen::Index p, Eigen::Index n) {
    if (p - 1 > 10 || n > 50) {
        throw UnsupportedError(
            "series density limited to p - 1 <= 10, n <= 50; use the mixture form");
    }
    if (x <= 0.0) return 0.0;
    const double d1 = static_cast<double>(p - 1);
    const double d2 = static_cast<double>(n - p);
    const double z = (d1 * x / (d2 + d1 * x)) * (lambda / (1.0 + lambda));
    const double hyp = hyp2f1_series(0.5 * (n - 1), 0.5 * (n - 1), 0.5 * d1, z);
    return f_pdf(x, d1, d2) * std::pow(1.0 + lambda, -0.5 * (n - 1)) * hyp;
}

}  // namespace gmvp::dist
