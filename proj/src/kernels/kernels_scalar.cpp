#include "gmvp/kernels/kernels.hpp"

namespace gmvp::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc0 += x[i] * y[i];
        acc1 += x[i + 1] * y[i + 1];
    }
    if (i < n) acc0 += x[i] * y[i];
    return acc0 + acc1;
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double sum_scalar(const double* x, std::size_t n) {
    double acc0 = 0.0, acc1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc0 += x[i];
        acc1 += x[i + 1];
    }
    if (i < n) acc0 += x[i];
    return acc0 + acc1;
}

void syrk_upper_scalar(const double* x, std::size_t n, std::size_t p,
                       std::size_t ldx, double* s, std::size_t lds) {
    for (std::size_t j = 0; j < p; ++j) {
        const double* cj = x + j * ldx;
        for (std::size_t i = 0; i <= j; ++i) {
            s[i + j * lds] = dot_scalar(x + i * ldx, cj, n);
        }
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{dot_scalar, axpy_scalar, sum_scalar, syrk_upper_scalar,
                         "scalar"};
    return ops;
}

}  // namespace gmvp::kernels
