#include "gmvp/kernels/kernels.hpp"

#include <immintrin.h>

// AVX2+FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; it must not be entered unless the CPU supports both
// (kernels_dispatch.cpp checks at startup).

namespace gmvp::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    acc0 = _mm256_add_pd(acc0, acc1);
    acc2 = _mm256_add_pd(acc2, acc3);
    return hsum(_mm256_add_pd(acc0, acc2)) + tail;
}

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        y0 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), y0);
        y1 = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), y1);
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double sum_avx2(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i];
    return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

// 2x2 column tile: four dot products sharing loads of the two left columns.
inline void dot_2x2(const double* a0, const double* a1, const double* b0,
                    const double* b1, std::size_t n, double* out) {
    __m256d s00 = _mm256_setzero_pd();
    __m256d s01 = _mm256_setzero_pd();
    __m256d s10 = _mm256_setzero_pd();
    __m256d s11 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va0 = _mm256_loadu_pd(a0 + i);
        const __m256d va1 = _mm256_loadu_pd(a1 + i);
        const __m256d vb0 = _mm256_loadu_pd(b0 + i);
        const __m256d vb1 = _mm256_loadu_pd(b1 + i);
        s00 = _mm256_fmadd_pd(va0, vb0, s00);
        s01 = _mm256_fmadd_pd(va0, vb1, s01);
        s10 = _mm256_fmadd_pd(va1, vb0, s10);
        s11 = _mm256_fmadd_pd(va1, vb1, s11);
    }
    double t00 = 0.0, t01 = 0.0, t10 = 0.0, t11 = 0.0;
    for (; i < n; ++i) {
        t00 += a0[i] * b0[i];
        t01 += a0[i] * b1[i];
        t10 += a1[i] * b0[i];
        t11 += a1[i] * b1[i];
    }
    out[0] = hsum(s00) + t00;
    out[1] = hsum(s01) + t01;
    out[2] = hsum(s10) + t10;
    out[3] = hsum(s11) + t11;
}

void syrk_upper_avx2(const double* x, std::size_t n, std::size_t p,
                     std::size_t ldx, double* s, std::size_t lds) {
    double tile[4];
    for (std::size_t j = 0; j + 2 <= p; j += 2) {
        const double* cj0 = x + j * ldx;
        const double* cj1 = x + (j + 1) * ldx;
        std::size_t i = 0;
        for (; i + 2 <= j; i += 2) {
            dot_2x2(x + i * ldx, x + (i + 1) * ldx, cj0, cj1, n, tile);
            s[i + j * lds] = tile[0];
            s[i + (j + 1) * lds] = tile[1];
            s[i + 1 + j * lds] = tile[2];
            s[i + 1 + (j + 1) * lds] = tile[3];
        }
        if (i < j) {  // single row above the diagonal block
            s[i + j * lds] = dot_avx2(x + i * ldx, cj0, n);
            s[i + (j + 1) * lds] = dot_avx2(x + i * ldx, cj1, n);
            ++i;
        }
        // 2x2 diagonal block (upper part only)
        s[j + j * lds] = dot_avx2(cj0, cj0, n);
        s[j + (j + 1) * lds] = dot_avx2(cj0, cj1, n);
        s[j + 1 + (j + 1) * lds] = dot_avx2(cj1, cj1, n);
    }
    if (p % 2 != 0) {
        const std::size_t j = p - 1;
        const double* cj = x + j * ldx;
        for (std::size_t i = 0; i <= j; ++i) {
            s[i + j * lds] = dot_avx2(x + i * ldx, cj, n);
        }
    }
}

}  // namespace

const Ops* avx2_ops_impl() {
    static const Ops ops{dot_avx2, axpy_avx2, sum_avx2, syrk_upper_avx2, "avx2"};
    return &ops;
}

}  // namespace gmvp::kernels
