#pragma once

#include <cstddef>

// Data-parallel inner loops used by the covariance and simulation paths.
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2+FMA variant. The active backend is chosen once at startup from the
// CPU feature set; GMVP_SIMD=scalar|avx2 overrides the choice. SIMD
// reductions reorder the summation, so variants agree with the reference
// to rounding, not bit-exactly; equivalence is asserted by tests/test_kernels.

namespace gmvp::kernels {

struct Ops {
    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);
    // sum_i x[i]
    double (*sum)(const double* x, std::size_t n);
    // Upper triangle of S = X'X for a column-major X (n rows, p cols,
    // column stride ldx). S is column-major with stride lds; entries with
    // row > col are left untouched.
    void (*syrk_upper)(const double* x, std::size_t n, std::size_t p,
                       std::size_t ldx, double* s, std::size_t lds);
    const char* name;
};

const Ops& scalar_ops();

// nullptr when the binary was built without the AVX2 translation unit or
// the CPU lacks AVX2/FMA.
const Ops* avx2_ops();

// Backend selected at startup (honors GMVP_SIMD).
const Ops& active_ops();

// Test hook: force a backend by name ("scalar", "avx2"). Returns false if
// the backend is unavailable.
bool force_backend(const char* name);

}  // namespace gmvp::kernels
