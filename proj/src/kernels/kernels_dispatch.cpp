#include "gmvp/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace gmvp::kernels {

#if defined(GMVP_AVX2_TU)
const Ops* avx2_ops_impl();
#endif

const Ops* avx2_ops() {
#if defined(GMVP_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
    static const Ops* ops = []() -> const Ops* {
        if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
            return avx2_ops_impl();
        }
        return nullptr;
    }();
    return ops;
#else
    return nullptr;
#endif
}

namespace {

const Ops* select_default() {
    if (const char* env = std::getenv("GMVP_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
        if (std::strcmp(env, "avx2") == 0 && avx2_ops() != nullptr) return avx2_ops();
    }
    if (const Ops* v = avx2_ops()) return v;
    return &scalar_ops();
}

const Ops*& active_slot() {
    static const Ops* active = select_default();
    return active;
}

}  // namespace

const Ops& active_ops() { return *active_slot(); }

bool force_backend(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        active_slot() = &scalar_ops();
        return true;
    }
    if (std::strcmp(name, "avx2") == 0) {
        if (const Ops* v = avx2_ops()) {
            active_slot() = v;
            return true;
        }
        return false;
    }
    return false;
}

}  // namespace gmvp::kernels
