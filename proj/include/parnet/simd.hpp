#pragma once

#include <cstddef>

#include "parnet/network.hpp"

#if defined(__x86_64__) && defined(__GNUC__) && !defined(PARNET_NO_VECTOR_MATH)
#define PARNET_VECTOR_MATH 1
#include <immintrin.h>

// glibc's vectorized exp kernels; resolved from libmvec at link time.
extern "C" {
__m256d _ZGVdN4v_exp(__m256d);
__m512d _ZGVeN8v_exp(__m512d);
}
#endif

namespace parnet {

// In-place logistic over a buffer.  The training loop funnels every
// squasher evaluation of a full gradient step through here, so the wide
// paths matter; all paths use the same branchless form
//   t = e^{-|x|},  sigma(x) = (x >= 0 ? 1 : t) / (1 + t)
// which matches the scalar overflow-safe evaluation.
inline void logistic_inplace_scalar(double* values, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) values[i] = logistic(values[i]);
}

#ifdef PARNET_VECTOR_MATH

__attribute__((target("avx2"))) inline void logistic_inplace_avx2(double* values,
                                                                  std::size_t count) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        __m256d x = _mm256_loadu_pd(values + i);
        __m256d neg_abs = _mm256_min_pd(x, _mm256_sub_pd(zero, x));
        __m256d t = _ZGVdN4v_exp(neg_abs);
        __m256d num = _mm256_blendv_pd(one, t, _mm256_cmp_pd(x, zero, _CMP_LT_OQ));
        _mm256_storeu_pd(values + i, _mm256_div_pd(num, _mm256_add_pd(one, t)));
    }
    logistic_inplace_scalar(values + i, count - i);
}

__attribute__((target("avx512f"))) inline void logistic_inplace_avx512(double* values,
                                                                       std::size_t count) {
    const __m512d zero = _mm512_setzero_pd();
    const __m512d one = _mm512_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 8 <= count; i += 8) {
        __m512d x = _mm512_loadu_pd(values + i);
        __m512d neg_abs = _mm512_min_pd(x, _mm512_sub_pd(zero, x));
        __m512d t = _ZGVeN8v_exp(neg_abs);
        __mmask8 negative = _mm512_cmp_pd_mask(x, zero, _CMP_LT_OQ);
        __m512d num = _mm512_mask_blend_pd(negative, one, t);
        _mm512_storeu_pd(values + i, _mm512_div_pd(num, _mm512_add_pd(one, t)));
    }
    logistic_inplace_scalar(values + i, count - i);
}

inline int vector_math_level() {
    static const int level = [] {
        __builtin_cpu_init();
        if (__builtin_cpu_supports("avx512f")) return 2;
        if (__builtin_cpu_supports("avx2")) return 1;
        return 0;
    }();
    return level;
}

inline void logistic_inplace(double* values, std::size_t count) {
    switch (vector_math_level()) {
        case 2: logistic_inplace_avx512(values, count); break;
        case 1: logistic_inplace_avx2(values, count); break;
        default: logistic_inplace_scalar(values, count); break;
    }
}

#else

inline void logistic_inplace(double* values, std::size_t count) {
    logistic_inplace_scalar(values, count);
}

#endif

} // namespace parnet
