#include "gstl/kernels.hpp"

#if defined(GSTL_HAVE_AVX2_BACKEND)

#include <immintrin.h>

// No FMA: mul-then-add keeps every lane bit-identical to the scalar
// reference, which uses the same striped accumulation.

namespace gstl::kernels::detail {

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d vacc = _mm256_setzero_pd();
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        vacc = _mm256_add_pd(vacc, _mm256_mul_pd(va, vb));
    }
    alignas(32) double acc[4];
    _mm256_store_pd(acc, vacc);
    for (std::size_t i = n4; i < n; ++i) acc[i - n4] += a[i] * b[i];
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
    const __m256d valpha = _mm256_set1_pd(alpha);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(valpha, vx)));
    }
    for (std::size_t i = n4; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double* x, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
    }
    for (std::size_t i = n4; i < n; ++i) x[i] *= s;
}

}  // namespace gstl::kernels::detail

#endif  // GSTL_HAVE_AVX2_BACKEND
