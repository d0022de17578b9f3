#include "gstl/kernels.hpp"

#if defined(GSTL_HAVE_NEON_BACKEND)

#include <arm_neon.h>

// Two 2-lane accumulators emulate the 4-lane stripe of the reference, so
// the reduction order matches scalar and AVX2 exactly. No vfmaq.

namespace gstl::kernels::detail {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc23 = vaddq_f64(acc23,
                          vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double acc[4] = {vgetq_lane_f64(acc01, 0), vgetq_lane_f64(acc01, 1),
                     vgetq_lane_f64(acc23, 0), vgetq_lane_f64(acc23, 1)};
    for (std::size_t i = n4; i < n; ++i) acc[i - n4] += a[i] * b[i];
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy_neon(double* y, double alpha, const double* x, std::size_t n) {
    const float64x2_t valpha = vdupq_n_f64(alpha);
    const std::size_t n2 = n & ~std::size_t(1);
    for (std::size_t i = 0; i < n2; i += 2) {
        const float64x2_t vy = vld1q_f64(y + i);
        const float64x2_t vx = vld1q_f64(x + i);
        vst1q_f64(y + i, vaddq_f64(vy, vmulq_f64(valpha, vx)));
    }
    for (std::size_t i = n2; i < n; ++i) y[i] += alpha * x[i];
}

void scale_neon(double* x, double s, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s);
    const std::size_t n2 = n & ~std::size_t(1);
    for (std::size_t i = 0; i < n2; i += 2) {
        vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), vs));
    }
    for (std::size_t i = n2; i < n; ++i) x[i] *= s;
}

}  // namespace gstl::kernels::detail

#endif  // GSTL_HAVE_NEON_BACKEND
