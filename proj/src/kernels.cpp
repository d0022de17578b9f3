#include "gstl/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace gstl::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    for (std::size_t i = n4; i < n; ++i) acc[i - n4] += a[i] * b[i];
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

}  // namespace detail

namespace {

struct Backend {
    const char* name;
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double*, double, const double*, std::size_t);
    void (*scale)(double*, double, std::size_t);
};

constexpr Backend kScalar{"scalar", detail::dot_scalar, detail::axpy_scalar,
                          detail::scale_scalar};

Backend resolve() {
    const char* want = std::getenv("GSTL_SIMD");
    if (want && std::strcmp(want, "scalar") == 0) return kScalar;
#if defined(GSTL_HAVE_AVX2_BACKEND)
    if ((!want || std::strcmp(want, "avx2") == 0) &&
        __builtin_cpu_supports("avx2")) {
        return Backend{"avx2", detail::dot_avx2, detail::axpy_avx2,
                       detail::scale_avx2};
    }
#endif
#if defined(GSTL_HAVE_NEON_BACKEND)
    if (!want || std::strcmp(want, "neon") == 0) {
        return Backend{"neon", detail::dot_neon, detail::axpy_neon,
                       detail::scale_neon};
    }
#endif
    return kScalar;
}

const Backend& backend() {
    static const Backend b = resolve();
    return b;
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return backend().dot(a, b, n);
}

double sumsq(const double* a, std::size_t n) { return backend().dot(a, a, n); }

void axpy(double* y, double alpha, const double* x, std::size_t n) {
    backend().axpy(y, alpha, x, n);
}

void scale(double* x, double s, std::size_t n) { backend().scale(x, s, n); }

const char* active_backend() { return backend().name; }

}  // namespace gstl::kernels
