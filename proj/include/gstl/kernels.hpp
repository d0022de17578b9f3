#pragma once

#include <cstddef>

// Dense inner-loop kernels with runtime backend selection. Every backend
// implements the same fixed reduction order -- four striped partial sums
// combined as (s0 + s2) + (s1 + s3), no FMA -- so scalar, AVX2 and NEON
// results are bit-identical. Anything built on top stays reproducible no
// matter which backend the dispatcher picks.

namespace gstl::kernels {

double dot(const double* a, const double* b, std::size_t n);
double sumsq(const double* a, std::size_t n);

// y[i] += alpha * x[i]
void axpy(double* y, double alpha, const double* x, std::size_t n);

// x[i] *= s
void scale(double* x, double s, std::size_t n);

// Name of the backend in use: "scalar", "avx2" or "neon". Selection happens
// once, at first kernel call; GSTL_SIMD=scalar|avx2|neon overrides detection
// (unavailable choices fall back to scalar).
const char* active_backend();

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double* y, double alpha, const double* x, std::size_t n);
void scale_scalar(double* x, double s, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
#define GSTL_HAVE_AVX2_BACKEND 1
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double* y, double alpha, const double* x, std::size_t n);
void scale_avx2(double* x, double s, std::size_t n);
#endif

#if defined(__aarch64__)
#define GSTL_HAVE_NEON_BACKEND 1
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double* y, double alpha, const double* x, std::size_t n);
void scale_neon(double* x, double s, std::size_t n);
#endif

}  // namespace detail

}  // namespace gstl::kernels
