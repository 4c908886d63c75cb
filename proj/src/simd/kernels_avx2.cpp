// Compiled with -mavx2 and without FMA contraction so elementwise results match
// the scalar reference bit for bit.
#include <immintrin.h>

#include <cmath>

#include "neumaier.hpp"
#include "rankone/simd/kernels.hpp"

namespace rankone::simd {

namespace {

// [|z0|^2 |z1|^2 |z2|^2 |z3|^2] from four interleaved complex values.
inline __m256d norm4(const cplx* in) {
    const double* p = reinterpret_cast<const double*>(in);
    const __m256d a = _mm256_loadu_pd(p);      // r0 i0 r1 i1
    const __m256d b = _mm256_loadu_pd(p + 4);  // r2 i2 r3 i3
    const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));  // n0 n2 n1 n3
    return _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
}

inline __m256d real4(const cplx* in) {
    const double* p = reinterpret_cast<const double*>(in);
    const __m256d a = _mm256_loadu_pd(p);
    const __m256d b = _mm256_loadu_pd(p + 4);
    return _mm256_permute4x64_pd(_mm256_unpacklo_pd(a, b), _MM_SHUFFLE(3, 1, 2, 0));
}

void modulus(const cplx* in, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_sqrt_pd(norm4(in + i)));
    for (; i < n; ++i) {
        const double re = in[i].real(), im = in[i].imag();
        out[i] = std::sqrt(re * re + im * im);
    }
}

void modulus_sq(const cplx* in, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, norm4(in + i));
    for (; i < n; ++i) {
        const double re = in[i].real(), im = in[i].imag();
        out[i] = re * re + im * im;
    }
}

void scaled_real(const cplx* in, double scale, double* out, std::size_t n) {
    const __m256d s = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(s, real4(in + i)));
    for (; i < n; ++i) out[i] = scale * in[i].real();
}

void multiply(double* acc, const double* f, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(acc + i, _mm256_mul_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(f + i)));
    for (; i < n; ++i) acc[i] *= f[i];
}

void abs_deviation(const double* x, double c, double* out, std::size_t n) {
    const __m256d cc = _mm256_set1_pd(c);
    const __m256d sign = _mm256_set1_pd(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_andnot_pd(sign, _mm256_sub_pd(_mm256_loadu_pd(x + i), cc)));
    for (; i < n; ++i) out[i] = std::fabs(x[i] - c);
}

PairSum pair_sum(const double* x, std::size_t n) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d sum = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x + i);
        const __m256d t = _mm256_add_pd(sum, v);
        const __m256d big = _mm256_cmp_pd(_mm256_andnot_pd(sign, sum), _mm256_andnot_pd(sign, v), _CMP_GE_OQ);
        const __m256d from_sum = _mm256_add_pd(_mm256_sub_pd(sum, t), v);
        const __m256d from_v = _mm256_add_pd(_mm256_sub_pd(v, t), sum);
        comp = _mm256_add_pd(comp, _mm256_blendv_pd(from_v, from_sum, big));
        sum = t;
    }
    alignas(32) double s[4], c[4];
    _mm256_store_pd(s, sum);
    _mm256_store_pd(c, comp);
    detail::Neumaier even, odd;
    even.add(s[0]);
    even.add(s[2]);
    even.add(c[0]);
    even.add(c[2]);
    odd.add(s[1]);
    odd.add(s[3]);
    odd.add(c[1]);
    odd.add(c[3]);
    // i is a multiple of 4 here, so parity of the tail index is parity of the offset.
    for (; i < n; ++i) ((i % 2 == 0) ? even : odd).add(x[i]);
    return {even.value(), odd.value()};
}

}  // namespace

const KernelTable* avx2_kernels_impl() {
    static const KernelTable table{"avx2", modulus, modulus_sq, scaled_real, multiply, abs_deviation, pair_sum};
    return &table;
}

}  // namespace rankone::simd
