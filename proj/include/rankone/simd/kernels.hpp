#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace rankone::simd {

using cplx = std::complex<double>;

/// Compensated sums of the even- and odd-indexed entries. The even sum alone is
/// the Riemann sum on the grid of half the size.
struct PairSum {
    double even = 0.0;
    double odd = 0.0;
};

/// Inner loops over grid values. Every table computes elementwise results
/// bit-identically to the scalar reference; `pair_sum` agrees to rounding.
struct KernelTable {
    const char* name;
    /// out[i] = sqrt(re^2 + im^2)
    void (*modulus)(const cplx* in, double* out, std::size_t n);
    /// out[i] = re^2 + im^2
    void (*modulus_sq)(const cplx* in, double* out, std::size_t n);
    /// out[i] = scale * re
    void (*scaled_real)(const cplx* in, double scale, double* out, std::size_t n);
    /// acc[i] *= f[i]
    void (*multiply)(double* acc, const double* f, std::size_t n);
    /// out[i] = |x[i] - c|
    void (*abs_deviation)(const double* x, double c, double* out, std::size_t n);
    PairSum (*pair_sum)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when AVX2 was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

/// The table in use. Chosen on first call from the CPU, overridable by the
/// RANKONE_SIMD environment variable ("scalar", "avx2", "auto").
const KernelTable& active_kernels();

/// Force a table by name; returns false if unavailable.
bool select_kernels(std::string_view name);

}  // namespace rankone::simd
