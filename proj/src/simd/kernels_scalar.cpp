#include <cmath>

#include "neumaier.hpp"
#include "rankone/simd/kernels.hpp"

namespace rankone::simd {

namespace {

void modulus(const cplx* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = in[i].real(), im = in[i].imag();
        out[i] = std::sqrt(re * re + im * im);
    }
}

void modulus_sq(const cplx* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double re = in[i].real(), im = in[i].imag();
        out[i] = re * re + im * im;
    }
}

void scaled_real(const cplx* in, double scale, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = scale * in[i].real();
}

void multiply(double* acc, const double* f, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] *= f[i];
}

void abs_deviation(const double* x, double c, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(x[i] - c);
}

PairSum pair_sum(const double* x, std::size_t n) {
    detail::Neumaier even, odd;
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        even.add(x[i]);
        odd.add(x[i + 1]);
    }
    if (n % 2 == 1) even.add(x[n - 1]);
    return {even.value(), odd.value()};
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", modulus, modulus_sq, scaled_real, multiply, abs_deviation, pair_sum};
    return table;
}

}  // namespace rankone::simd
