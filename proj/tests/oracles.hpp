#pragma once

// Independent reference computations for the tests: naive summation in long
// double, brute-force expansion over sign vectors, and closed forms.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "rankone/bigint.hpp"

namespace oracle {

using rankone::BigInt;
using lcplx = std::complex<long double>;

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

/// p^{-1/2} sum_j exp(-i e_j t_m), t_m = 2 pi m / N, by direct summation.
inline lcplx poly_at_node(const std::vector<BigInt>& exps, std::size_t n, std::size_t m) {
    lcplx s = 0;
    for (const auto& e : exps) {
        const BigInt r = (e * m) % n;
        const long double angle = 2.0L * kPi * static_cast<long double>(r.convert_to<std::uint64_t>()) / n;
        s += lcplx(std::cos(angle), -std::sin(angle));
    }
    return s / std::sqrt(static_cast<long double>(exps.size()));
}

/// Coefficients of prod_j (1 - i c cos(e_j t)) as a map frequency -> coefficient
/// of e^{i f t}, expanded term by term over {-1, 0, +1}^p.
inline std::map<BigInt, lcplx> theta_expansion(const std::vector<BigInt>& exps, long double c) {
    std::map<BigInt, lcplx> acc{{BigInt(0), lcplx(1, 0)}};
    const lcplx half(0, -c / 2);  // -i c / 2 per chosen exponential
    for (const auto& e : exps) {
        std::map<BigInt, lcplx> next;
        for (const auto& [f, v] : acc) {
            next[f] += v;
            next[f + e] += v * half;
            next[f - e] += v * half;
        }
        acc = std::move(next);
    }
    return acc;
}

/// E | |R| - 1 | for R standard complex Gaussian with E|R|^2 = 1 (density 2 r e^{-r^2}),
/// integrated by Simpson's rule.
inline double rayleigh_abs_deviation() {
    const int n = 200000;
    const long double hi = 12.0L, h = hi / n;
    long double s = 0;
    for (int i = 0; i <= n; ++i) {
        const long double r = h * i;
        const long double f = std::fabs(r - 1.0L) * 2.0L * r * std::exp(-r * r);
        s += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    return static_cast<double>(s * h / 3.0L);
}

/// Number of ordered pairs (i, j) with 2 e_i = 2 e_j and e_i != 0 plus the constant
/// contributions: the mean of ((1/p) sum_j cos(2 e_j t))^2 counted pair by pair.
inline double squares_dispersion_by_pairs(const std::vector<BigInt>& exps) {
    const double p = static_cast<double>(exps.size());
    double total = 0.0;
    for (std::size_t i = 0; i < exps.size(); ++i)
        for (std::size_t j = 0; j < exps.size(); ++j) {
            // mean of cos(a t) cos(b t) = [a == b] / 2 + [a == -b] / 2, with a = b = 0 giving 1
            const BigInt a = 2 * exps[i], b = 2 * exps[j];
            if (a == 0 && b == 0)
                total += 1.0;
            else
                total += 0.5 * ((a == b) + (a == -b));
        }
    return total / (p * p);
}

}  // namespace oracle
