#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rankone/bigint.hpp"
#include "rankone/construction.hpp"

namespace rankone {

using cplx = std::complex<double>;

/// N equispaced nodes t_m = 2 pi m / N on the circle; N a power of two.
class UniformGrid {
public:
    explicit UniformGrid(std::size_t size);
    static UniformGrid with_log2(unsigned log2_size) { return UniformGrid(std::size_t{1} << log2_size); }

    std::size_t size() const { return size_; }
    double node(std::size_t m) const;

private:
    std::size_t size_;
};

template <class T>
struct GridFunction {
    UniformGrid grid;
    std::vector<T> values;
};

using RealGridFunction = GridFunction<double>;
using ComplexGridFunction = GridFunction<cplx>;

/// P(z) = p^{-1/2} sum_j z^{-e_j} with strictly increasing e_j >= 0.
class SparseExponentPoly {
public:
    explicit SparseExponentPoly(std::vector<BigInt> exponents);
    static SparseExponentPoly from_stage(const StageSpec& stage);

    std::size_t terms() const { return exps_.size(); }
    const std::vector<BigInt>& exponents() const { return exps_; }
    const BigInt& degree() const { return exps_.back(); }

private:
    std::vector<BigInt> exps_;
};

/// Exact residues e_j mod N.
std::vector<std::uint64_t> reduce_exponents(const SparseExponentPoly& poly, std::size_t n);

/// Values of P at the grid nodes: residue-count vector followed by one forward DFT.
ComplexGridFunction eval_on_grid(const SparseExponentPoly& poly, const UniformGrid& grid);

/// Forward DFT, out[m] = sum_r weights[r] exp(-2 pi i r m / N). weights.size() == N.
ComplexGridFunction dft_of_weights(std::vector<cplx> weights, const UniformGrid& grid);

/// Inverse direction: out[k] = sum_m values[m] exp(+2 pi i k m / N) (unnormalized).
std::vector<cplx> inverse_dft(std::vector<cplx> values);

/// cos(f t_m) with the phase reduced exactly (f mod N).
RealGridFunction cosine_on_grid(const BigInt& frequency, const UniformGrid& grid);

/// exp(-i f t_m) with the phase reduced exactly.
cplx unit_phase(std::uint64_t residue, std::size_t n, std::size_t m);

/// Compensated (1/N) sum f(t_m).
double riemann_mean(std::span<const double> values);
double riemann_mean(const RealGridFunction& f);

/// Mean on the full grid and on the even subgrid (size N/2).
struct MeanPair {
    double fine = 0.0;
    double coarse = 0.0;
    double delta() const { return fine > coarse ? fine - coarse : coarse - fine; }
};
MeanPair riemann_mean_pair(std::span<const double> values);

/// Smallest power of two exceeding 2 * degree + 1; 0 when it would not fit in 63 bits.
std::size_t exact_grid_size(const BigInt& degree);

/// Quadrature policy for integrands that are not polynomials (|.| of a polynomial).
struct GridPolicy {
    unsigned log2_cap = 24;
    double tolerance = 1e-6;

    std::size_t cap() const { return std::size_t{1} << log2_cap; }
};

/// CSV (m, t_m, value) / (m, t_m, re, im) with 17 significant digits.
void write_csv(std::ostream& os, const RealGridFunction& f);
void write_csv(std::ostream& os, const ComplexGridFunction& f);

}  // namespace rankone
