#include "rankone/trigpoly.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>

#include <fftw3.h>

#include "rankone/errors.hpp"
#include "rankone/format.hpp"
#include "rankone/simd/kernels.hpp"

namespace rankone {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// The FFTW planner is not reentrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void execute_dft(std::vector<cplx>& data, int sign) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        // FFTW_ESTIMATE keeps the plan, and therefore the rounding, reproducible.
        plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace

UniformGrid::UniformGrid(std::size_t size) : size_(size) {
    if (size < 2 || !is_power_of_two(size))
        throw ValidationError("grid", "size must be a power of two >= 2, got " + std::to_string(size));
}

double UniformGrid::node(std::size_t m) const {
    return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(size_);
}

SparseExponentPoly::SparseExponentPoly(std::vector<BigInt> exponents) : exps_(std::move(exponents)) {
    if (exps_.empty()) throw ValidationError("poly", "needs at least one term");
    if (exps_.front() < 0) throw ValidationError("poly", "exponents must be nonnegative");
    for (std::size_t j = 1; j < exps_.size(); ++j)
        if (exps_[j] <= exps_[j - 1]) throw ValidationError("poly", "exponents must be strictly increasing");
}

SparseExponentPoly SparseExponentPoly::from_stage(const StageSpec& stage) {
    return SparseExponentPoly(rankone::exponents(stage));
}

std::vector<std::uint64_t> reduce_exponents(const SparseExponentPoly& poly, std::size_t n) {
    std::vector<std::uint64_t> r;
    r.reserve(poly.terms());
    for (const auto& e : poly.exponents()) r.push_back(mod_u64(e, n));
    return r;
}

ComplexGridFunction dft_of_weights(std::vector<cplx> weights, const UniformGrid& grid) {
    if (weights.size() != grid.size()) throw ValidationError("weights", "length must equal grid size");
    execute_dft(weights, FFTW_FORWARD);
    return {grid, std::move(weights)};
}

std::vector<cplx> inverse_dft(std::vector<cplx> values) {
    if (!is_power_of_two(values.size())) throw ValidationError("values", "length must be a power of two");
    execute_dft(values, FFTW_BACKWARD);
    return values;
}

ComplexGridFunction eval_on_grid(const SparseExponentPoly& poly, const UniformGrid& grid) {
    const std::size_t n = grid.size();
    const double norm = 1.0 / std::sqrt(static_cast<double>(poly.terms()));
    std::vector<cplx> counts(n, cplx(0.0, 0.0));
    for (std::uint64_t r : reduce_exponents(poly, n)) counts[r] += norm;
    return dft_of_weights(std::move(counts), grid);
}

cplx unit_phase(std::uint64_t residue, std::size_t n, std::size_t m) {
    // residue * m mod n without overflow: n is a power of two <= 2^63.
    const unsigned __int128 prod = static_cast<unsigned __int128>(residue) * m;
    const std::uint64_t k = static_cast<std::uint64_t>(prod & (n - 1));
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    return {std::cos(angle), -std::sin(angle)};
}

RealGridFunction cosine_on_grid(const BigInt& frequency, const UniformGrid& grid) {
    const std::size_t n = grid.size();
    const std::uint64_t r = mod_u64(frequency, n);
    RealGridFunction f{grid, std::vector<double>(n)};
    for (std::size_t m = 0; m < n; ++m) f.values[m] = unit_phase(r, n, m).real();
    return f;
}

MeanPair riemann_mean_pair(std::span<const double> values) {
    const std::size_t n = values.size();
    const auto sums = simd::active_kernels().pair_sum(values.data(), n);
    MeanPair out;
    // Neumaier on the two halves keeps the fine mean compensated as well.
    const double total = sums.even + sums.odd;
    const double err = (std::fabs(sums.even) >= std::fabs(sums.odd)) ? (sums.even - total) + sums.odd
                                                                      : (sums.odd - total) + sums.even;
    out.fine = (total + err) / static_cast<double>(n);
    out.coarse = sums.even / static_cast<double>((n + 1) / 2);
    return out;
}

double riemann_mean(std::span<const double> values) { return riemann_mean_pair(values).fine; }

double riemann_mean(const RealGridFunction& f) { return riemann_mean(std::span<const double>(f.values)); }

std::size_t exact_grid_size(const BigInt& degree) {
    const BigInt need = 2 * degree + 1;
    if (bit_length(need) >= 63) return 0;
    std::size_t n = 2;
    while (BigInt(n) <= need) n <<= 1;
    return n;
}

void write_csv(std::ostream& os, const RealGridFunction& f) {
    os << "m,t_m,value\n";
    for (std::size_t m = 0; m < f.values.size(); ++m)
        os << m << ',' << fmt17(f.grid.node(m)) << ',' << fmt17(f.values[m]) << '\n';
}

void write_csv(std::ostream& os, const ComplexGridFunction& f) {
    os << "m,t_m,re,im\n";
    for (std::size_t m = 0; m < f.values.size(); ++m)
        os << m << ',' << fmt17(f.grid.node(m)) << ',' << fmt17(f.values[m].real()) << ','
           << fmt17(f.values[m].imag()) << '\n';
}

}  // namespace rankone
