#include "rankone/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "quadrature.hpp"
#include "rankone/errors.hpp"
#include "rankone/parallel.hpp"
#include "rankone/simd/kernels.hpp"

namespace rankone {

using detail::run_doubling;

FactorSelection::FactorSelection(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    for (std::size_t i = 1; i < indices_.size(); ++i)
        if (indices_[i] <= indices_[i - 1])
            throw ValidationError("selection", "indices must be strictly increasing");
}

FactorSelection FactorSelection::with(std::size_t index) const {
    auto next = indices_;
    next.push_back(index);
    return FactorSelection(std::move(next));
}

TrigSeries TrigSeries::cosine(std::int64_t f) {
    if (f == 0) return constant(1.0);
    return {{{f, cplx(0.5, 0.0)}, {-f, cplx(0.5, 0.0)}}};
}

std::int64_t TrigSeries::max_frequency() const {
    std::int64_t m = 0;
    for (const auto& [f, c] : terms) m = std::max(m, f < 0 ? -f : f);
    return m;
}

cplx TrigSeries::mean() const {
    cplx s = 0.0;
    for (const auto& [f, c] : terms)
        if (f == 0) s += c;
    return s;
}

double TrigSeries::coefficient_l1() const {
    std::map<std::int64_t, cplx> merged;
    for (const auto& [f, c] : terms) merged[f] += c;
    double s = 0.0;
    for (const auto& [f, c] : merged) s += std::abs(c);
    return s;
}

std::vector<cplx> TrigSeries::on_grid(const UniformGrid& grid) const {
    const std::size_t n = grid.size();
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (const auto& [f, c] : terms) {
        // e^{i f t} = conj(e^{-i f t}); reduce f mod N exactly.
        const std::int64_t nn = static_cast<std::int64_t>(n);
        const std::uint64_t r = static_cast<std::uint64_t>(((f % nn) + nn) % nn);
        for (std::size_t m = 0; m < n; ++m) out[m] += c * std::conj(unit_phase(r, n, m));
    }
    return out;
}

std::vector<double> stage_modulus(const TowerSequence& tower, std::size_t k, std::size_t n) {
    const auto poly = SparseExponentPoly::from_stage(tower.stage(k));
    const auto values = eval_on_grid(poly, UniformGrid(n));
    std::vector<double> out(n);
    simd::active_kernels().modulus(values.values.data(), out.data(), n);
    return out;
}

namespace {

BigInt top_exponent(const TowerSequence& tower, std::size_t k) {
    return exponents(tower.stage(k)).back();
}

BigInt selection_degree(const TowerSequence& tower, const FactorSelection& selection) {
    BigInt d = 0;
    for (std::size_t k : selection.indices()) d += top_exponent(tower, k);
    return d;
}

std::vector<double> selection_modulus(const TowerSequence& tower, const FactorSelection& selection,
                                      std::size_t n) {
    std::vector<double> q(n, 1.0);
    const auto& kern = simd::active_kernels();
    for (std::size_t k : selection.indices()) {
        const auto f = stage_modulus(tower, k, n);
        kern.multiply(q.data(), f.data(), n);
    }
    return q;
}

/// Q = prod |P_{n_i}| for a fixed selection, memoized per grid size.
class SelectionCache {
public:
    SelectionCache(const TowerSequence& tower, FactorSelection selection)
        : tower_(tower), selection_(std::move(selection)) {}

    std::vector<double> copy_at(std::size_t n) {
        std::lock_guard lock(mutex_);
        auto it = by_size_.find(n);
        if (it == by_size_.end()) it = by_size_.emplace(n, selection_modulus(tower_, selection_, n)).first;
        return it->second;
    }

private:
    const TowerSequence& tower_;
    FactorSelection selection_;
    std::mutex mutex_;
    std::map<std::size_t, std::vector<double>> by_size_;
};

void check_stage_range(const TowerSequence& tower, std::size_t k, const char* key) {
    if (k > tower.depth())
        throw ValidationError(key, "stage " + std::to_string(k) + " beyond tower depth " +
                                       std::to_string(tower.depth()));
}

}  // namespace

BigInt product_degree(const TowerSequence& tower, std::size_t n) {
    BigInt d = 0;
    for (std::size_t k = 1; k <= n; ++k) d += top_exponent(tower, k);
    return d;
}

RealGridFunction partial_product_sq(const TowerSequence& tower, std::size_t n, const UniformGrid& grid) {
    check_stage_range(tower, n, "n");
    const std::size_t size = grid.size();
    RealGridFunction out{grid, std::vector<double>(size, 1.0)};
    std::vector<double> factor(size);
    const auto& kern = simd::active_kernels();
    for (std::size_t k = 1; k <= n; ++k) {
        const auto values = eval_on_grid(SparseExponentPoly::from_stage(tower.stage(k)), grid);
        kern.modulus_sq(values.values.data(), factor.data(), size);
        kern.multiply(out.values.data(), factor.data(), size);
    }
    return out;
}

MassEstimate mass(const TowerSequence& tower, std::size_t n, const GridPolicy& policy) {
    check_stage_range(tower, n, "n");
    if (n == 0) return {1.0, 2};
    const std::size_t size = detail::exact_grid_or_throw(product_degree(tower, n), policy, "mass");
    const auto density = partial_product_sq(tower, n, UniformGrid(size));
    return {riemann_mean(density), size};
}

RieszEstimate l1_product(const TowerSequence& tower, const FactorSelection& selection, const GridPolicy& policy) {
    if (selection.empty()) throw ValidationError("selection", "must be nonempty");
    check_stage_range(tower, selection.back(), "selection");
    const auto outcome = run_doubling(selection_degree(tower, selection), policy, [&](std::size_t n) {
        const auto q = selection_modulus(tower, selection, n);
        return std::vector<MeanPair>{riemann_mean_pair(q)};
    });
    return {outcome.means[0].fine, outcome.grid_size, outcome.delta, outcome.converged, selection};
}

GreedyResult greedy_bourgain(const TowerSequence& tower, std::size_t budget, const StageWindow& window,
                             const GridPolicy& policy) {
    if (budget < 1) throw ValidationError("budget", "must be >= 1");
    const std::size_t last = window.last.value_or(tower.depth());
    check_stage_range(tower, last, "window");
    if (window.first > last) throw ValidationError("window", "empty stage window");

    GreedyResult result;
    const auto& kern = simd::active_kernels();
    for (std::size_t step = 0; step < budget; ++step) {
        const std::size_t lo = result.selection.empty() ? window.first : std::max(window.first, result.selection.back() + 1);
        if (lo > last) break;
        const std::size_t count = last - lo + 1;
        SelectionCache cache(tower, result.selection);
        const BigInt base_degree = selection_degree(tower, result.selection);

        std::vector<RieszEstimate> candidates(count);
        parallel_for(count, [&](std::size_t i) {
            const std::size_t m = lo + i;
            const auto outcome = run_doubling(base_degree + top_exponent(tower, m), policy, [&](std::size_t n) {
                auto q = cache.copy_at(n);
                const auto f = stage_modulus(tower, m, n);
                kern.multiply(q.data(), f.data(), n);
                return std::vector<MeanPair>{riemann_mean_pair(q)};
            });
            candidates[i] = {outcome.means[0].fine, outcome.grid_size, outcome.delta, outcome.converged, {}};
        });

        std::size_t best = 0;
        for (std::size_t i = 1; i < count; ++i)
            if (candidates[i].value < candidates[best].value) best = i;
        result.selection = result.selection.with(lo + best);
        result.values.push_back(candidates[best].value);
        result.deltas.push_back(candidates[best].convergence_delta);
        result.grid_sizes.push_back(candidates[best].grid_size);
    }
    return result;
}

Lemma23Result lemma23_check(const TowerSequence& tower, const FactorSelection& selection, std::size_t m,
                            const GridPolicy& policy) {
    check_stage_range(tower, m, "m");
    if (!selection.empty() && selection.back() >= m)
        throw ValidationError("m", "must exceed every selected stage");
    const auto& kern = simd::active_kernels();
    const BigInt degree = selection_degree(tower, selection) + top_exponent(tower, m);
    const auto outcome = run_doubling(degree, policy, [&](std::size_t n) {
        const auto q = selection_modulus(tower, selection, n);
        const auto pm = stage_modulus(tower, m, n);
        std::vector<double> qp = q;
        kern.multiply(qp.data(), pm.data(), n);  // Q|P|
        std::vector<double> psq = pm;
        kern.multiply(psq.data(), pm.data(), n);  // |P|^2
        std::vector<double> qpsq = psq;
        kern.multiply(qpsq.data(), q.data(), n);  // Q|P|^2
        std::vector<double> qdev(n);
        kern.abs_deviation(psq.data(), 1.0, qdev.data(), n);
        kern.multiply(qdev.data(), q.data(), n);  // Q||P|^2 - 1|
        return std::vector<MeanPair>{riemann_mean_pair(qp), riemann_mean_pair(q), riemann_mean_pair(qpsq),
                                     riemann_mean_pair(qdev)};
    });
    const double int_qp = outcome.means[0].fine;
    const double int_q = outcome.means[1].fine;
    const double int_qpsq = outcome.means[2].fine;
    const double int_qdev = outcome.means[3].fine;
    Lemma23Result r;
    r.lhs = int_qp;
    r.rhs = 0.5 * (int_q + int_qpsq) - 0.125 * int_qdev * int_qdev;
    r.slack = r.rhs - r.lhs;
    r.grid_size = outcome.grid_size;
    r.convergence_delta = outcome.delta;
    r.converged = outcome.converged;
    return r;
}

double weak_convergence_check(const TowerSequence& tower, std::size_t m, const TrigSeries& r,
                              const GridPolicy& policy) {
    check_stage_range(tower, m, "m");
    const BigInt top = top_exponent(tower, m);
    const BigInt degree = std::max(top, BigInt(r.max_frequency()));
    const std::size_t n = detail::exact_grid_or_throw(degree, policy, "weak_convergence_check");
    const UniformGrid grid(n);
    const auto values = eval_on_grid(SparseExponentPoly::from_stage(tower.stage(m)), grid);
    std::vector<double> psq(n);
    const auto& kern = simd::active_kernels();
    kern.modulus_sq(values.values.data(), psq.data(), n);
    const auto rv = r.on_grid(grid);
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        re[i] = rv[i].real();
        im[i] = rv[i].imag();
    }
    kern.multiply(re.data(), psq.data(), n);
    kern.multiply(im.data(), psq.data(), n);
    const cplx integral(riemann_mean(re), riemann_mean(im));
    return std::abs(integral - r.mean());
}

DeviationEstimate l1_deviation(const TowerSequence& tower, std::size_t m, const GridPolicy& policy) {
    check_stage_range(tower, m, "m");
    const auto& kern = simd::active_kernels();
    const auto outcome = run_doubling(top_exponent(tower, m), policy, [&](std::size_t n) {
        const auto pm = stage_modulus(tower, m, n);
        std::vector<double> abs_dev(n), psq = pm, sq_dev(n);
        kern.abs_deviation(pm.data(), 1.0, abs_dev.data(), n);
        kern.multiply(psq.data(), pm.data(), n);
        kern.abs_deviation(psq.data(), 1.0, sq_dev.data(), n);
        return std::vector<MeanPair>{riemann_mean_pair(abs_dev), riemann_mean_pair(sq_dev)};
    });
    return {outcome.means[0].fine, outcome.means[1].fine, outcome.grid_size, outcome.delta, outcome.converged};
}

}  // namespace rankone
