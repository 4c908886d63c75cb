#include "rankone/cltlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "quadrature.hpp"
#include "rankone/errors.hpp"
#include "rankone/normal.hpp"
#include "rankone/simd/kernels.hpp"
#include "rankone/words.hpp"

namespace rankone {

BorelSet::BorelSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
    std::sort(arcs_.begin(), arcs_.end(), [](const Arc& a, const Arc& b) { return a.begin < b.begin; });
    if (arcs_.empty()) throw ValidationError("arcs", "set must contain at least one arc");
    for (std::size_t i = 0; i < arcs_.size(); ++i) {
        const auto& a = arcs_[i];
        if (!(a.begin >= 0.0 && a.end <= 1.0 && a.begin < a.end))
            throw ValidationError("arcs[" + std::to_string(i) + "]", "need 0 <= begin < end <= 1 (turns)");
        if (i > 0 && a.begin < arcs_[i - 1].end)
            throw ValidationError("arcs[" + std::to_string(i) + "]", "arcs overlap");
    }
}

double BorelSet::measure() const {
    double s = 0.0;
    for (const auto& a : arcs_) s += a.end - a.begin;
    return s;
}

bool BorelSet::contains_node(std::size_t m, std::size_t n) const {
    const double turn = static_cast<double>(m) / static_cast<double>(n);
    for (const auto& a : arcs_)
        if (turn >= a.begin && turn < a.end) return true;
    return false;
}

namespace {

RestrictedSamples restrict_real_part(const TowerSequence& tower, std::size_t m, const UniformGrid& grid,
                                     const BorelSet& set, double scale) {
    const std::size_t n = grid.size();
    const auto values = eval_on_grid(SparseExponentPoly::from_stage(tower.stage(m)), grid);
    std::vector<double> re(n);
    simd::active_kernels().scaled_real(values.values.data(), scale, re.data(), n);
    RestrictedSamples out;
    out.grid_size = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (!set.contains_node(i, n)) continue;
        out.nodes.push_back(i);
        out.values.push_back(re[i]);
    }
    if (out.nodes.empty()) throw ValidationError("arcs", "no grid node falls inside the set");
    return out;
}

}  // namespace

RestrictedSamples normalized_sum(const TowerSequence& tower, std::size_t m, const UniformGrid& grid,
                                 const BorelSet& set) {
    return restrict_real_part(tower, m, grid, set, std::numbers::sqrt2);
}

KolmogorovDistance ks_statistic(std::vector<double> samples) {
    if (samples.empty()) throw ValidationError("samples", "empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    KolmogorovDistance best;
    for (std::size_t i = 0; i < samples.size();) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        const double phi = normal_cdf(samples[i]);
        const double below = static_cast<double>(i) / n;  // F(x-)
        const double upto = static_cast<double>(j) / n;   // F(x)
        const double d = std::max(std::fabs(upto - phi), std::fabs(phi - below));
        if (d > best.distance) best = {d, samples[i]};
        i = j;
    }
    return best;
}

KSReport ks_distance(const RestrictedSamples& samples, std::size_t stage, const BorelSet& set) {
    if (samples.values.size() < kMinKsNodes)
        throw ValidationError("grid", "KS needs at least " + std::to_string(kMinKsNodes) + " nodes in A, got " +
                                          std::to_string(samples.values.size()));
    const auto d = ks_statistic(samples.values);
    return {stage, set, samples.grid_size, d.distance, d.location, samples.values.size()};
}

std::vector<EcdfPoint> ecdf_curve(std::vector<double> samples, std::size_t max_points) {
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    std::vector<EcdfPoint> out;
    if (n == 0 || max_points == 0) return out;
    const std::size_t step = std::max<std::size_t>(1, n / max_points);
    for (std::size_t i = step - 1; i < n; i += step) {
        // F_emp at an order statistic counts every tie.
        const std::size_t upto =
            static_cast<std::size_t>(std::upper_bound(samples.begin(), samples.end(), samples[i]) - samples.begin());
        out.push_back({samples[i], static_cast<double>(upto) / static_cast<double>(n), normal_cdf(samples[i])});
    }
    return out;
}

DispersionResult squares_dispersion(const TowerSequence& tower, std::size_t m, const GridPolicy& policy) {
    const auto& stage = tower.stage(m);
    auto doubled = exponents(stage);
    for (auto& e : doubled) e *= 2;
    const auto poly = SparseExponentPoly(doubled);
    // (sum X^2 - 1)^2 has degree 4 e_max: exactness-rule grid for degree 2 e_max.
    const std::size_t n = detail::exact_grid_or_throw(poly.degree(), policy, "squares_dispersion");
    const auto g = eval_on_grid(poly, UniformGrid(n));
    // sum_j X_j^2 - 1 = (1/p) sum_j cos(2 e_j t) = Re(G) / sqrt(p)
    const double p = static_cast<double>(stage.columns);
    std::vector<double> centered(n);
    const auto& kern = simd::active_kernels();
    kern.scaled_real(g.values.data(), 1.0 / std::sqrt(p), centered.data(), n);
    kern.multiply(centered.data(), centered.data(), n);
    return {riemann_mean(centered), n};
}

TailReport tail_lower_bound(const TowerSequence& tower, std::size_t m, const BorelSet& set, double x,
                            const UniformGrid& grid) {
    if (!(x > 1.0)) throw ValidationError("x", "tail threshold must exceed 1");
    const auto re = restrict_real_part(tower, m, grid, set, 1.0);
    std::size_t above = 0;
    for (double v : re.values)
        if (std::fabs(v) > x) ++above;
    TailReport r;
    r.x = x;
    r.sample_count = re.values.size();
    r.grid_size = grid.size();
    r.empirical_tail = static_cast<double>(above) / static_cast<double>(r.sample_count);
    r.gaussian_tail = normal_two_sided_tail(std::numbers::sqrt2 * x);
    r.k_hat = (x - 1.0) * r.empirical_tail;
    r.k_limit = (x - 1.0) * r.gaussian_tail;
    return r;
}

namespace {

/// Theta_m on the N grid with exactly reduced phases.
std::vector<cplx> theta_on_grid(const StageSpec& stage, double x, std::size_t n) {
    const auto poly = SparseExponentPoly::from_stage(stage);
    const auto residues = reduce_exponents(poly, n);
    const double amp = x * std::sqrt(2.0 / static_cast<double>(stage.columns));
    std::vector<cplx> theta(n, cplx(1.0, 0.0));
    for (std::size_t mnode = 0; mnode < n; ++mnode) {
        cplx acc(1.0, 0.0);
        for (std::uint64_t r : residues) acc *= cplx(1.0, -amp * unit_phase(r, n, mnode).real());
        theta[mnode] = acc;
    }
    return theta;
}

std::size_t theta_grid(const StageSpec& stage, const BigInt& extra_degree, const GridPolicy& policy) {
    if (stage.columns > kMaxThetaColumns)
        throw CapError("theta expansion supports p <= " + std::to_string(kMaxThetaColumns) + ", got " +
                           std::to_string(stage.columns),
                       stage.columns);
    const BigInt nm = all_plus_word(stage);
    return detail::exact_grid_or_throw(std::max(nm, extra_degree), policy, "theta_product");
}

}  // namespace

ThetaExpansion theta_product(const TowerSequence& tower, std::size_t m, double x, const GridPolicy& policy) {
    const auto& stage = tower.stage(m);
    const std::size_t n = theta_grid(stage, 0, policy);
    auto theta = theta_on_grid(stage, x, n);

    ThetaExpansion out;
    out.x = x;
    out.stage = m;
    out.columns = stage.columns;
    out.grid_size = n;
    out.sup_bound = std::exp(x * x);
    for (const auto& v : theta) out.sup_norm = std::max(out.sup_norm, std::abs(v));

    const auto spectrum = dft_of_weights(std::move(theta), UniformGrid(n)).values;
    const double inv_n = 1.0 / static_cast<double>(n);
    out.constant_term = spectrum[0] * inv_n;

    const auto table = enumerate_words(stage);
    const double p = static_cast<double>(stage.columns);
    const double c = std::fabs(x) * std::sqrt(2.0 / p);
    const double head = std::sqrt(1.0 + c * c);  // |1 + i c|: the e_0 = 0 factor
    std::set<std::uint64_t> word_bins;
    for (const auto& entry : table.entries) {
        if (entry.value <= 0) continue;
        const std::uint64_t w = entry.value.convert_to<std::uint64_t>();
        word_bins.insert(w);
        ThetaCoefficient coef;
        coef.word = entry.value;
        coef.r = r_of_word(table, entry.value);
        coef.rho = (spectrum[w] + spectrum[n - w]) * inv_n;
        const double rr = static_cast<double>(coef.r);
        coef.stated_bound = std::pow(2.0, 1.0 - rr) * std::pow(std::fabs(x), rr) / std::pow(p, rr / 2.0);
        coef.expansion_modulus = head * std::pow(c, rr) * std::pow(2.0, 1.0 - rr);
        out.coefficients.push_back(std::move(coef));
    }
    for (std::size_t w = 1; w < n / 2; ++w) {
        if (word_bins.count(w)) continue;
        out.max_off_word = std::max(out.max_off_word, std::abs((spectrum[w] + spectrum[n - w]) * inv_n));
    }
    return out;
}

std::size_t rho_bound_violations(const ThetaExpansion& theta, double tol) {
    return static_cast<std::size_t>(std::count_if(theta.coefficients.begin(), theta.coefficients.end(),
                                                  [&](const ThetaCoefficient& c) {
                                                      return std::abs(c.rho) > c.stated_bound + tol;
                                                  }));
}

DensityCheck density_check(const TowerSequence& tower, std::size_t m, double x, const TrigSeries& r,
                           const GridPolicy& policy) {
    const auto& stage = tower.stage(m);
    const std::size_t n = theta_grid(stage, BigInt(r.max_frequency()), policy);
    const UniformGrid grid(n);
    const auto theta = theta_on_grid(stage, x, n);
    const auto rv = r.on_grid(grid);
    std::vector<double> re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cplx v = theta[i] * rv[i];
        re[i] = v.real();
        im[i] = v.imag();
    }
    const cplx integral(riemann_mean(re), riemann_mean(im));
    DensityCheck out;
    out.difference = std::abs(integral - r.mean());
    out.bound = std::fabs(x) / std::sqrt(static_cast<double>(stage.columns)) * r.coefficient_l1();
    out.grid_size = n;
    return out;
}

}  // namespace rankone
