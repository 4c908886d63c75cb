#include "rankone/ornstein.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "quadrature.hpp"
#include "rankone/errors.hpp"
#include "rankone/parallel.hpp"
#include "rankone/philox.hpp"
#include "rankone/simd/kernels.hpp"

namespace rankone {

SpacerDistribution SpacerDistribution::uniform(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw ValidationError("xi", "empty uniform support");
    SpacerDistribution d;
    const auto count = static_cast<std::size_t>(hi - lo + 1);
    for (std::int64_t s = lo; s <= hi; ++s) d.support.push_back(s);
    d.probs.assign(count, 1.0 / static_cast<double>(count));
    return d;
}

SpacerDistribution SpacerDistribution::point_mass(std::int64_t at) { return {{at}, {1.0}}; }

void SpacerDistribution::validate(std::int64_t t, const std::string& key) const {
    if (support.empty() || support.size() != probs.size())
        throw ValidationError(key, "support and probabilities must be nonempty and of equal length");
    const std::int64_t half = t / 2;
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (i > 0 && support[i] <= support[i - 1])
            throw ValidationError(key + ".support", "must be sorted and distinct");
        if (support[i] < -half || support[i] > half)
            throw ValidationError(key + ".support", "value " + std::to_string(support[i]) + " outside [-" +
                                                        std::to_string(half) + ", " + std::to_string(half) + "]");
        if (!(probs[i] >= 0.0)) throw ValidationError(key + ".probs", "must be nonnegative");
        total += probs[i];
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ValidationError(key + ".probs", "must sum to 1");
}

std::int64_t SpacerDistribution::draw(double u) const {
    double cdf = 0.0;
    for (std::size_t i = 0; i + 1 < support.size(); ++i) {
        cdf += probs[i];
        if (u < cdf) return support[i];
    }
    return support.back();
}

std::complex<double> SpacerDistribution::characteristic(double theta) const {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i)
        s += probs[i] * std::polar(1.0, static_cast<double>(support[i]) * theta);
    return s;
}

double xi_l2(const SpacerDistribution& dist) {
    double s = 0.0;
    for (double p : dist.probs) s += p * p;
    return s;
}

void EnsembleConfig::validate() const {
    if (columns.values.empty() || base_spacer.values.empty() || top.values.empty() || xi.values.empty())
        throw ValidationError("params", "p, t, top and xi schedules must be nonempty");
    for (std::size_t i = 0; i < columns.values.size(); ++i)
        if (columns.values[i] < 2) throw ValidationError("params.p[" + std::to_string(i) + "]", "must be >= 2");
    for (std::size_t i = 0; i < base_spacer.values.size(); ++i)
        if (base_spacer.values[i] < 1)
            throw ValidationError("params.t[" + std::to_string(i) + "]", "must be >= 1");
    for (std::size_t i = 0; i < top.values.size(); ++i)
        if (top.values[i] < 0) throw ValidationError("params.top[" + std::to_string(i) + "]", "must be >= 0");
    // Each xi_k is checked against the t_k it is paired with.
    const std::size_t n = std::max({base_spacer.values.size(), xi.values.size()});
    for (std::size_t k = 0; k < n; ++k) xi.at(k).validate(base_spacer.at(k), "params.xi[" + std::to_string(k) + "]");
}

StageOffsets sample_offsets(const EnsembleConfig& config, std::size_t k, std::uint64_t sample) {
    const std::size_t p = config.columns.at(k);
    const auto& xi = config.xi.at(k);
    const Philox4x32 rng(config.seed);
    StageOffsets x(p + 1, 0);
    for (std::size_t j = 1; j < p; ++j) {
        const double u = rng.uniform({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(sample),
                                      static_cast<std::uint32_t>(sample >> 32), static_cast<std::uint32_t>(j)});
        x[j] = xi.draw(u);
    }
    x[p] = config.top.at(k);
    return x;
}

std::vector<BigInt> ornstein_spacers(const EnsembleConfig& config, std::size_t k, const StageOffsets& x) {
    const std::int64_t t = config.base_spacer.at(k);
    std::vector<BigInt> a(x.size() - 1);
    for (std::size_t i = 1; i < x.size(); ++i) a[i - 1] = BigInt(t) + x[i] - x[i - 1];
    return a;
}

std::vector<BigInt> mixing_family_spacers(const EnsembleConfig& config, std::size_t k, const StageOffsets& x) {
    const BigInt t = config.base_spacer.at(k);
    std::vector<BigInt> a(x.size() - 1);
    BigInt power = 1;
    for (std::size_t j = 1; j < x.size(); ++j) {
        power *= 3;
        a[j - 1] = power * t + x[j] - x[j - 1];
    }
    return a;
}

OrnsteinSample sample_tower(const EnsembleConfig& config, std::size_t depth, std::uint64_t sample,
                            OrnsteinVariant variant, const BuildOptions& options) {
    config.validate();
    OrnsteinSample out;
    out.offsets.reserve(depth + 1);
    for (std::size_t k = 0; k <= depth; ++k) out.offsets.push_back(sample_offsets(config, k, sample));
    const bool mixing = variant == OrnsteinVariant::mixing;
    GeneratedRule rule{mixing ? "ornstein_mixing" : "ornstein", [&](std::size_t k, const BigInt&) {
                           return mixing ? mixing_family_spacers(config, k, out.offsets[k])
                                         : ornstein_spacers(config, k, out.offsets[k]);
                       }};
    out.tower = build_tower(rule, depth, options);
    return out;
}

std::vector<BigInt> ensemble_heights(const EnsembleConfig& config, std::size_t depth) {
    std::vector<BigInt> h{1};
    for (std::size_t k = 0; k <= depth; ++k)
        h.push_back(BigInt(config.columns.at(k)) * (h.back() + config.base_spacer.at(k)) + config.top.at(k));
    return h;
}

double parseval_check(const SpacerDistribution& dist, const GridPolicy& policy) {
    const std::int64_t lo = dist.support.front();
    const std::int64_t width = dist.support.back() - lo;
    const std::size_t n = detail::exact_grid_or_throw(BigInt(width), policy, "parseval_check");
    std::vector<cplx> weights(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < dist.support.size(); ++i)
        weights[static_cast<std::size_t>(dist.support[i] - lo)] += dist.probs[i];
    const auto values = dft_of_weights(std::move(weights), UniformGrid(n));
    std::vector<double> sq(n);
    simd::active_kernels().modulus_sq(values.values.data(), sq.data(), n);
    return std::fabs(riemann_mean(sq) - xi_l2(dist));
}

namespace {

std::size_t residue_of(std::int64_t v, std::size_t n) {
    const auto nn = static_cast<std::int64_t>(n);
    return static_cast<std::size_t>(((v % nn) + nn) % nn);
}

/// (sum_{j in [first, p)} z^{-j(h+t)}) and (sum_s xi(s) z^{-s}) on the grid.
struct MeanFactors {
    std::vector<cplx> dirichlet;
    std::vector<cplx> character;
};

MeanFactors mean_factors(const EnsembleConfig& config, std::size_t k, const UniformGrid& grid, std::size_t first) {
    const std::size_t n = grid.size();
    const auto heights = ensemble_heights(config, k);
    const BigInt step = heights[k] + config.base_spacer.at(k);
    const std::size_t p = config.columns.at(k);
    std::vector<cplx> counts(n, cplx(0.0, 0.0));
    for (std::size_t j = first; j < p; ++j) counts[mod_u64(step * j, n)] += 1.0;
    const auto& xi = config.xi.at(k);
    std::vector<cplx> weights(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < xi.support.size(); ++i) weights[residue_of(xi.support[i], n)] += xi.probs[i];
    return {dft_of_weights(std::move(counts), grid).values, dft_of_weights(std::move(weights), grid).values};
}

BigInt stage_degree_bound(const EnsembleConfig& config, std::size_t m) {
    const auto heights = ensemble_heights(config, m);
    const BigInt step = heights[m] + config.base_spacer.at(m);
    return step * (config.columns.at(m) - 1) + config.base_spacer.at(m) / 2;
}

}  // namespace

ComplexGridFunction centered_mean_poly(const EnsembleConfig& config, std::size_t k, const UniformGrid& grid) {
    const auto f = mean_factors(config, k, grid, 0);
    const double norm = 1.0 / std::sqrt(static_cast<double>(config.columns.at(k)));
    ComplexGridFunction out{grid, std::vector<cplx>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = norm * f.dirichlet[i] * f.character[i];
    return out;
}

ComplexGridFunction omega_mean_poly(const EnsembleConfig& config, std::size_t k, const UniformGrid& grid) {
    const auto f = mean_factors(config, k, grid, 1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(config.columns.at(k)));
    ComplexGridFunction out{grid, std::vector<cplx>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = norm * (1.0 + f.dirichlet[i] * f.character[i]);
    return out;
}

ComplexGridFunction sample_poly(const EnsembleConfig& config, std::size_t k, std::uint64_t sample,
                                const UniformGrid& grid) {
    const auto heights = ensemble_heights(config, k);
    const BigInt step = heights[k] + config.base_spacer.at(k);
    const auto x = sample_offsets(config, k, sample);
    std::vector<BigInt> exps(config.columns.at(k));
    for (std::size_t j = 0; j < exps.size(); ++j) exps[j] = step * j + x[j];
    return eval_on_grid(SparseExponentPoly(std::move(exps)), grid);
}

Lemma44Estimate lemma44_estimate(const EnsembleConfig& config, std::size_t m, std::size_t n_samples,
                                 const GridPolicy& policy) {
    config.validate();
    if (n_samples < 100) throw ValidationError("samples", "lemma44_estimate needs at least 100 samples");
    const auto& kern = simd::active_kernels();

    std::vector<cplx> mean_values;
    auto deviation = [&](std::uint64_t sample, std::size_t n) {
        const auto pm = sample_poly(config, m, sample, UniformGrid(n));
        std::vector<cplx> centered(n);
        for (std::size_t i = 0; i < n; ++i) centered[i] = pm.values[i] - mean_values[i];
        std::vector<double> a(n), b(n);
        kern.modulus(pm.values.data(), a.data(), n);
        kern.modulus(centered.data(), b.data(), n);
        for (std::size_t i = 0; i < n; ++i) a[i] -= b[i];
        kern.abs_deviation(a.data(), 0.0, b.data(), n);
        return riemann_mean_pair(b);
    };

    // Grid chosen by doubling on sample 0, then held fixed for the ensemble.
    const auto outcome = detail::run_doubling(stage_degree_bound(config, m), policy, [&](std::size_t n) {
        mean_values = centered_mean_poly(config, m, UniformGrid(n)).values;
        return std::vector<MeanPair>{deviation(0, n)};
    });
    const std::size_t n = outcome.grid_size;

    std::vector<MeanPair> per_sample(n_samples);
    per_sample[0] = outcome.means[0];
    parallel_for(n_samples - 1, [&](std::size_t i) { per_sample[i + 1] = deviation(i + 1, n); });

    Lemma44Estimate est;
    est.samples = n_samples;
    est.grid_size = n;
    est.bound = xi_l2(config.xi.at(m));
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& s : per_sample) {
        sum += s.fine;
        sum_sq += s.fine * s.fine;
        est.max_delta = std::max(est.max_delta, s.delta());
    }
    const double count = static_cast<double>(n_samples);
    est.mc_mean = sum / count;
    const double var = std::max(0.0, (sum_sq - count * est.mc_mean * est.mc_mean) / (count - 1.0));
    est.standard_error = std::sqrt(var / count);
    std::vector<double> abs_mean(n);
    kern.modulus(mean_values.data(), abs_mean.data(), n);
    est.mean_abs_expectation = riemann_mean(abs_mean);
    return est;
}

namespace {

using Wide = boost::multiprecision::cpp_bin_float_100;

/// (multiple * t0) mod 2 pi, evaluated in 100-digit arithmetic.
double phase_mod_two_pi(const BigInt& multiple, double t0) {
    if (bit_length(multiple) > 200)
        throw CapError("phase reduction supports exponents below 2^200", bit_length(multiple));
    const Wide two_pi = boost::math::constants::two_pi<Wide>();
    Wide v = Wide(multiple) * Wide(t0);
    v = v - two_pi * boost::multiprecision::floor(v / two_pi);
    return static_cast<double>(v);
}

}  // namespace

OmegaCltReport clt_in_omega(const EnsembleConfig& config, std::size_t m, double t0, std::size_t n_samples,
                            double flag_threshold) {
    config.validate();
    if (n_samples < kMinOmegaSamples)
        throw ValidationError("samples", "clt_in_omega needs at least " + std::to_string(kMinOmegaSamples) +
                                             " samples");
    const std::size_t p = config.columns.at(m);
    const auto& xi = config.xi.at(m);
    const auto heights = ensemble_heights(config, m);
    const BigInt step = heights[m] + config.base_spacer.at(m);
    const std::complex<double> chi = xi.characteristic(t0);

    // Z_{m,0} vanishes (x_{m,0} = 0 is not random); j >= 1 carry the randomness.
    std::vector<double> base(p), expected(p);
    for (std::size_t j = 1; j < p; ++j) {
        base[j] = phase_mod_two_pi(step * j, t0);
        expected[j] = (std::polar(1.0, base[j]) * chi).real();
    }
    const double scale = std::sqrt(2.0 / static_cast<double>(p));

    OmegaCltReport report;
    report.t0 = t0;
    report.samples = n_samples;
    report.character_modulus = std::abs(chi);
    report.character_flagged = report.character_modulus > flag_threshold;
    report.values.resize(n_samples);
    parallel_for(n_samples, [&](std::size_t i) {
        const auto x = sample_offsets(config, m, i);
        double s = 0.0;
        for (std::size_t j = 1; j < p; ++j)
            s += std::cos(base[j] + static_cast<double>(x[j]) * t0) - expected[j];
        report.values[i] = scale * s;
    });

    const double count = static_cast<double>(n_samples);
    report.mean = std::accumulate(report.values.begin(), report.values.end(), 0.0) / count;
    double ss = 0.0;
    for (double v : report.values) ss += (v - report.mean) * (v - report.mean);
    report.variance = ss / (count - 1.0);
    if (report.variance < 1e-12)
        throw DegenerateError("sum of Z_{m,j} has vanishing variance over omega at t0 = " + std::to_string(t0));
    report.ks = ks_statistic(report.values).distance;
    return report;
}

}  // namespace rankone
