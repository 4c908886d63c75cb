#pragma once

#include <cstdint>
#include <vector>

#include "rankone/cltlab.hpp"
#include "rankone/construction.hpp"
#include "rankone/trigpoly.hpp"

namespace rankone {

/// Law xi_k of the random offsets x_{k,i}: a pmf on a sorted integer support.
struct SpacerDistribution {
    std::vector<std::int64_t> support;
    std::vector<double> probs;

    static SpacerDistribution uniform(std::int64_t lo, std::int64_t hi);
    static SpacerDistribution point_mass(std::int64_t at);

    /// Throws ValidationError unless the pmf is well formed and the support lies
    /// in [-floor(t/2), floor(t/2)].
    void validate(std::int64_t t, const std::string& key) const;
    /// Inverse-CDF draw for u in [0, 1).
    std::int64_t draw(double u) const;
    /// sum_s xi(s) e^{i s theta}
    std::complex<double> characteristic(double theta) const;
};

/// Sum of squared probabilities.
double xi_l2(const SpacerDistribution& dist);

struct EnsembleConfig {
    StageSchedule<std::size_t> columns;          // p_k >= 2
    StageSchedule<std::int64_t> base_spacer;     // t_k >= 1
    StageSchedule<std::int64_t> top;             // x_{k,p_k} >= 0
    StageSchedule<SpacerDistribution> xi;
    std::uint64_t seed = 0;

    void validate() const;
};

/// x_{k,0..p_k}: x_{k,0} = 0, x_{k,p_k} = top_k, the rest drawn from xi_k.
using StageOffsets = std::vector<std::int64_t>;

/// Offsets of one stage for sample `sample`; draw j uses Philox counter (k, sample lo, sample hi, j).
StageOffsets sample_offsets(const EnsembleConfig& config, std::size_t k, std::uint64_t sample);

/// a_i = t_k + x_{k,i} - x_{k,i-1}, i = 1..p_k
std::vector<BigInt> ornstein_spacers(const EnsembleConfig& config, std::size_t k, const StageOffsets& x);

/// a_j = 3^j t_k + x_{k,j} - x_{k,j-1}, j = 1..p_k
std::vector<BigInt> mixing_family_spacers(const EnsembleConfig& config, std::size_t k, const StageOffsets& x);

struct OrnsteinSample {
    TowerSequence tower;
    std::vector<StageOffsets> offsets;  // per stage
};

enum class OrnsteinVariant { standard, mixing };

/// Tower of sample `sample` (stages 0..depth).
OrnsteinSample sample_tower(const EnsembleConfig& config, std::size_t depth, std::uint64_t sample,
                            OrnsteinVariant variant = OrnsteinVariant::standard,
                            const BuildOptions& options = {});

/// h_0..h_{depth+1}; for the standard variant they do not depend on the sample.
std::vector<BigInt> ensemble_heights(const EnsembleConfig& config, std::size_t depth);

/// |int |sum_s xi(s) z^s|^2 - sum_s xi(s)^2| on the exact grid.
double parseval_check(const SpacerDistribution& dist, const GridPolicy& policy = {});

/// p^{-1/2} (sum_{j<p} z^{-j(h_k + t_k)}) (sum_s xi(s) z^{-s}) on the grid: the
/// product form of E_omega P_k used to center P_k.
ComplexGridFunction centered_mean_poly(const EnsembleConfig& config, std::size_t k, const UniformGrid& grid);

/// E_omega P_k at the grid nodes with x_{k,0} = 0 held fixed (exact expectation).
ComplexGridFunction omega_mean_poly(const EnsembleConfig& config, std::size_t k, const UniformGrid& grid);

/// P_k of sample `sample` at the grid nodes.
ComplexGridFunction sample_poly(const EnsembleConfig& config, std::size_t k, std::uint64_t sample,
                                const UniformGrid& grid);

struct Lemma44Estimate {
    double mc_mean = 0.0;      // E int ||P_m| - |P_m - E P_m||
    double standard_error = 0.0;
    double bound = 0.0;        // sum_s xi(s)^2
    double mean_abs_expectation = 0.0;  // int |E P_m|, a deterministic upper bound for mc_mean
    std::size_t samples = 0;
    std::size_t grid_size = 0;
    double max_delta = 0.0;    // worst half-grid disagreement over samples
    bool within_bound() const { return mc_mean <= bound + 3.0 * standard_error; }
};

Lemma44Estimate lemma44_estimate(const EnsembleConfig& config, std::size_t m, std::size_t n_samples,
                                 const GridPolicy& policy = {});

struct OmegaCltReport {
    double ks = 0.0;
    std::size_t samples = 0;
    double t0 = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double character_modulus = 0.0;  // |sum_s xi(s) e^{i s t0}|
    bool character_flagged = false;  // character sum not small: t0 may lie outside the admissible set
    std::vector<double> values;      // the omega-sample of sum_j Z_{m,j}
};

inline constexpr std::size_t kMinOmegaSamples = 10000;

/// Distribution over omega of sum_j Z_{m,j}(omega) at fixed t0 against Phi.
/// Throws DegenerateError if the sample variance vanishes.
OmegaCltReport clt_in_omega(const EnsembleConfig& config, std::size_t m, double t0, std::size_t n_samples,
                            double flag_threshold = 0.1);

}  // namespace rankone
