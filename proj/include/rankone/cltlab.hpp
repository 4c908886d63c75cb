#pragma once

#include <complex>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/riesz.hpp"
#include "rankone/trigpoly.hpp"

namespace rankone {

/// Half-open arc [begin, end) measured in turns (fractions of 2 pi).
struct Arc {
    double begin = 0.0;
    double end = 1.0;
};

/// Finite union of disjoint arcs of the circle.
class BorelSet {
public:
    BorelSet() : BorelSet(std::vector<Arc>{Arc{}}) {}
    explicit BorelSet(std::vector<Arc> arcs);
    static BorelSet full() { return BorelSet(); }

    const std::vector<Arc>& arcs() const { return arcs_; }
    double measure() const;  // lambda(A), normalized
    bool contains_node(std::size_t m, std::size_t n) const;

private:
    std::vector<Arc> arcs_;
};

/// Node values of a grid function restricted to a set.
struct RestrictedSamples {
    std::size_t grid_size = 0;
    std::vector<std::size_t> nodes;
    std::vector<double> values;
};

/// S_m(t) = sqrt(2/p_m) sum_j cos(e_j t) = sqrt(2) Re P_m(t) on the nodes in A.
RestrictedSamples normalized_sum(const TowerSequence& tower, std::size_t m, const UniformGrid& grid,
                                 const BorelSet& set = BorelSet::full());

struct KolmogorovDistance {
    double distance = 0.0;
    double location = 0.0;  // sample value where the supremum is attained
};

/// sup_x |F_emp(x) - Phi(x)| over an empirical sample (ties handled exactly).
KolmogorovDistance ks_statistic(std::vector<double> samples);

struct KSReport {
    std::size_t stage = 0;
    BorelSet set;
    std::size_t grid_size = 0;
    double ks = 0.0;
    double location = 0.0;
    std::size_t sample_count = 0;
};

inline constexpr std::size_t kMinKsNodes = 1000;

/// KS distance of the node-value distribution against Phi; needs >= 1000 nodes.
KSReport ks_distance(const RestrictedSamples& samples, std::size_t stage, const BorelSet& set);

struct EcdfPoint {
    double x = 0.0;
    double empirical = 0.0;
    double gaussian = 0.0;
};

/// Up to `max_points` (x, F_emp(x), Phi(x)) rows at evenly spaced order statistics.
std::vector<EcdfPoint> ecdf_curve(std::vector<double> samples, std::size_t max_points = 1000);

struct DispersionResult {
    double value = 0.0;
    std::size_t grid_size = 0;
};

/// V_m = mean of |sum_j X_{mj}^2 - 1|^2 with X_{mj} = sqrt(2/p) cos(e_j t), exact grid.
DispersionResult squares_dispersion(const TowerSequence& tower, std::size_t m, const GridPolicy& policy = {});

struct TailReport {
    double x = 0.0;
    double empirical_tail = 0.0;  // fraction of nodes in A with |Re P_m| > x
    double gaussian_tail = 0.0;   // 1 - N([-sqrt2 x, sqrt2 x])
    double k_hat = 0.0;           // (x - 1) empirical_tail
    double k_limit = 0.0;         // (x - 1) gaussian_tail
    std::size_t sample_count = 0;
    std::size_t grid_size = 0;
};

TailReport tail_lower_bound(const TowerSequence& tower, std::size_t m, const BorelSet& set, double x,
                            const UniformGrid& grid);

struct ThetaCoefficient {
    BigInt word;
    std::size_t r = 0;            // participating positions (off position 0)
    std::complex<double> rho;     // coefficient of cos(w t)
    double stated_bound = 0.0;    // 2^{1-r} |x|^r p^{-r/2}
    double expansion_modulus = 0.0;  // |1 + c| |c|^r 2^{1-r}, c = x sqrt(2/p)
};

struct ThetaExpansion {
    double x = 0.0;
    std::size_t stage = 0;
    std::size_t columns = 0;
    std::size_t grid_size = 0;
    std::complex<double> constant_term;
    std::vector<ThetaCoefficient> coefficients;  // positive words, ascending
    double max_off_word = 0.0;                   // largest |coefficient| at a non-word frequency
    double sup_norm = 0.0;
    double sup_bound = 0.0;  // e^{x^2}
};

inline constexpr std::size_t kMaxThetaColumns = 12;

/// Theta_m(x, t) = prod_j (1 - i x sqrt(2/p) cos(e_j t)) and its cosine
/// coefficients by exact quadrature. Throws CapError for p > 12 or a grid
/// beyond the policy cap.
ThetaExpansion theta_product(const TowerSequence& tower, std::size_t m, double x, const GridPolicy& policy = {});

/// Coefficients with |rho_w| above the stated bound by more than `tol`.
std::size_t rho_bound_violations(const ThetaExpansion& theta, double tol = 1e-12);

struct DensityCheck {
    double difference = 0.0;  // |int Theta R - int R|
    double bound = 0.0;       // |x| / sqrt(p) * sum_w |R^(w)|
    std::size_t grid_size = 0;
};

DensityCheck density_check(const TowerSequence& tower, std::size_t m, double x, const TrigSeries& r,
                           const GridPolicy& policy = {});

}  // namespace rankone
