#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rankone/construction.hpp"
#include "rankone/trigpoly.hpp"

namespace rankone {

/// Stage indices n_1 < n_2 < ... < n_k.
class FactorSelection {
public:
    FactorSelection() = default;
    explicit FactorSelection(std::vector<std::size_t> indices);

    const std::vector<std::size_t>& indices() const { return indices_; }
    bool empty() const { return indices_.empty(); }
    std::size_t size() const { return indices_.size(); }
    std::size_t back() const { return indices_.back(); }
    FactorSelection with(std::size_t index) const;

private:
    std::vector<std::size_t> indices_;
};

/// A grid integral of a non-polynomial integrand with its doubling delta.
struct RieszEstimate {
    double value = 0.0;
    std::size_t grid_size = 0;
    double convergence_delta = 0.0;
    bool converged = false;
    FactorSelection selection;
};

/// Finite trigonometric polynomial R(t) = sum_f c_f e^{i f t}.
struct TrigSeries {
    std::vector<std::pair<std::int64_t, cplx>> terms;

    static TrigSeries constant(double c) { return {{{0, cplx(c, 0.0)}}}; }
    /// cos(f t)
    static TrigSeries cosine(std::int64_t f);
    std::int64_t max_frequency() const;
    cplx mean() const;  // coefficient of frequency 0
    /// sum of |coefficients|, i.e. sum_w |R^(w)| for the normalized Fourier coefficients
    double coefficient_l1() const;
    std::vector<cplx> on_grid(const UniformGrid& grid) const;
};

/// prod_{k=1}^n |P_k|^2 at the grid nodes (n = 0: constant 1).
RealGridFunction partial_product_sq(const TowerSequence& tower, std::size_t n, const UniformGrid& grid);

/// Sum of the top exponents of stages 1..n: the degree of prod P_k.
BigInt product_degree(const TowerSequence& tower, std::size_t n);

struct MassEstimate {
    double value = 0.0;
    std::size_t grid_size = 0;
};

/// Mean of the n-th partial Riesz product on its exactness-rule grid.
/// Throws CapError (with the required N) if that grid exceeds the policy cap.
MassEstimate mass(const TowerSequence& tower, std::size_t n, const GridPolicy& policy = {});

/// Doubling-converged mean of prod_i |P_{n_i}|.
RieszEstimate l1_product(const TowerSequence& tower, const FactorSelection& selection,
                         const GridPolicy& policy = {});

struct GreedyResult {
    FactorSelection selection;
    std::vector<double> values;
    std::vector<double> deltas;
    std::vector<std::size_t> grid_sizes;
};

struct StageWindow {
    std::size_t first = 1;
    std::optional<std::size_t> last;  // default: tower depth
};

/// Appends, `budget` times, the window stage beyond the current maximum that
/// minimizes the running L1 product; ties go to the smaller index.
GreedyResult greedy_bourgain(const TowerSequence& tower, std::size_t budget, const StageWindow& window = {},
                             const GridPolicy& policy = {});

struct Lemma23Result {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    std::size_t grid_size = 0;
    double convergence_delta = 0.0;
    bool converged = false;
};

/// int Q|P_m| against (1/2)(int Q + int Q|P_m|^2) - (1/8)(int Q ||P_m|^2 - 1|)^2,
/// Q = prod over the selection (empty selection: Q = 1). Requires m > max(selection).
Lemma23Result lemma23_check(const TowerSequence& tower, const FactorSelection& selection, std::size_t m,
                            const GridPolicy& policy = {});

/// |int R |P_m|^2 - int R| on the exactness-rule grid.
double weak_convergence_check(const TowerSequence& tower, std::size_t m, const TrigSeries& r,
                              const GridPolicy& policy = {});

struct DeviationEstimate {
    double abs_deviation = 0.0;  // int ||P_m| - 1|
    double sq_deviation = 0.0;   // int ||P_m|^2 - 1|
    std::size_t grid_size = 0;
    double convergence_delta = 0.0;
    bool converged = false;
};

DeviationEstimate l1_deviation(const TowerSequence& tower, std::size_t m, const GridPolicy& policy = {});

/// |P_k| on an N-point grid.
std::vector<double> stage_modulus(const TowerSequence& tower, std::size_t k, std::size_t n);

}  // namespace rankone
