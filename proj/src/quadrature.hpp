#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "rankone/errors.hpp"
#include "rankone/trigpoly.hpp"

namespace rankone::detail {

struct DoublingOutcome {
    std::vector<MeanPair> means;
    std::size_t grid_size = 0;
    double delta = 0.0;
    bool converged = false;
};

/// Starts at twice the exactness-rule size for `degree` (or at the cap) and
/// doubles until every mean agrees with its half-grid value within tolerance.
/// `eval(N)` returns the fine/coarse means of each integrand on the N grid.
inline DoublingOutcome run_doubling(const BigInt& degree, const GridPolicy& policy,
                                    const std::function<std::vector<MeanPair>(std::size_t)>& eval) {
    const std::size_t cap = policy.cap();
    const std::size_t exact = exact_grid_size(degree);
    std::size_t n = (exact == 0 || exact >= cap) ? cap : 2 * exact;
    DoublingOutcome out;
    for (;;) {
        out.means = eval(n);
        out.grid_size = n;
        out.delta = 0.0;
        for (const auto& m : out.means) out.delta = std::max(out.delta, m.delta());
        if (out.delta <= policy.tolerance) {
            out.converged = true;
            return out;
        }
        if (n >= cap) return out;
        n *= 2;
    }
}

/// Exactness-rule grid for a polynomial integrand, or CapError.
inline std::size_t exact_grid_or_throw(const BigInt& degree, const GridPolicy& policy, const char* what) {
    const std::size_t n = exact_grid_size(degree);
    if (n == 0 || n > policy.cap()) {
        const std::uint64_t required = n == 0 ? ~std::uint64_t{0} : n;
        throw CapError(std::string(what) + ": exact grid needs N = " +
                           (n == 0 ? std::string(">2^62") : std::to_string(n)) + " beyond cap 2^" +
                           std::to_string(policy.log2_cap),
                       required);
    }
    return n;
}

}  // namespace rankone::detail
