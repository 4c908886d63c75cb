#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "rankone/bigint.hpp"

namespace rankone {

/// One cutting-and-stacking stage: the stage-k tower of height h_k is cut into
/// p_k columns and spacers a_1..a_{p_k} are stacked above them.
struct StageSpec {
    std::size_t index = 0;
    std::size_t columns = 1;      // p_k
    std::vector<BigInt> spacers;  // a_1^{(k)} .. a_{p_k}^{(k)}
    BigInt height = 1;            // h_k

    /// Throws ValidationError when the invariants do not hold.
    void validate() const;
    /// p_k h_k + sum of spacers.
    BigInt next_height() const;
};

struct TowerSequence {
    std::string family;
    std::vector<StageSpec> stages;  // stages[k].index == k, stages[0].height == 1

    std::size_t depth() const { return stages.empty() ? 0 : stages.size() - 1; }
    const StageSpec& stage(std::size_t k) const;
    /// Height of the tower produced by the last stored stage.
    BigInt next_height() const;
};

/// s(0) = 0, s(j) = a_1 + ... + a_j, j = 0..p_k.
using PartialSums = std::vector<BigInt>;

PartialSums partial_sums(const StageSpec& stage);

/// e_j = j h_k + s_k(j), j = 0..p_k-1. The top spacer never appears here.
std::vector<BigInt> exponents(const StageSpec& stage);

// ---------------------------------------------------------------------------
// Spacer rules

/// A value given either once (applies to every stage) or per stage; a short list
/// is extended by repeating its last entry.
template <class T>
struct StageSchedule {
    std::vector<T> values;
    const T& at(std::size_t k) const { return values[k < values.size() ? k : values.size() - 1]; }
};

struct ExplicitRule {
    std::vector<std::vector<BigInt>> spacers;  // per stage; p_k = size
};

struct ZeroSpacersRule {
    StageSchedule<std::size_t> columns;
};

/// a_1 = 0, a_{j+1} = 3^j c_k, with p_k the largest p such that 2 s_k(p) < h_k
/// (optionally capped). While that maximum is below `p_floor` the stage is a
/// lift stage: zero spacers over `lift_columns` columns, which raises h_k and
/// satisfies both conditions trivially.
struct GeometricRule {
    StageSchedule<BigInt> scale;      // c_k >= 1
    std::size_t p_cap = 0;            // 0: uncapped
    std::size_t p_floor = 2;
    std::size_t lift_columns = 2;
};

/// a_j = j - 1. Negative control for the spacer-growth checker.
struct StaircaseRule {
    StageSchedule<std::size_t> columns;
};

/// Spacers supplied by another module (random ensembles). Called with the stage
/// index and the current height; returns the full spacer list.
struct GeneratedRule {
    std::string name;
    std::function<std::vector<BigInt>(std::size_t k, const BigInt& height)> generate;
};

using SpacerRule =
    std::variant<ExplicitRule, ZeroSpacersRule, GeometricRule, StaircaseRule, GeneratedRule>;

struct BuildOptions {
    std::size_t bit_cap = 4096;
};

/// Builds stages 0..depth (depth+1 stages). Throws ValidationError for bad
/// rules and CapError when a height would exceed `bit_cap` bits.
TowerSequence build_tower(const SpacerRule& rule, std::size_t depth, const BuildOptions& options = {});

/// Largest p with 2 s(p) < h for the geometric spacers of scale c (at least 1).
std::size_t geometric_max_columns(const BigInt& height, const BigInt& scale, std::size_t cap = 0);

/// Geometric spacer list (0, 3c, 9c, ..., 3^{p-1} c).
std::vector<BigInt> geometric_spacers(std::size_t columns, const BigInt& scale);

// ---------------------------------------------------------------------------
// Per-stage checks

struct Thm21Flags {
    bool spacer_growth = false;   // (i)  a_{j+1} >= 2 s(j), j = 0..p-1
    bool height_margin = false;   // (ii) s(p) / h < 1/2
};

Thm21Flags check_thm21(const StageSpec& stage);

/// (s(p) - p min a) / (h + min a) < 1/2
bool check_thm36(const StageSpec& stage);

/// sum_j (a_j - min a) / (h + min a)
double restricted_growth_ratio(const StageSpec& stage);

std::vector<double> check_restricted_growth(const TowerSequence& tower);

/// Partial sums over stages of (sum_j a_j) / (p_k h_k): the measure added by spacers.
std::vector<double> check_finiteness(const TowerSequence& tower);

/// Partial sums of 1 / p_k^2.
std::vector<double> inverse_square_columns(const TowerSequence& tower);

struct StageConditions {
    bool thm21_i = false;
    bool thm21_ii = false;
    bool thm36_ii = false;
    double restricted_growth_ratio = 0.0;
    double inv_p_sq_partial = 0.0;
    double finiteness_partial = 0.0;
};

using ConditionReport = std::vector<StageConditions>;

ConditionReport condition_report(const TowerSequence& tower);

/// num / den rounded to double; den > 0.
double ratio_to_double(const BigInt& num, const BigInt& den);

}  // namespace rankone
