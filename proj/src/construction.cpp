#include "rankone/construction.hpp"

#include <algorithm>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "rankone/errors.hpp"

namespace rankone {

namespace {

const BigInt& min_spacer(const StageSpec& stage) {
    return *std::min_element(stage.spacers.begin(), stage.spacers.end());
}

std::string stage_key(std::size_t k) { return "stage[" + std::to_string(k) + "]"; }

}  // namespace

void StageSpec::validate() const {
    if (columns < 1) throw ValidationError(stage_key(index) + ".p", "cutting number must be >= 1");
    if (spacers.size() != columns)
        throw ValidationError(stage_key(index) + ".spacers",
                              "expected " + std::to_string(columns) + " spacers, got " +
                                  std::to_string(spacers.size()));
    for (std::size_t j = 0; j < spacers.size(); ++j)
        if (spacers[j] < 0)
            throw ValidationError(stage_key(index) + ".spacers[" + std::to_string(j) + "]",
                                  "spacer must be nonnegative");
    if (height < 1) throw ValidationError(stage_key(index) + ".h", "height must be >= 1");
}

BigInt StageSpec::next_height() const {
    BigInt h = height * columns;
    for (const auto& a : spacers) h += a;
    return h;
}

const StageSpec& TowerSequence::stage(std::size_t k) const {
    if (k >= stages.size())
        throw ValidationError("stage", "index " + std::to_string(k) + " beyond tower depth " +
                                           std::to_string(depth()));
    return stages[k];
}

BigInt TowerSequence::next_height() const { return stages.back().next_height(); }

PartialSums partial_sums(const StageSpec& stage) {
    PartialSums s(stage.spacers.size() + 1);
    s[0] = 0;
    for (std::size_t j = 0; j < stage.spacers.size(); ++j) s[j + 1] = s[j] + stage.spacers[j];
    return s;
}

std::vector<BigInt> exponents(const StageSpec& stage) {
    const PartialSums s = partial_sums(stage);
    std::vector<BigInt> e(stage.columns);
    for (std::size_t j = 0; j < stage.columns; ++j) e[j] = stage.height * j + s[j];
    return e;
}

std::vector<BigInt> geometric_spacers(std::size_t columns, const BigInt& scale) {
    std::vector<BigInt> a(columns);
    BigInt power = 3;
    for (std::size_t j = 0; j < columns; ++j) {
        if (j == 0) {
            a[j] = 0;
        } else {
            a[j] = power * scale;
            power *= 3;
        }
    }
    return a;
}

std::size_t geometric_max_columns(const BigInt& height, const BigInt& scale, std::size_t cap) {
    // s(1) = 0 always fits; s(p+1) = s(p) + 3^p c.
    std::size_t p = 1;
    BigInt s = 0;
    BigInt power = 3;
    while (cap == 0 || p < cap) {
        const BigInt next = s + power * scale;
        if (2 * next >= height) break;
        s = next;
        power *= 3;
        ++p;
    }
    return p;
}

namespace {

struct StageBuilder {
    std::size_t k;
    const BigInt& height;

    std::vector<BigInt> operator()(const ExplicitRule& rule) const {
        if (k >= rule.spacers.size())
            throw ValidationError("params.spacers", "no spacer list for stage " + std::to_string(k));
        return rule.spacers[k];
    }
    std::vector<BigInt> operator()(const ZeroSpacersRule& rule) const {
        if (rule.columns.values.empty()) throw ValidationError("params.p", "empty schedule");
        return std::vector<BigInt>(rule.columns.at(k), BigInt(0));
    }
    std::vector<BigInt> operator()(const GeometricRule& rule) const {
        if (rule.scale.values.empty()) throw ValidationError("params.c", "empty schedule");
        const BigInt& c = rule.scale.at(k);
        if (c < 1) throw ValidationError("params.c", "scale must be >= 1");
        if (rule.lift_columns < 1) throw ValidationError("params.lift_columns", "must be >= 1");
        const std::size_t p = geometric_max_columns(height, c, rule.p_cap);
        if (p < rule.p_floor) return std::vector<BigInt>(rule.lift_columns, BigInt(0));
        return geometric_spacers(p, c);
    }
    std::vector<BigInt> operator()(const StaircaseRule& rule) const {
        if (rule.columns.values.empty()) throw ValidationError("params.p", "empty schedule");
        std::vector<BigInt> a(rule.columns.at(k));
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = j;
        return a;
    }
    std::vector<BigInt> operator()(const GeneratedRule& rule) const { return rule.generate(k, height); }
};

std::string family_name(const SpacerRule& rule) {
    struct Namer {
        std::string operator()(const ExplicitRule&) const { return "explicit"; }
        std::string operator()(const ZeroSpacersRule&) const { return "zero"; }
        std::string operator()(const GeometricRule&) const { return "geometric"; }
        std::string operator()(const StaircaseRule&) const { return "staircase"; }
        std::string operator()(const GeneratedRule& r) const { return r.name; }
    };
    return std::visit(Namer{}, rule);
}

}  // namespace

TowerSequence build_tower(const SpacerRule& rule, std::size_t depth, const BuildOptions& options) {
    if (depth < 1) throw ValidationError("depth", "must be >= 1");
    TowerSequence tower;
    tower.family = family_name(rule);
    tower.stages.reserve(depth + 1);
    BigInt height = 1;
    for (std::size_t k = 0; k <= depth; ++k) {
        StageSpec stage;
        stage.index = k;
        stage.height = height;
        stage.spacers = std::visit(StageBuilder{k, height}, rule);
        stage.columns = stage.spacers.size();
        stage.validate();
        height = stage.next_height();
        if (bit_length(height) > options.bit_cap)
            throw CapError("height after stage " + std::to_string(k) + " needs " +
                               std::to_string(bit_length(height)) + " bits (cap " +
                               std::to_string(options.bit_cap) + ")",
                           bit_length(height));
        tower.stages.push_back(std::move(stage));
    }
    return tower;
}

double ratio_to_double(const BigInt& num, const BigInt& den) {
    using Float = boost::multiprecision::cpp_bin_float_double_extended;
    return static_cast<double>(Float(num) / Float(den));
}

Thm21Flags check_thm21(const StageSpec& stage) {
    const PartialSums s = partial_sums(stage);
    Thm21Flags flags;
    flags.spacer_growth = true;
    for (std::size_t j = 0; j < stage.columns; ++j) {
        if (stage.spacers[j] < 2 * s[j]) {
            flags.spacer_growth = false;
            break;
        }
    }
    flags.height_margin = 2 * s[stage.columns] < stage.height;
    return flags;
}

bool check_thm36(const StageSpec& stage) {
    const PartialSums s = partial_sums(stage);
    const BigInt& lo = min_spacer(stage);
    const BigInt numerator = s[stage.columns] - lo * stage.columns;
    return 2 * numerator < stage.height + lo;
}

double restricted_growth_ratio(const StageSpec& stage) {
    const BigInt& lo = min_spacer(stage);
    BigInt excess = 0;
    for (const auto& a : stage.spacers) excess += a - lo;
    return ratio_to_double(excess, stage.height + lo);
}

std::vector<double> check_restricted_growth(const TowerSequence& tower) {
    std::vector<double> out;
    out.reserve(tower.stages.size());
    for (const auto& st : tower.stages) out.push_back(restricted_growth_ratio(st));
    return out;
}

std::vector<double> check_finiteness(const TowerSequence& tower) {
    std::vector<double> out;
    out.reserve(tower.stages.size());
    double acc = 0.0;
    for (const auto& st : tower.stages) {
        const PartialSums s = partial_sums(st);
        acc += ratio_to_double(s.back(), st.height * st.columns);
        out.push_back(acc);
    }
    return out;
}

std::vector<double> inverse_square_columns(const TowerSequence& tower) {
    std::vector<double> out;
    out.reserve(tower.stages.size());
    double acc = 0.0;
    for (const auto& st : tower.stages) {
        const double p = static_cast<double>(st.columns);
        acc += 1.0 / (p * p);
        out.push_back(acc);
    }
    return out;
}

ConditionReport condition_report(const TowerSequence& tower) {
    const auto growth = check_restricted_growth(tower);
    const auto finite = check_finiteness(tower);
    const auto inv = inverse_square_columns(tower);
    ConditionReport report(tower.stages.size());
    for (std::size_t k = 0; k < tower.stages.size(); ++k) {
        const auto flags = check_thm21(tower.stages[k]);
        report[k].thm21_i = flags.spacer_growth;
        report[k].thm21_ii = flags.height_margin;
        report[k].thm36_ii = check_thm36(tower.stages[k]);
        report[k].restricted_growth_ratio = growth[k];
        report[k].inv_p_sq_partial = inv[k];
        report[k].finiteness_partial = finite[k];
    }
    return report;
}

}  // namespace rankone
