#include "doctest.h"
#include "rankone/construction.hpp"
#include "rankone/errors.hpp"
#include "rankone/words.hpp"

using namespace rankone;

namespace {

StageSpec make_stage(std::size_t k, const BigInt& h, std::vector<BigInt> a) {
    StageSpec s;
    s.index = k;
    s.columns = a.size();
    s.spacers = std::move(a);
    s.height = h;
    return s;
}

std::vector<BigInt> big(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("zero spacers double the height") {
    const auto t = build_tower(ZeroSpacersRule{{{2}}}, 2);
    REQUIRE(t.stages.size() == 3);
    CHECK(t.stage(0).height == 1);
    CHECK(t.stage(1).height == 2);
    CHECK(t.stage(2).height == 4);
}

TEST_CASE("explicit stage height recursion") {
    const auto s = make_stage(3, 100, big({0, 1, 3, 9}));
    CHECK(s.next_height() == 413);
}

TEST_CASE("partial sums and exponents") {
    const auto s = make_stage(0, 100, big({0, 1, 3, 9}));
    CHECK(partial_sums(s) == big({0, 0, 1, 4, 13}));
    CHECK(exponents(s) == big({0, 100, 201, 304}));
    CHECK(partial_sums(make_stage(0, 1, big({5}))) == big({0, 5}));
    CHECK(exponents(make_stage(0, 10, big({0, 0, 0}))) == big({0, 10, 20}));
    CHECK(exponents(make_stage(0, 100, big({0, 0, 0, 0}))) == big({0, 100, 200, 300}));
}

TEST_CASE("geometric rule picks the largest admissible column count") {
    // Enumerate p with a_1 = 0, a_{j+1} = 3^j and test 2 s(p) < h directly.
    const BigInt h = 100;
    std::size_t expected = 0;
    for (std::size_t p = 1; p < 20; ++p) {
        BigInt s = 0, pow3 = 1;
        for (std::size_t j = 1; j < p; ++j) {
            pow3 *= 3;
            s += pow3;
        }
        if (2 * s < h) expected = p;
    }
    CHECK(expected == 4);
    CHECK(geometric_max_columns(h, 1) == expected);
    CHECK(geometric_spacers(4, 1) == big({0, 3, 9, 27}));
    CHECK(geometric_max_columns(h, 1, 3) == 3);
}

TEST_CASE("condition checker examples") {
    auto f = check_thm21(make_stage(0, 100, big({0, 1, 3, 9})));
    CHECK(f.spacer_growth);
    CHECK(f.height_margin);
    f = check_thm21(make_stage(0, 100, big({0, 1, 2, 3})));
    CHECK_FALSE(f.spacer_growth);
    CHECK(f.height_margin);
    for (int h : {1, 2, 7, 1000}) {
        f = check_thm21(make_stage(0, h, big({0, 0, 0})));
        CHECK(f.spacer_growth);
        CHECK(f.height_margin);
    }
}

TEST_CASE("shifted condition") {
    CHECK(check_thm36(make_stage(0, 10, big({5, 5, 5, 5}))));
    CHECK(check_thm36(make_stage(0, 100, big({0, 1, 3, 9}))));
    CHECK(check_thm36(make_stage(0, 100, big({2, 3, 5, 11}))));
    CHECK_FALSE(check_thm36(make_stage(0, 10, big({0, 0, 0, 20}))));
}

TEST_CASE("restricted growth and finiteness") {
    CHECK(restricted_growth_ratio(make_stage(0, 100, big({0, 1, 3, 9}))) == doctest::Approx(0.13).epsilon(1e-15));
    CHECK(restricted_growth_ratio(make_stage(0, 10, big({5, 5, 5}))) == 0.0);

    TowerSequence one;
    one.family = "explicit";
    one.stages.push_back(make_stage(0, 100, big({0, 1, 3, 9})));
    const auto fin = check_finiteness(one);
    REQUIRE(fin.size() == 1);
    CHECK(fin[0] == doctest::Approx(0.0325).epsilon(1e-15));

    const auto zero = build_tower(ZeroSpacersRule{{{3}}}, 5);
    for (double v : check_finiteness(zero)) CHECK(v == 0.0);
    for (double v : check_restricted_growth(zero)) CHECK(v == 0.0);
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(build_tower(ZeroSpacersRule{{{2}}}, 0), ValidationError);
    CHECK_THROWS_AS(build_tower(ZeroSpacersRule{{{0}}}, 2), ValidationError);
    CHECK_THROWS_AS(build_tower(ExplicitRule{{big({1}), big({-1, 2})}}, 1), ValidationError);
    CHECK_THROWS_AS(build_tower(ExplicitRule{{big({1})}}, 1), ValidationError);
    CHECK_THROWS_AS(make_stage(0, 0, big({1})).validate(), ValidationError);
}

TEST_CASE("bit cap guards runaway heights") {
    BuildOptions opts;
    opts.bit_cap = 40;
    CHECK_THROWS_AS(build_tower(ZeroSpacersRule{{{2}}}, 60, opts), CapError);
    CHECK_NOTHROW(build_tower(ZeroSpacersRule{{{2}}}, 30, opts));
}

TEST_CASE("schedules repeat their last entry") {
    const auto t = build_tower(ZeroSpacersRule{{{2, 3}}}, 4);
    CHECK(t.stage(0).columns == 2);
    for (std::size_t k = 1; k <= 4; ++k) CHECK(t.stage(k).columns == 3);
}

TEST_CASE("tower invariants across families") {
    GeometricRule geo;
    geo.scale = {{BigInt(1), BigInt(5), BigInt(2)}};
    const std::vector<std::pair<SpacerRule, std::size_t>> cases{
        {ZeroSpacersRule{{{2, 3, 5}}}, 8},
        {StaircaseRule{{{4, 6, 2}}}, 8},
        {geo, 12},
        {ExplicitRule{{big({0, 0}), big({1, 2, 3}), big({0, 7}), big({4, 0, 0, 9})}}, 3},
    };
    for (const auto& [rule, depth] : cases) {
        const auto t = build_tower(rule, depth);
        CHECK(t.stage(0).height == 1);
        for (std::size_t k = 0; k < t.stages.size(); ++k) {
            const auto& s = t.stage(k);
            CHECK(s.index == k);
            const auto ps = partial_sums(s);
            for (std::size_t j = 1; j < ps.size(); ++j) CHECK(ps[j] >= ps[j - 1]);
            const auto e = exponents(s);
            CHECK(e.front() == 0);
            for (std::size_t j = 1; j < e.size(); ++j) CHECK(e[j] > e[j - 1]);
            CHECK(e.back() < s.next_height());
            if (k + 1 < t.stages.size()) CHECK(t.stage(k + 1).height == s.columns * s.height + ps.back());
        }
        const auto report = condition_report(t);
        for (std::size_t k = 1; k < report.size(); ++k) {
            CHECK(report[k].inv_p_sq_partial >= report[k - 1].inv_p_sq_partial);
            CHECK(report[k].finiteness_partial >= report[k - 1].finiteness_partial);
        }
        for (const auto& c : report) CHECK(c.restricted_growth_ratio >= 0.0);
    }
}

TEST_CASE("geometric family passes the singularity conditions at every stage") {
    for (int c : {1, 2, 7}) {
        GeometricRule geo;
        geo.scale = {{BigInt(c)}};
        const auto t = build_tower(geo, 14);
        bool saw_geometric = false;
        for (const auto& s : t.stages) {
            const auto f = check_thm21(s);
            CHECK(f.spacer_growth);
            CHECK(f.height_margin);
            CHECK(restricted_growth_ratio(s) < 0.5);
            // condition (i) forces triple growth of the partial sums
            CHECK(check_triple_growth(s));
            saw_geometric = saw_geometric || s.columns >= 3;
        }
        CHECK(saw_geometric);
    }
}

TEST_CASE("staircase fails condition (i) whenever p >= 4") {
    const auto t = build_tower(StaircaseRule{{{2, 3, 4, 5, 8, 12}}}, 7);
    for (const auto& s : t.stages) {
        const auto f = check_thm21(s);
        if (s.columns >= 4) CHECK_FALSE(f.spacer_growth);
        if (s.columns <= 3) CHECK(f.spacer_growth);
    }
}

TEST_CASE("geometric lift stages and caps") {
    GeometricRule geo;
    geo.scale = {{BigInt(1)}};
    geo.p_floor = 6;
    geo.p_cap = 6;
    geo.lift_columns = 3;
    const auto t = build_tower(geo, 10);
    for (const auto& s : t.stages) {
        CHECK((s.columns == 3 || s.columns == 6));
        if (s.columns == 3)
            for (const auto& a : s.spacers) CHECK(a == 0);
        else
            CHECK(s.spacers == geometric_spacers(6, 1));
    }
    CHECK(t.stages.back().columns == 6);
}
