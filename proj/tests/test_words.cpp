#include "doctest.h"
#include "rankone/errors.hpp"
#include "rankone/words.hpp"

using namespace rankone;

namespace {

std::size_t pow3(std::size_t p) {
    std::size_t n = 1;
    while (p--) n *= 3;
    return n;
}

/// Geometric tower whose last stage has exactly `p` columns.
TowerSequence geometric_with_columns(std::size_t p) {
    GeometricRule g;
    g.scale = {{BigInt(1)}};
    g.p_floor = g.p_cap = p;
    g.lift_columns = 3;
    std::size_t lifts = 0;
    for (BigInt h = 1; geometric_max_columns(h, 1) < p; h *= 3) ++lifts;
    return build_tower(g, lifts);
}

}  // namespace

TEST_CASE("word value is the signed exponent sum") {
    StageSpec s;
    s.columns = 4;
    s.spacers = {0, 1, 3, 9};
    s.height = 100;  // e = (0, 100, 201, 304)
    CHECK(word_value(s, {0, 1, 0, 0}) == 100);
    CHECK(word_value(s, {1, 1, -1, 1}) == 203);
    CHECK(word_value(s, {0, -1, -1, -1}) == -605);
    CHECK(support_size({0, 1, -1, 0}) == 2);
}

TEST_CASE("geometric stages have distinct words") {
    GeometricRule g;
    g.scale = {{BigInt(1)}};
    const auto t = build_tower(g, 14);
    std::size_t checked = 0;
    for (const auto& s : t.stages) {
        if (s.columns > 8) continue;
        const auto table = enumerate_words(s);
        CHECK(table.vector_count == pow3(s.columns));
        const auto rep = check_distinct(table);
        CHECK(rep.distinct);
        CHECK(rep.collision_count == 0);
        CHECK(rep.checked_vectors == pow3(s.columns - 1));
        // every word arises from exactly three vectors differing only at position 0
        for (const auto& e : table.entries) CHECK(e.vectors.size() == 3);
        CHECK(table.entries.size() == pow3(s.columns - 1));
        ++checked;
    }
    CHECK(checked > 5);
}

TEST_CASE("ten columns: 59049 sign vectors, all distinct") {
    const auto t = geometric_with_columns(10);
    const auto& s = t.stage(t.depth());
    REQUIRE(s.columns == 10);
    const auto table = enumerate_words(s);
    CHECK(table.vector_count == 59049);
    CHECK(check_distinct(table).distinct);
    CHECK(check_triple_growth(s));
}

TEST_CASE("arithmetic progressions collide") {
    StageSpec s;
    s.columns = 3;
    s.spacers = {0, 0, 0};
    s.height = 10;  // e = (0, 10, 20): e_1 = e_2 - e_1
    const auto table = enumerate_words(s);
    const auto rep = check_distinct(table);
    CHECK_FALSE(rep.distinct);
    CHECK(rep.collision_count > 0);
    REQUIRE_FALSE(rep.collisions.empty());
    const auto& [a, b] = rep.collisions.front();
    CHECK(word_value(s, a) == word_value(s, b));
    CHECK(a[0] == 0);
    CHECK(b[0] == 0);
    CHECK_THROWS_AS(r_of_word(table, 10), ValidationError);
}

TEST_CASE("staircase stages with many columns collide") {
    const auto t = build_tower(StaircaseRule{{{5}}}, 3);
    CHECK_FALSE(check_distinct(enumerate_words(t.stage(3))).distinct);
}

TEST_CASE("largest word and word sizes") {
    const auto t = geometric_with_columns(6);
    const auto& s = t.stage(t.depth());
    const auto table = enumerate_words(s);
    CHECK(table.max_word == all_plus_word(s));
    const auto e = exponents(s);
    BigInt sum = 0;
    for (const auto& v : e) sum += v;
    CHECK(all_plus_word(s) == sum);
    CHECK(r_of_word(table, e[3]) == 1);
    CHECK(r_of_word(table, e[1] + e[4] - e[5]) == 3);
    CHECK(r_of_word(table, sum) == 5);
    CHECK_THROWS_AS(r_of_word(table, sum + 1), ValidationError);
}

TEST_CASE("enumeration cap") {
    const auto t = geometric_with_columns(13);
    CHECK_THROWS_AS(enumerate_words(t.stage(t.depth())), CapError);
}

TEST_CASE("triple growth") {
    StageSpec s;
    s.columns = 4;
    s.height = 1000;
    s.spacers = {0, 1, 3, 9};  // s = 0, 0, 1, 4, 13
    CHECK(check_triple_growth(s));
    s.spacers = {0, 1, 1, 9};  // s(3) = 2 < 3 s(2) = 3
    CHECK_FALSE(check_triple_growth(s));
}
