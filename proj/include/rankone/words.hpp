#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rankone/bigint.hpp"
#include "rankone/construction.hpp"

namespace rankone {

/// Signs in {-1, 0, +1} per column position q = 0..p-1.
using SignVector = std::vector<std::int8_t>;

/// sum_q eps_q (q h + s(q)) = sum_q eps_q e_q
BigInt word_value(const StageSpec& stage, const SignVector& eps);

std::size_t support_size(const SignVector& eps);

struct WordEntry {
    BigInt value;
    std::vector<SignVector> vectors;  // every sign vector producing `value`
    std::size_t support = 0;          // support size of the first vector off position 0
};

/// All 3^p signed words of one stage, sorted by value.
struct WordTable {
    std::size_t stage = 0;
    std::size_t columns = 0;
    std::size_t vector_count = 0;
    BigInt max_word;  // N_m
    std::vector<WordEntry> entries;

    const WordEntry* find(const BigInt& w) const;
};

/// Largest supported column count (3^12 = 531441 sign vectors).
inline constexpr std::size_t kMaxWordColumns = 12;

/// Throws CapError when p exceeds kMaxWordColumns.
WordTable enumerate_words(const StageSpec& stage);

/// p(p-1)/2 h + s(1) + ... + s(p-1): the all-(+1) word.
BigInt all_plus_word(const StageSpec& stage);

struct DistinctnessReport {
    bool distinct = true;
    std::size_t checked_vectors = 0;  // vectors with eps_0 = 0
    std::size_t collision_count = 0;
    std::vector<std::pair<SignVector, SignVector>> collisions;  // first few witnesses
};

/// Injectivity of the word map on sign vectors with eps_0 = 0. Position 0
/// contributes e_0 = 0, so it is excluded; every word is otherwise produced
/// by exactly three vectors differing only at position 0.
DistinctnessReport check_distinct(const WordTable& table, std::size_t max_witnesses = 16);

/// s(q+1) >= 3 s(q) for q = 1..p-1.
bool check_triple_growth(const StageSpec& stage);

/// Support size of the unique eps_0 = 0 vector producing w. Throws
/// ValidationError if w is absent or produced by several such vectors.
std::size_t r_of_word(const WordTable& table, const BigInt& w);

}  // namespace rankone
