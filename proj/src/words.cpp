#include "rankone/words.hpp"

#include <algorithm>
#include <numeric>

#include "rankone/errors.hpp"
#include "rankone/parallel.hpp"

namespace rankone {

BigInt word_value(const StageSpec& stage, const SignVector& eps) {
    const auto e = exponents(stage);
    BigInt w = 0;
    for (std::size_t q = 0; q < eps.size(); ++q) {
        if (eps[q] > 0)
            w += e[q];
        else if (eps[q] < 0)
            w -= e[q];
    }
    return w;
}

std::size_t support_size(const SignVector& eps) {
    return static_cast<std::size_t>(std::count_if(eps.begin(), eps.end(), [](std::int8_t v) { return v != 0; }));
}

const WordEntry* WordTable::find(const BigInt& w) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), w,
                               [](const WordEntry& e, const BigInt& v) { return e.value < v; });
    if (it == entries.end() || it->value != w) return nullptr;
    return &*it;
}

namespace {

SignVector decode(std::size_t index, std::size_t columns) {
    SignVector eps(columns);
    for (std::size_t q = 0; q < columns; ++q) {
        eps[q] = static_cast<std::int8_t>(static_cast<int>(index % 3) - 1);
        index /= 3;
    }
    return eps;
}

std::size_t power_of_three(std::size_t p) {
    std::size_t n = 1;
    for (std::size_t i = 0; i < p; ++i) n *= 3;
    return n;
}

}  // namespace

WordTable enumerate_words(const StageSpec& stage) {
    const std::size_t p = stage.columns;
    if (p > kMaxWordColumns)
        throw CapError("word enumeration supports p <= " + std::to_string(kMaxWordColumns) + ", got " +
                           std::to_string(p),
                       p);
    const auto e = exponents(stage);
    const std::size_t count = power_of_three(p);

    // Enumeration order is base-3 over positions; chunks are independent.
    std::vector<BigInt> values(count);
    const std::size_t chunk = 729;
    parallel_for((count + chunk - 1) / chunk, [&](std::size_t c) {
        const std::size_t end = std::min(count, (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < end; ++i) {
            std::size_t idx = i;
            BigInt w = 0;
            for (std::size_t q = 0; q < p; ++q) {
                const std::size_t digit = idx % 3;
                idx /= 3;
                if (digit == 2)
                    w += e[q];
                else if (digit == 0)
                    w -= e[q];
            }
            values[i] = std::move(w);
        }
    });

    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    WordTable table;
    table.stage = stage.index;
    table.columns = p;
    table.vector_count = count;
    for (std::size_t i = 0; i < count;) {
        WordEntry entry;
        entry.value = values[order[i]];
        std::size_t j = i;
        while (j < count && values[order[j]] == entry.value) entry.vectors.push_back(decode(order[j++], p));
        entry.support = support_size(entry.vectors.front());
        for (const auto& v : entry.vectors)
            if (v[0] == 0) {
                entry.support = support_size(v);
                break;
            }
        table.entries.push_back(std::move(entry));
        i = j;
    }
    table.max_word = table.entries.back().value;
    return table;
}

BigInt all_plus_word(const StageSpec& stage) {
    const std::size_t p = stage.columns;
    const auto s = partial_sums(stage);
    BigInt w = stage.height * BigInt(p * (p - 1) / 2);
    for (std::size_t q = 1; q < p; ++q) w += s[q];
    return w;
}

DistinctnessReport check_distinct(const WordTable& table, std::size_t max_witnesses) {
    DistinctnessReport report;
    for (const auto& entry : table.entries) {
        const SignVector* first = nullptr;
        for (const auto& v : entry.vectors) {
            if (v[0] != 0) continue;
            ++report.checked_vectors;
            if (first == nullptr) {
                first = &v;
                continue;
            }
            report.distinct = false;
            ++report.collision_count;
            if (report.collisions.size() < max_witnesses) report.collisions.emplace_back(*first, v);
        }
    }
    return report;
}

bool check_triple_growth(const StageSpec& stage) {
    const auto s = partial_sums(stage);
    for (std::size_t q = 1; q + 1 < s.size(); ++q)
        if (s[q + 1] < 3 * s[q]) return false;
    return true;
}

std::size_t r_of_word(const WordTable& table, const BigInt& w) {
    const WordEntry* entry = table.find(w);
    if (entry == nullptr) throw ValidationError("word", to_decimal(w) + " is not a word of this stage");
    const SignVector* found = nullptr;
    for (const auto& v : entry->vectors) {
        if (v[0] != 0) continue;
        if (found != nullptr)
            throw ValidationError("word", to_decimal(w) + " is produced by several sign vectors");
        found = &v;
    }
    return support_size(*found);
}

}  // namespace rankone
