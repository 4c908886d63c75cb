#include <algorithm>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rankone/cltlab.hpp"
#include "rankone/errors.hpp"
#include "rankone/normal.hpp"
#include "rankone/words.hpp"

using namespace rankone;

namespace {

TowerSequence geometric_with_columns(std::size_t p) {
    GeometricRule g;
    g.scale = {{BigInt(1)}};
    g.p_floor = g.p_cap = p;
    g.lift_columns = 3;
    std::size_t lifts = 0;
    for (BigInt h = 1; geometric_max_columns(h, 1) < p; h *= 3) ++lifts;
    BuildOptions opts;
    opts.bit_cap = 8192;
    return build_tower(g, lifts, opts);
}

/// sup |F_emp - Phi| checked at every sample value from both sides.
double brute_ks(const std::vector<double>& xs) {
    double best = 0.0;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) {
        double below = 0, upto = 0;
        for (double y : xs) {
            below += y < x;
            upto += y <= x;
        }
        const double phi = 0.5 * std::erfc(-x / std::sqrt(2.0));
        best = std::max({best, std::fabs(upto / n - phi), std::fabs(phi - below / n)});
    }
    return best;
}

}  // namespace

TEST_CASE("normal helpers") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_two_sided_tail(2.0 * std::numbers::sqrt2) == doctest::Approx(0.004677734981047266).epsilon(1e-12));
}

TEST_CASE("Borel sets") {
    CHECK_THROWS_AS(BorelSet(std::vector<Arc>{}), ValidationError);
    CHECK_THROWS_AS(BorelSet({{0.5, 0.4}}), ValidationError);
    CHECK_THROWS_AS(BorelSet({{0.0, 0.5}, {0.4, 0.6}}), ValidationError);
    CHECK_THROWS_AS(BorelSet({{-0.1, 0.5}}), ValidationError);
    const BorelSet a({{0.5, 0.75}, {0.0, 0.25}});
    CHECK(a.measure() == 0.5);
    CHECK(a.contains_node(0, 8));
    CHECK(a.contains_node(1, 8));
    CHECK_FALSE(a.contains_node(2, 8));
    CHECK(a.contains_node(4, 8));
    CHECK_FALSE(a.contains_node(7, 8));
    CHECK(BorelSet::full().measure() == 1.0);
}

TEST_CASE("KS statistic matches a brute-force evaluation, ties included") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> xs(1 + rng() % 60);
        for (auto& x : xs) x = std::round(g(rng) * 4.0) / 4.0;  // forces ties
        CHECK(ks_statistic(xs).distance == doctest::Approx(brute_ks(xs)).epsilon(1e-15));
    }
    CHECK(ks_statistic({0.0}).distance == 0.5);
    CHECK_THROWS_AS(ks_statistic({}), ValidationError);
}

TEST_CASE("KS report needs enough nodes") {
    const auto t = geometric_with_columns(16);
    const auto m = t.depth();
    const auto s = normalized_sum(t, m, UniformGrid(1024), BorelSet({{0.0, 0.5}}));
    CHECK(s.values.size() == 512);
    CHECK_THROWS_AS(ks_distance(s, m, BorelSet({{0.0, 0.5}})), ValidationError);
    const auto full = normalized_sum(t, m, UniformGrid(1024));
    CHECK(ks_distance(full, m, BorelSet::full()).sample_count == 1024);
}

TEST_CASE("normalized sum is sqrt 2 Re P at the nodes") {
    const auto t = geometric_with_columns(5);
    const auto m = t.depth();
    const auto e = exponents(t.stage(m));
    const auto s = normalized_sum(t, m, UniformGrid(512), BorelSet({{0.25, 0.5}}));
    for (std::size_t i = 0; i < s.nodes.size(); ++i) {
        const auto ref = oracle::poly_at_node(e, 512, s.nodes[i]);
        CHECK(s.values[i] == doctest::Approx(std::sqrt(2.0) * static_cast<double>(ref.real())).epsilon(1e-12));
    }
}

TEST_CASE("ECDF curve") {
    const auto c = ecdf_curve({3.0, 1.0, 2.0, 2.0}, 4);
    REQUIRE(c.size() == 4);
    CHECK(c[0].x == 1.0);
    CHECK(c[0].empirical == 0.25);
    CHECK(c[1].empirical == 0.75);  // tie at 2 counted in full
    CHECK(c[3].empirical == 1.0);
    CHECK(c[3].gaussian == doctest::Approx(normal_cdf(3.0)));
}

TEST_CASE("squares dispersion equals the pair-count value (p + 1) / (2 p^2)") {
    for (std::size_t p : {2u, 3u, 4u, 6u}) {
        const auto t = geometric_with_columns(p);
        const auto& s = t.stage(t.depth());
        const double pairs = oracle::squares_dispersion_by_pairs(exponents(s));
        const double pd = static_cast<double>(p);
        CHECK(pairs == doctest::Approx((pd + 1.0) / (2.0 * pd * pd)).epsilon(1e-15));
        CHECK(squares_dispersion(t, t.depth()).value == doctest::Approx(pairs).epsilon(1e-12));
    }
    // zero-spacer stages share the value: only e_0 = 0 is special
    const auto z = build_tower(ZeroSpacersRule{{{16}}}, 1);
    CHECK(squares_dispersion(z, 1).value == doctest::Approx(17.0 / 512.0).epsilon(1e-12));
    CHECK(squares_dispersion(z, 0).value == doctest::Approx(17.0 / 512.0).epsilon(1e-12));
}

TEST_CASE("tail report") {
    const auto t = geometric_with_columns(64);
    const auto r = tail_lower_bound(t, t.depth(), BorelSet::full(), 2.0, UniformGrid(1 << 14));
    CHECK(r.sample_count == (1u << 14));
    CHECK(r.gaussian_tail == doctest::Approx(std::erfc(2.0)).epsilon(1e-14));
    CHECK(r.k_hat == doctest::Approx(r.empirical_tail));
    CHECK(r.k_limit == doctest::Approx(r.gaussian_tail));
    CHECK_THROWS_AS(tail_lower_bound(t, t.depth(), BorelSet::full(), 1.0, UniformGrid(64)), ValidationError);
}

TEST_CASE("theta expansion matches term-by-term expansion") {
    const auto t = geometric_with_columns(4);
    const auto m = t.depth();
    const auto e = exponents(t.stage(m));
    for (double x : {0.5, 1.0, 2.0, -1.5}) {
        const auto th = theta_product(t, m, x);
        const long double c = x * std::sqrt(2.0L / 4.0L);
        const auto ref = oracle::theta_expansion(e, c);
        CHECK(std::abs(th.constant_term - std::complex<double>(ref.at(0))) < 1e-12);
        REQUIRE(th.coefficients.size() == 13);  // (3^3 - 1) / 2 positive words off position 0
        for (const auto& co : th.coefficients) {
            const auto expect = ref.at(co.word) + ref.at(-co.word);
            CHECK(std::abs(co.rho - std::complex<double>(expect)) < 1e-12);
            CHECK(std::abs(co.rho) == doctest::Approx(co.expansion_modulus).epsilon(1e-12));
            // the envelope exceeds the stated bound by sqrt(1 + c^2) 2^{r/2}
            CHECK(co.expansion_modulus / co.stated_bound ==
                  doctest::Approx(std::sqrt(1.0 + static_cast<double>(c * c)) * std::pow(2.0, co.r / 2.0)));
        }
        CHECK(th.max_off_word < 1e-12);
        CHECK(th.sup_norm <= th.sup_bound + 1e-9);
        CHECK(rho_bound_violations(th) == th.coefficients.size());
    }
    const auto wide = geometric_with_columns(13);
    CHECK_THROWS_AS(theta_product(wide, wide.depth(), 1.0), CapError);
}

TEST_CASE("density check stays within its bound") {
    const auto t = geometric_with_columns(5);
    const auto m = t.depth();
    TrigSeries r;
    r.terms = {{0, {1.0, 0.0}}, {3, {0.25, 0.1}}, {-3, {0.25, -0.1}}, {40, {0.0, 0.5}}};
    for (double x : {0.3, 1.0}) {
        const auto d = density_check(t, m, x, r);
        CHECK(d.difference <= d.bound + 1e-12);
    }
}
