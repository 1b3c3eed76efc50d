#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crnstab/rng.hpp"
#include "crnstab/stats.hpp"

using namespace crnstab;

TEST_CASE("mean/variance accumulator") {
    MeanVar mv;
    for (double x : {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0}) mv.add(x);
    CHECK(mv.mean() == doctest::Approx(5.0));
    CHECK(mv.var() == doctest::Approx(32.0 / 7.0));
}

TEST_CASE("ks p-value limits") {
    CHECK(ks_pvalue(0.0, 100) == 1.0);
    CHECK(ks_pvalue(0.9, 100) < 1e-6);
    CHECK(ks_pvalue(0.05, 100) > 0.5);
}

TEST_CASE("two-sample ks on identical distributions") {
    RngStream rng(7, 0);
    std::vector<double> a, b;
    for (int i = 0; i < 3000; ++i) a.push_back(rng.normal());
    for (int i = 0; i < 3000; ++i) b.push_back(rng.normal());
    CHECK(ks_two_sample_pvalue(a, b) > 0.01);

    for (auto& x : b) x += 0.5;
    CHECK(ks_two_sample_pvalue(a, b) < 1e-6);
}

TEST_CASE("uniform ks statistic") {
    std::vector<double> nearly_uniform;
    for (int i = 0; i < 1000; ++i) nearly_uniform.push_back((i + 0.5) / 1000.0);
    CHECK(ks_uniform(nearly_uniform) <= 0.001);

    std::vector<double> squashed;
    for (int i = 0; i < 1000; ++i) squashed.push_back(0.5 * (i + 0.5) / 1000.0);
    CHECK(ks_uniform(squashed) >= 0.45);
}

TEST_CASE("exponentiality test accepts exponential gaps, rejects trends") {
    RngStream rng(99, 0);
    std::vector<double> gaps;
    for (int i = 0; i < 400; ++i) gaps.push_back(rng.exponential(2.0));
    CHECK(exponentiality_pvalue(gaps) > 0.01);

    std::vector<double> ramp;
    for (int i = 1; i <= 60; ++i) ramp.push_back(static_cast<double>(i));
    CHECK(exponentiality_pvalue(ramp) < 0.01);

    CHECK_THROWS_AS(exponentiality_pvalue({1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(exponentiality_pvalue({1.0, -2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("jackknife of the mean equals sd/sqrt(n)") {
    RngStream rng(3, 1);
    std::vector<double> xs;
    MeanVar mv;
    for (int i = 0; i < 200; ++i) {
        xs.push_back(rng.uniform() * 3.0);
        mv.add(xs.back());
    }
    CHECK(jackknife_se(xs) == doctest::Approx(mv.se()).epsilon(1e-10));
}

TEST_CASE("rng streams are reproducible and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true;
    bool any_diff_stream = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && (va == b.next_u64());
        any_diff_stream = any_diff_stream || (va != c.next_u64());
    }
    CHECK(all_equal);
    CHECK(any_diff_stream);
}

TEST_CASE("rng normal moments") {
    RngStream rng(2024, 0);
    MeanVar mv;
    for (int i = 0; i < 200000; ++i) mv.add(rng.normal());
    CHECK(std::abs(mv.mean()) < 3.0 * mv.se());
    CHECK(mv.var() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rng exponential mean") {
    RngStream rng(5, 5);
    MeanVar mv;
    for (int i = 0; i < 200000; ++i) mv.add(rng.exponential(4.0));
    CHECK(mv.mean() == doctest::Approx(0.25).epsilon(0.02));
}
