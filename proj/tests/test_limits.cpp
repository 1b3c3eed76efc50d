#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crnstab/limits.hpp"
#include "crnstab/stats.hpp"

using namespace crnstab;

TEST_CASE("closed-form constants") {
    CHECK(k0() == doctest::Approx(0.59470803871759037).epsilon(1e-14));
    CHECK(k0() * k0() == doctest::Approx(0.35367765131532297).epsilon(1e-13));
    CHECK(c_tau() == doctest::Approx(2.0176674787203179).epsilon(1e-7));
    CHECK(c_tau() > 2.0);
    CHECK(c_tau() < 4.0);
}

TEST_CASE("hitting tail bound") {
    CHECK(hitting_tail_bound(1.0, 60.0) == 1.0);  // raw value ~2.94, clipped
    CHECK(hitting_tail_bound(3.0, 60.0) == doctest::Approx(0.01973542628).epsilon(1e-8));
    double prev = 2.0;
    for (double s : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0}) {
        const double b = hitting_tail_bound(s, 5.0);
        CHECK(b <= prev);
        prev = b;
    }
    CHECK(hitting_tail_bound(2.0, 5.0) < hitting_tail_bound(2.0, 50.0));
    CHECK(hitting_tail_bound(10.0, 5.0) < 1e-9);
    CHECK_THROWS_AS(hitting_tail_bound(0.0, 5.0), std::invalid_argument);
}

TEST_CASE("ou transition moments") {
    RngStream rng(400, 0);
    MeanVar mv;
    for (int i = 0; i < 100000; ++i) mv.add(ou_transition_sample(1.0, 0.5, rng));
    CHECK(std::abs(mv.mean() - 3.4903429574618414) <= 3.0 * mv.se());
    CHECK(mv.var() == doctest::Approx(20.128489129266252).epsilon(0.05));

    RngStream rng2(400, 1);
    CHECK(ou_transition_sample(0.7, 0.0, rng2) == 0.7);  // degenerate limit
}

TEST_CASE("ou transition composition") {
    const int n = 10000;
    std::vector<double> composed, direct;
    RngStream rng(500, 0);
    for (int i = 0; i < n; ++i) {
        const double mid = ou_transition_sample(0.7, 0.3, rng);
        composed.push_back(ou_transition_sample(mid, 0.4, rng));
        direct.push_back(ou_transition_sample(0.7, 0.7, rng));
    }
    CHECK(ks_two_sample_pvalue(composed, direct) > 0.01);
}

TEST_CASE("ou hitting: start at the barrier leaves immediately") {
    OuHittingOptions options;
    options.d0 = 5.0 * (1.0 - 1e-9);
    options.eta1 = 5.0;
    options.replicas = 200;
    const auto result = ou_hitting_mc(options, RngLayout{31, 0});
    CHECK(result.censored == 0);
    for (double t : result.tau) CHECK(t <= 3.0 * options.dt);
}

TEST_CASE("ou hitting against the tail bound (reduced size)") {
    OuHittingOptions options;
    options.d0 = 0.0;
    options.eta1 = 5.0;
    options.replicas = 2000;
    const auto result = ou_hitting_mc(options, RngLayout{32, 0}, 2);
    CHECK(!result.bias_warning);
    const double n = static_cast<double>(options.replicas);
    for (double s = 0.5; s <= 4.01; s += 0.25) {
        const double empirical = result.survival(s);
        const double se = std::sqrt(std::max(empirical * (1.0 - empirical), 1e-12) / n);
        CHECK(empirical <= hitting_tail_bound(s, options.eta1) + 3.0 * se);
    }
    const double bound = 2.0 + c_tau() * options.eta1;
    CHECK(result.exp_moment <= bound + 3.0 * result.exp_moment_se);
    CHECK(result.exp_moment > 1.0);

    // finite-variance version: censor tau at 4, the bound must still hold
    std::vector<double> censored_moment;
    for (double t : result.tau) censored_moment.push_back(std::exp(2.0 * std::min(t, 4.0)));
    MeanVar cm;
    for (double m : censored_moment) cm.add(m);
    CHECK(cm.mean() <= bound + 3.0 * jackknife_se(censored_moment));
}

TEST_CASE("ou hitting rejects bad arguments") {
    OuHittingOptions options;
    options.d0 = 6.0;
    options.eta1 = 5.0;
    CHECK_THROWS_AS(ou_hitting_mc(options, RngLayout{1, 0}), std::invalid_argument);
    options.d0 = 0.0;
    options.dt = 0.01;
    CHECK_THROWS_AS(ou_hitting_mc(options, RngLayout{1, 0}), std::invalid_argument);
}

TEST_CASE("scaling experiment at a reduced size") {
    ScalingOptions options;
    options.N = 1000;
    options.d_N = 0;
    options.T = 0.5;
    options.replicas = 100;
    options.eta1 = 4.0;
    options.checkpoints = {0.25, 0.5};
    options.tau_time_cap = 2.0;
    const auto report = scaling_experiment(options, RngLayout{64, 0}, 2);

    CHECK(report.mean_sup_dev < 0.15);
    CHECK(report.moment1_mean == doctest::Approx(std::exp(0.5)).epsilon(0.05));
    CHECK(report.moment2_mean == doctest::Approx(std::exp(1.0)).epsilon(0.10));
    REQUIRE(report.checkpoints.size() == 2);
    for (const auto& c : report.checkpoints) {
        CHECK(c.samples == options.replicas);
        CHECK(std::abs(c.mean) < 4.0 * std::sqrt(c.ou_var / options.replicas));
        CHECK(c.var == doctest::Approx(c.ou_var).epsilon(0.5));  // loose at this size
        CHECK(c.ou_mean == 0.0);
    }
    CHECK(report.tau_y.size() + report.tau_censored ==
          static_cast<std::uint64_t>(options.replicas));
    // tau_Y at eta1=4 typically resolves within the cap at this scale
    CHECK(report.tau_y.size() > 50);
    CHECK(report.tau_ks_distance >= 0.0);
    CHECK(report.tau_ks_distance < 0.2);
}

TEST_CASE("scaling deviations shrink as N grows") {
    ScalingOptions options;
    options.d_N = 0;
    options.T = 0.5;
    options.replicas = 200;
    options.checkpoints = {0.5};
    options.tau_time_cap = 0.5;
    options.eta1 = 60.0;  // tau plays no role here
    options.N = 1000;
    const auto small = scaling_experiment(options, RngLayout{21, 0}, 2);
    options.N = 10000;
    const auto large = scaling_experiment(options, RngLayout{21, 0}, 2);
    CHECK(large.mean_sup_dev < small.mean_sup_dev);
}

TEST_CASE("scaling experiment rejects bad inputs") {
    ScalingOptions options;
    options.N = 1001;
    options.d_N = 0;  // parity mismatch
    CHECK_THROWS_AS(scaling_experiment(options, RngLayout{1, 0}), std::domain_error);
    options = ScalingOptions{};
    options.checkpoints = {2.0};  // past T
    CHECK_THROWS_AS(scaling_experiment(options, RngLayout{1, 0}), std::invalid_argument);
}

TEST_CASE("monotone coupling: pathwise dominance, parity, earlier exit") {
    // the hitting index has a polynomial tail in the step count, so a fixed
    // budget censors a small fraction of paths; the ordering statements stay
    // exact under censoring (dominance implies V_upper <= V_lower)
    int both_hit = 0;
    for (int seed = 0; seed < 200; ++seed) {
        RngStream rng(777, static_cast<std::uint64_t>(seed));
        const auto result = monotone_chain_run(50, 6, 1.0, 2.0, 1000000, rng);
        REQUIRE(result.upper.size() == result.lower.size());
        for (std::size_t i = 0; i < result.upper.size(); ++i) {
            CHECK(result.upper[i] >= result.lower[i]);
            CHECK((result.upper[i] - result.lower[i]) % 2 == 0);
        }
        if (result.lower_hit) REQUIRE(result.upper_hit.has_value());
        if (result.upper_hit && result.lower_hit) {
            ++both_hit;
            CHECK(*result.upper_hit <= *result.lower_hit);
            CHECK(result.upper_time <= result.lower_time);
        }
    }
    CHECK(both_hit >= 190);
}

TEST_CASE("monotone coupling: odd starts compare against 1") {
    RngStream rng(778, 0);
    const auto result = monotone_chain_run(50, 7, 1.0, 2.0, 100000, rng);
    CHECK(result.lower[0] == 1);
    for (std::size_t i = 0; i < result.upper.size(); ++i) {
        CHECK(result.upper[i] >= result.lower[i]);
        CHECK((result.upper[i] - result.lower[i]) % 2 == 0);
    }
}

TEST_CASE("monotone coupling: survival curves are stochastically ordered") {
    std::vector<double> tau_upper, tau_lower;
    int censored = 0;
    for (int seed = 0; seed < 1000; ++seed) {
        RngStream rng(991, static_cast<std::uint64_t>(seed));
        const auto result = monotone_chain_run(100, 8, 1.0, 2.0, 1000000, rng);
        if (!result.upper_hit || !result.lower_hit) {
            ++censored;
            continue;
        }
        tau_upper.push_back(result.upper_time);
        tau_lower.push_back(result.lower_time);
        CHECK(result.upper_time <= result.lower_time);  // pathwise, no MC slack
    }
    CHECK(censored <= 20);
    // P(tau > t | start 8) <= P(tau > t | start 0): sorted-sample dominance
    std::sort(tau_upper.begin(), tau_upper.end());
    std::sort(tau_lower.begin(), tau_lower.end());
    for (std::size_t i = 0; i < tau_upper.size(); ++i)
        CHECK(tau_upper[i] <= tau_lower[i]);
}
