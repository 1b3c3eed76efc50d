#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crnstab/ode.hpp"

using namespace crnstab;

TEST_CASE("vector field values and symmetry") {
    const Vec2 origin = vector_field({0, 0});
    CHECK(origin.x1 == 1.0);
    CHECK(origin.x2 == 1.0);
    const Vec2 one = vector_field({1, 1});
    CHECK(one.x1 == -2.0);
    CHECK(one.x2 == -2.0);

    for (double a : {0.3, 1.7, 4.2}) {
        for (double b : {0.0, 2.5, 5.1}) {
            const Vec2 f = vector_field({a, b});
            const Vec2 g = vector_field({b, a});
            CHECK(f.x1 == g.x2);
            CHECK(f.x2 == g.x1);
        }
    }
}

TEST_CASE("diagonal reduction") {
    CHECK(diagonal_rhs(0.0) == 1.0);
    CHECK(diagonal_rhs(4.0) == 1.0);
    CHECK(diagonal_rhs(1.0) == -2.0);
}

TEST_CASE("equilibria of the diagonal reduction") {
    const auto eqs = equilibria();
    REQUIRE(eqs.size() == 2);  // no roots above 4: f^4 (f-4) + 1 >= 1 there
    CHECK(eqs[0].value == doctest::Approx(0.74446522362579349).epsilon(1e-10));
    CHECK(eqs[0].stable);
    CHECK(eqs[1].value == doctest::Approx(3.9960783936048928).epsilon(1e-10));
    CHECK(!eqs[1].stable);
    // tangential eigenvalue is the 1D derivative; transversal flips sign at 16/3
    CHECK(eqs[0].eig_tangential < 0.0);
    CHECK(eqs[0].eig_transversal < 0.0);
    CHECK(eqs[1].eig_tangential > 0.0);
    CHECK(eqs[1].eig_transversal < 0.0);
}

TEST_CASE("blow-up time quadrature") {
    const auto t5 = blow_up_time(5.0);
    CHECK(t5.value == doctest::Approx(0.0012443565368880774).epsilon(1e-10));
    CHECK(t5.error_bound <= 1e-8);
    const auto t6 = blow_up_time(6.0);
    CHECK(t6.value == doctest::Approx(0.00043335672994223703).epsilon(1e-10));
    CHECK(t6.value < t5.value);
    CHECK(blow_up_time(4.5).value == doctest::Approx(0.0026477725039099402).epsilon(1e-10));

    CHECK_THROWS_AS(blow_up_time(3.9), std::domain_error);
    CHECK_THROWS_AS(blow_up_time(0.5), std::domain_error);
}

TEST_CASE("integration to the stable equilibrium") {
    const auto result = integrate({0.5, 0.5}, 50.0);
    CHECK(result.verdict == OdeVerdict::ConvergedToEquilibrium);
    CHECK(result.final_state.x1 == doctest::Approx(0.74446522362579349).epsilon(1e-6));
    CHECK(result.final_state.x2 == doctest::Approx(0.74446522362579349).epsilon(1e-6));
}

TEST_CASE("diagonal blow-up matches the quadrature oracle") {
    const auto result = integrate({5, 5}, 1.0);
    REQUIRE(result.verdict == OdeVerdict::BlowUp);
    const double oracle = blow_up_time(5.0).value;
    CHECK(std::abs(result.blow_up_time - oracle) <= 0.01 * oracle);
}

TEST_CASE("slightly off-diagonal start does not blow up") {
    const auto result = integrate({5.0, 4.5}, 20.0);
    CHECK(result.verdict == OdeVerdict::ConvergedToEquilibrium);
    CHECK(result.final_state.x1 == doctest::Approx(0.74446522362579349).epsilon(1e-5));
}

TEST_CASE("diagonal invariance and scalar comparison") {
    OdeOptions options;
    options.rtol = 1e-9;
    options.grid = {0.25, 0.5, 1.0};
    const auto result = integrate({3, 3}, 1.0, options);
    REQUIRE(result.path.size() == 3);
    for (const auto& [t, x] : result.path)
        CHECK(std::abs(x.x1 - x.x2) <= 1e-7 * std::max(1.0, std::abs(x.x1)));

    // independent scalar oracle: fixed-step RK4 on the diagonal reduction
    double f = 3.0;
    const double h = 1e-5;
    double t = 0.0;
    std::size_t k = 0;
    while (k < result.path.size()) {
        if (t >= result.path[k].first - h / 2) {
            CHECK(result.path[k].second.x1 == doctest::Approx(f).epsilon(2e-7));
            ++k;
            continue;
        }
        const double k1 = diagonal_rhs(f);
        const double k2 = diagonal_rhs(f + 0.5 * h * k1);
        const double k3 = diagonal_rhs(f + 0.5 * h * k2);
        const double k4 = diagonal_rhs(f + h * k3);
        f += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
    }
}

TEST_CASE("swap equivariance of the flow") {
    OdeOptions options;
    options.grid = {0.05, 0.1, 0.2};
    const auto a = integrate({2.0, 5.0}, 0.2, options);
    const auto b = integrate({5.0, 2.0}, 0.2, options);
    REQUIRE(a.path.size() == b.path.size());
    for (std::size_t i = 0; i < a.path.size(); ++i) {
        CHECK(a.path[i].second.x1 == doctest::Approx(b.path[i].second.x2).epsilon(1e-7));
        CHECK(a.path[i].second.x2 == doctest::Approx(b.path[i].second.x1).epsilon(1e-7));
    }
}

TEST_CASE("accepted steps never leave the quadrant") {
    for (const Vec2 x0 : {Vec2{0, 0}, {0, 3}, {0.01, 2.0}}) {
        const auto result = integrate(x0, 5.0);
        for (const auto& [t, x] : result.path) {
            CHECK(x.x1 >= 0.0);
            CHECK(x.x2 >= 0.0);
        }
    }
}

TEST_CASE("blow-up estimate tightens as rtol decreases") {
    const double oracle = blow_up_time(5.0).value;
    double prev_err = -1.0;
    double first_err = 0.0, last_err = 0.0;
    for (double rtol : {1e-4, 1e-6, 1e-8}) {
        OdeOptions options;
        options.rtol = rtol;
        const auto result = integrate({5, 5}, 1.0, options);
        REQUIRE(result.verdict == OdeVerdict::BlowUp);
        const double err = std::abs(result.blow_up_time - oracle);
        if (prev_err < 0.0)
            first_err = err;
        else
            CHECK(err <= prev_err);
        prev_err = err;
        last_err = err;
    }
    CHECK(first_err >= 4.0 * last_err);  // at least x2 per rtol decade
}

TEST_CASE("option validation") {
    OdeOptions bad;
    bad.rtol = 1e-2;
    CHECK_THROWS_AS(integrate({1, 1}, 1.0, bad), std::invalid_argument);
    bad = OdeOptions{};
    bad.magnitude_cap = 1e3;
    CHECK_THROWS_AS(integrate({1, 1}, 1.0, bad), std::invalid_argument);
    CHECK_THROWS_AS(integrate({-1, 1}, 1.0), std::invalid_argument);
}
