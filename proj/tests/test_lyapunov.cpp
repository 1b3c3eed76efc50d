#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crnstab/limits.hpp"
#include "crnstab/lyapunov.hpp"

using namespace crnstab;

namespace {
const EnergyParams kDefaults = EnergyParams::make(PartitionParams{});
}

TEST_CASE("c_S values") {
    CHECK(c_S(1.0 / 30.0) == doctest::Approx(0.98398071079402827).epsilon(1e-13));
    CHECK(c_S(1.0 / 6.0) == doctest::Approx(1.1433333333333333).epsilon(1e-13));
    CHECK(c_S(1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(kDefaults.c_s == c_S(1.0 / 30.0));
}

TEST_CASE("energy examples") {
    CHECK(energy(LatticeState{2, 2}, kDefaults) == 16.0);
    CHECK(energy(LatticeState{0, 0}, kDefaults) == 0.0);
    CHECK(energy(0.0, 0.0, kDefaults) == 0.0);
    CHECK(energy(LatticeState{100, 1}, kDefaults) ==
          doctest::Approx(104.301955344).epsilon(1e-9));
    CHECK(energy(LatticeState{1, 1}, kDefaults) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("energy coincides with the side value on the interface ray") {
    const double p = 1.0 / 30.0;
    for (double x1 : {300.0, 1000.0, 51234.0}) {
        const double x2 = p * x1;
        const double r = x1 + x2;
        const double d = x1 - x2;
        const double v_cone = r * r * r / (d * d);
        const double v_side = kDefaults.c_s * (x1 + 6.0 * x2);
        CHECK(v_cone == doctest::Approx(v_side).epsilon(1e-9));
        // and the piecewise energy is continuous across the ray
        const double above = energy(x1, x2 * (1.0 + 1e-12), kDefaults);
        const double below = energy(x1, x2 * (1.0 - 1e-12), kDefaults);
        CHECK(above == doctest::Approx(below).epsilon(1e-9));
    }
}

TEST_CASE("energy symmetry and growth along rays") {
    for (std::int64_t a = 0; a <= 40; ++a)
        for (std::int64_t b = 0; b <= 40; ++b)
            CHECK(energy(LatticeState{a, b}, kDefaults) ==
                  energy(LatticeState{b, a}, kDefaults));

    for (double k : {0.0, 1.0 / 30.0, 0.5, 1.0, 2.0, 30.0}) {
        double prev = -1.0;
        for (double t : {1e3, 1e4, 1e5, 1e6}) {
            const double v = energy(t, k * t, kDefaults);
            CHECK(v > prev);
            prev = v;
        }
        CHECK(prev > 1e5);  // diverges along every ray
    }
}

TEST_CASE("axial energy agrees with the cone branch") {
    CHECK(energy_axial(4, 0, kDefaults) == 16.0);
    CHECK(energy_axial(100, 50, kDefaults) == 400.0);
    CHECK(energy_axial(100, 5, kDefaults) == 10000.0);
    CHECK(energy_axial(100, -50, kDefaults) == 400.0);

    for (std::int64_t a = 1; a <= 150; ++a) {
        for (std::int64_t b = 1; b <= 150; ++b) {
            const LatticeState x{a, b};
            if (!in_cone(classify(x, kDefaults.partition))) continue;
            const auto ax = to_axial(x);
            CHECK(energy_axial(static_cast<double>(ax.r), static_cast<double>(ax.d), kDefaults) ==
                  doctest::Approx(energy(x, kDefaults)).epsilon(1e-12));
        }
    }
}

TEST_CASE("drift examples") {
    CHECK(drift({0, 0}, kDefaults) == energy(LatticeState{1, 1}, kDefaults));
    const double side = drift({200, 2}, kDefaults);
    CHECK(side < -1.0);
    // value from an independent scan implementation
    CHECK(side == doctest::Approx(-6172312621.411781).epsilon(1e-9));
    CHECK(drift({2, 200}, kDefaults) == doctest::Approx(side).epsilon(1e-12));
    // interior-cone states are not pointwise dissipative
    CHECK(drift({1000, 1000}, kDefaults) > 0.0);
}

TEST_CASE("drift equals the generic generator applied to the energy") {
    const auto V = [&](LatticeState x) { return energy(x, kDefaults); };
    for (const LatticeState x : {LatticeState{0, 0}, {5, 5}, {200, 2}, {37, 101}, {60, 20}}) {
        CHECK(drift(x, kDefaults) == apply_generator(ChainKind::X, V, x));
    }
}

TEST_CASE("drift scan: transport regions certify, interior does not") {
    // outside the interior cone the only violations sit at radii <= 3
    const auto outside = verify_drift(ScanRegion::OutsideInteriorCone, 1, 60, 1.0, kDefaults);
    CHECK(outside.violation_count > 0);
    CHECK(outside.max_violation_radius == 3);
    REQUIRE(outside.certified_min_radius.has_value());
    CHECK(*outside.certified_min_radius == 4);

    const auto interior = verify_drift(ScanRegion::InteriorCone, 30, 60, 1.0, kDefaults);
    CHECK(interior.violation_count > 0);
    CHECK(interior.max_violation_radius == 60);
    CHECK(!interior.certified_min_radius.has_value());

    const auto empty = verify_drift(ScanRegion::All, 50, 49, 1.0, kDefaults);
    CHECK(empty.points_scanned == 0);
    CHECK(empty.violation_count == 0);
    CHECK(!empty.certified_min_radius.has_value());
}

TEST_CASE("drift report soundness and subwindow monotonicity") {
    const auto report = verify_drift(ScanRegion::All, 1, 30, 1.0, kDefaults);
    CHECK(report.violation_count == report.violations.size());
    for (const auto& v : report.violations) {
        CHECK(drift(v.state, kDefaults) == v.value);  // bit-identical re-evaluation
        CHECK(v.value > -report.gamma);
    }

    const auto outside = verify_drift(ScanRegion::OutsideInteriorCone, 4, 80, 1.0, kDefaults);
    REQUIRE(outside.certified_min_radius.has_value());
    const auto sub = verify_drift(ScanRegion::OutsideInteriorCone, 10, 40, 1.0, kDefaults);
    CHECK(sub.violation_count == 0);
}

TEST_CASE("one-sided transport scans certify from the window base") {
    const auto right = verify_drift(ScanRegion::RightTransport, 50, 300, 1.0, kDefaults, 2);
    CHECK(right.violation_count == 0);
    REQUIRE(right.certified_min_radius.has_value());
    CHECK(*right.certified_min_radius == 50);
    const auto left = verify_drift(ScanRegion::LeftTransport, 50, 300, 1.0, kDefaults, 2);
    CHECK(left.violation_count == 0);
    CHECK(left.points_scanned == right.points_scanned);  // mirror regions
}

TEST_CASE("scan results do not depend on the worker count") {
    const auto serial = verify_drift(ScanRegion::All, 1, 40, 1.0, kDefaults, 1);
    const auto parallel = verify_drift(ScanRegion::All, 1, 40, 1.0, kDefaults, 4);
    CHECK(serial.points_scanned == parallel.points_scanned);
    CHECK(serial.violation_count == parallel.violation_count);
    REQUIRE(serial.violations.size() == parallel.violations.size());
    for (std::size_t i = 0; i < serial.violations.size(); ++i) {
        CHECK(serial.violations[i].state == parallel.violations[i].state);
        CHECK(serial.violations[i].value == parallel.violations[i].value);
    }
}

TEST_CASE("interface ordering: violations below ~2238, ordered above") {
    // near the window where the ordering starts to hold at p = 1/30
    const auto low = verify_interface_ordering(2200, 2250, kDefaults, 2);
    CHECK(low.violation_count > 0);
    CHECK(low.max_violation_radius == 2237);
    REQUIRE(low.certified_min_radius.has_value());
    CHECK(*low.certified_min_radius == 2238);

    const auto high = verify_interface_ordering(2238, 2320, kDefaults, 2);
    CHECK(high.violation_count == 0);

    const auto mid = verify_interface_ordering(50, 120, kDefaults);
    CHECK(mid.violation_count > 0);
    CHECK(mid.max_violation_radius == 120);
    CHECK(!mid.certified_min_radius.has_value());
}

TEST_CASE("interface ordering flips without p < 1/29") {
    PartitionParams wide;
    wide.p_num = 1;
    wide.p_den = 20;
    const auto report = verify_interface_ordering(50, 150, EnergyParams::make(wide));
    CHECK(report.violation_count > 0);
    CHECK(report.max_violation_radius == 150);
}

TEST_CASE("exact-ray points coincide to 1e-9 relative") {
    for (std::int64_t k = 2; k <= 60; ++k) {
        const LatticeState x{30 * k, k};
        const double r = static_cast<double>(x.norm1());
        const double d = static_cast<double>(x.x1 - x.x2);
        const double v_cone = r * r * r / (d * d);
        const double v_side = kDefaults.c_s * static_cast<double>(x.x1 + 6 * x.x2);
        CHECK(std::abs(v_cone - v_side) <= 1e-9 * v_cone);
    }
}

TEST_CASE("constant-compatibility inequalities") {
    const PartitionParams params{};  // eta0 = 4, eta1 = 60, beta = 1
    const auto report = check_cond_const(0.01, 25.0, params);
    CHECK(report.first_holds);
    CHECK(report.second_holds);
    CHECK(report.ok());
    CHECK(report.lhs1 == doctest::Approx(0.04418334687).epsilon(1e-6));
    CHECK(report.rhs1 == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(report.lhs2 == doctest::Approx(0.0001329762359).epsilon(1e-6));
    CHECK(report.slack1() > 0.0);
    CHECK(report.slack2() > 0.0);

    PartitionParams tight = params;
    tight.eta1 = tight.eta0;
    const auto fail1 = check_cond_const(0.01, 25.0, tight);
    CHECK(!fail1.first_holds);

    const auto fail2 = check_cond_const(0.01, 1e-6, params);
    CHECK(!fail2.second_holds);

    CHECK_THROWS_AS(check_cond_const(-0.1, 1.0, params), std::invalid_argument);
}
