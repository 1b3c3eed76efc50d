#include "crnstab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crnstab/numeric.hpp"

namespace crnstab {

Vec2 vector_field(Vec2 x) {
    const double a = x.x1, b = x.x2;
    const double a2 = a * a, b2 = b * b;
    // shared monomials keep the swap symmetry exact in floating point
    const double m32 = (a2 * b2) * a;  // x1^3 x2^2
    const double m23 = (a2 * b2) * b;  // x1^2 x2^3
    return {2.0 * m32 - m23 - 4.0 * (a2 * a2) + 1.0,
            2.0 * m23 - m32 - 4.0 * (b2 * b2) + 1.0};
}

double diagonal_rhs(double f) {
    const double f4 = f * f * f * f;
    return f4 * (f - 4.0) + 1.0;
}

const char* to_string(OdeVerdict v) {
    switch (v) {
        case OdeVerdict::ConvergedToEquilibrium: return "converged-to-equilibrium";
        case OdeVerdict::BlowUp: return "blow-up";
        case OdeVerdict::HorizonReached: return "horizon-reached";
    }
    return "?";
}

std::vector<Equilibrium> equilibria() {
    std::vector<Equilibrium> out;
    // scan for sign changes; the rhs is f^4 (f-4) + 1, no roots past 4
    const double hi = 4.5;
    const double step = 1e-3;
    double prev_f = 0.0;
    double prev_v = diagonal_rhs(0.0);
    for (double f = step; f <= hi + 0.5 * step; f += step) {
        const double v = diagonal_rhs(f);
        if ((prev_v <= 0.0) != (v <= 0.0)) {
            const double root = bisect(diagonal_rhs, prev_f, f, 1e-13);
            const double f3 = root * root * root;
            Equilibrium eq;
            eq.value = root;
            eq.eig_tangential = f3 * (5.0 * root - 16.0);
            eq.eig_transversal = f3 * (3.0 * root - 16.0);
            eq.stable = eq.eig_tangential < 0.0;
            out.push_back(eq);
        }
        prev_f = f;
        prev_v = v;
    }
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

inline Vec2 axpy(Vec2 y, double a, Vec2 x) { return {y.x1 + a * x.x1, y.x2 + a * x.x2}; }

// Once the state has exploded, the time left to infinity follows the
// diagonal asymptotics: int_m^inf df / (f^5 - 4 f^4 + 1) = 1/(4 m^4) +
// (4/5) m^-5 + O(m^-6).
void finish_blow_up(OdeResult& result, double t, Vec2 y, double h_last, double rtol) {
    const double m = std::max(std::abs(y.x1), std::abs(y.x2));
    const double m4 = m * m * m * m;
    const double remaining = 1.0 / (4.0 * m4) + 0.8 / (m4 * m);
    result.verdict = OdeVerdict::BlowUp;
    result.blow_up_time = t + remaining;
    result.blow_up_error = remaining * (8.0 / m) + rtol * t + h_last;
    result.final_time = t;
    result.final_state = y;
}

}  // namespace

OdeResult integrate(Vec2 x0, double T, const OdeOptions& options) {
    if (!(options.rtol > 1e-12) || !(options.rtol < 1e-3))
        throw std::invalid_argument("integrate: rtol must lie in (1e-12, 1e-3)");
    if (!(options.magnitude_cap >= 1e6))
        throw std::invalid_argument("integrate: magnitude_cap must be >= 1e6");
    if (!(x0.x1 >= 0.0) || !(x0.x2 >= 0.0))
        throw std::invalid_argument("integrate: x0 must be in the nonnegative quadrant");

    OdeResult result;
    std::vector<double> grid = options.grid;
    std::sort(grid.begin(), grid.end());
    std::size_t next_grid = 0;
    const bool record_steps = grid.empty();

    Vec2 y = x0;
    double t = 0.0;
    Vec2 k1 = vector_field(y);
    double h = 1e-6;
    if (record_steps) result.path.push_back({t, y});
    while (next_grid < grid.size() && grid[next_grid] <= 0.0) {
        result.path.push_back({t, y});
        ++next_grid;
    }

    const auto err_norm = [&](Vec2 ynew, Vec2 e) {
        const double s1 = options.atol + options.rtol * std::max(std::abs(y.x1), std::abs(ynew.x1));
        const double s2 = options.atol + options.rtol * std::max(std::abs(y.x2), std::abs(ynew.x2));
        const double r1 = e.x1 / s1, r2 = e.x2 / s2;
        return std::sqrt(0.5 * (r1 * r1 + r2 * r2));
    };

    while (t < T) {
        const double floor = 1e-14 * std::max(std::abs(t), 1.0);
        double h_target = std::min(h, T - t);
        if (next_grid < grid.size() && t + h_target > grid[next_grid])
            h_target = grid[next_grid] - t;
        h_target = std::max(h_target, 1e-300);

        const Vec2 k2 = vector_field(axpy(y, h_target * kA21, k1));
        Vec2 tmp = axpy(axpy(y, h_target * kA31, k1), h_target * kA32, k2);
        const Vec2 k3 = vector_field(tmp);
        tmp = axpy(axpy(axpy(y, h_target * kA41, k1), h_target * kA42, k2), h_target * kA43, k3);
        const Vec2 k4 = vector_field(tmp);
        tmp = axpy(axpy(axpy(axpy(y, h_target * kA51, k1), h_target * kA52, k2), h_target * kA53, k3),
                   h_target * kA54, k4);
        const Vec2 k5 = vector_field(tmp);
        tmp = axpy(axpy(axpy(axpy(axpy(y, h_target * kA61, k1), h_target * kA62, k2),
                             h_target * kA63, k3),
                        h_target * kA64, k4),
                   h_target * kA65, k5);
        const Vec2 k6 = vector_field(tmp);
        Vec2 ynew = y;
        ynew = axpy(ynew, h_target * kB1, k1);
        ynew = axpy(ynew, h_target * kB3, k3);
        ynew = axpy(ynew, h_target * kB4, k4);
        ynew = axpy(ynew, h_target * kB5, k5);
        ynew = axpy(ynew, h_target * kB6, k6);
        const Vec2 k7 = vector_field(ynew);
        Vec2 e{0.0, 0.0};
        e = axpy(e, h_target * kE1, k1);
        e = axpy(e, h_target * kE3, k3);
        e = axpy(e, h_target * kE4, k4);
        e = axpy(e, h_target * kE5, k5);
        e = axpy(e, h_target * kE6, k6);
        e = axpy(e, h_target * kE7, k7);

        double err = err_norm(ynew, e);
        const bool leaves_quadrant = ynew.x1 < 0.0 || ynew.x2 < 0.0 || !std::isfinite(ynew.x1) ||
                                     !std::isfinite(ynew.x2);
        if (leaves_quadrant) err = std::max(err, 10.0);

        if (err <= 1.0) {
            t += h_target;
            y = ynew;
            k1 = k7;
            ++result.steps_accepted;

            while (next_grid < grid.size() && grid[next_grid] <= t + 1e-15 * std::max(1.0, t)) {
                result.path.push_back({grid[next_grid], y});
                ++next_grid;
            }
            if (record_steps && result.path.size() < 2000000) result.path.push_back({t, y});

            const double mag = std::max(std::abs(y.x1), std::abs(y.x2));
            if (mag > options.magnitude_cap) {
                finish_blow_up(result, t, y, h_target, options.rtol);
                return result;
            }
        } else {
            ++result.steps_rejected;
        }

        const double scale = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = h_target * std::clamp(scale, 0.2, 5.0);
        if (h < floor) {
            // Near the singularity the remaining time shrinks below the
            // resolution of the clock long before any large cap is crossed;
            // a floored step with an exploded state is the blow-up signature.
            const double mag = std::max(std::abs(y.x1), std::abs(y.x2));
            if (mag > 1e3) {
                finish_blow_up(result, t, y, h, options.rtol);
                return result;
            }
            throw std::runtime_error("integrate: step size underflow away from blow-up (stiffness)");
        }
    }

    result.final_time = t;
    result.final_state = y;
    const Vec2 f = vector_field(y);
    const double f_scale = std::max({1.0, std::abs(y.x1), std::abs(y.x2)});
    // the state settles within O(rtol) of an equilibrium, where |f| ~ |J| rtol
    const double quiet = std::max(100.0 * options.rtol, 1e-10);
    if (std::max(std::abs(f.x1), std::abs(f.x2)) < quiet * f_scale)
        result.verdict = OdeVerdict::ConvergedToEquilibrium;
    else
        result.verdict = OdeVerdict::HorizonReached;
    return result;
}

BlowUpTime blow_up_time(double f0) {
    static const double unstable_root = [] {
        for (const auto& eq : equilibria())
            if (!eq.stable) return eq.value;
        return 4.0;
    }();
    if (!(f0 > unstable_root))
        throw std::domain_error("blow_up_time: f0 must lie above the unstable root ~" +
                                std::to_string(unstable_root));
    // substitute f = f0 / v to map [f0, inf) to (0, 1]; the integrand then
    // vanishes like v^3 at v = 0
    const auto g = [f0](double v) {
        if (v <= 0.0) return 0.0;
        const double f = f0 / v;
        return (f0 / (v * v)) / diagonal_rhs(f);
    };
    BlowUpTime out;
    out.value = adaptive_simpson(g, 0.0, 1.0, 1e-10);
    out.error_bound = 1e-8;
    return out;
}

}  // namespace crnstab
