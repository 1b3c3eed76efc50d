#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crnstab {

struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;
};

/// Deterministic mass-action vector field of the network.
Vec2 vector_field(Vec2 x);

/// Scalar reduction on the diagonal x1 = x2: f' = f^5 - 4 f^4 + 1.
double diagonal_rhs(double f);

struct Equilibrium {
    double value = 0.0;
    bool stable = false;          ///< sign of d/df diagonal_rhs at the root
    double eig_tangential = 0.0;  ///< Jacobian eigenvalue along (1,1): f^3 (5f - 16)
    double eig_transversal = 0.0; ///< Jacobian eigenvalue along (1,-1): f^3 (3f - 16)
};

/// Nonnegative roots of the diagonal reduction, sorted, with stability flags
/// and the 2D Jacobian eigenvalues at (f, f). Bisection to 1e-12.
std::vector<Equilibrium> equilibria();

enum class OdeVerdict { ConvergedToEquilibrium, BlowUp, HorizonReached };

const char* to_string(OdeVerdict v);

struct OdeOptions {
    double rtol = 1e-8;           ///< in (1e-12, 1e-3)
    double atol = 1e-12;
    double magnitude_cap = 1e12;  ///< >= 1e6; blow-up declared past this norm
    std::vector<double> grid;     ///< output times; accepted steps when empty
};

struct OdeResult {
    OdeVerdict verdict = OdeVerdict::HorizonReached;
    double final_time = 0.0;
    Vec2 final_state;
    double blow_up_time = 0.0;   ///< meaningful for verdict == BlowUp
    double blow_up_error = 0.0;  ///< step size + remaining-tail bound
    std::vector<std::pair<double, Vec2>> path;
    std::uint64_t steps_accepted = 0;
    std::uint64_t steps_rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of the field from x0 to time T.
/// Declares blow-up when the max coordinate passes magnitude_cap (the step
/// size is at its floor by then); throws std::runtime_error if the step
/// floor is hit without the cap being exceeded. Accepted steps never leave
/// the nonnegative quadrant.
OdeResult integrate(Vec2 x0, double T, const OdeOptions& options = {});

struct BlowUpTime {
    double value = 0.0;
    double error_bound = 0.0;
};

/// Time to infinity of the diagonal reduction started at f0, by adaptive
/// quadrature of int_{f0}^inf df / (f^5 - 4 f^4 + 1); absolute error <= 1e-8.
/// f0 must lie strictly above the unstable root (the integral diverges at it).
BlowUpTime blow_up_time(double f0);

}  // namespace crnstab
