#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crnstab/crn.hpp"
#include "crnstab/partition.hpp"

namespace crnstab {

/// c_S = (1+p)^3 / ((1-p)^2 (1+6p)), the slope that makes the side energy
/// coincide with the cone energy on the interface rays.
double c_S(double p);

struct EnergyParams {
    PartitionParams partition;
    double c_s = 0.0;  // kept equal to c_S(partition.p())

    static EnergyParams make(const PartitionParams& params) {
        return {params, c_S(params.p())};
    }
};

/// Piecewise energy at a real point: (x1+x2)^3 / (|x1-x2| v beta sqrt(x1+x2))^2
/// in the cone, c_S (x1 + 6 x2) on the right side, c_S (6 x1 + x2) on the
/// left. energy(0,0) = 0.
double energy(double x1, double x2, const EnergyParams& params);

/// Same energy at a lattice state, with exact region classification.
double energy(LatticeState x, const EnergyParams& params);

/// Cone energy in axial coordinates: r^3 / (|d| v beta sqrt(r))^2, r > 0.
double energy_axial(double r, double d, const EnergyParams& params);

/// Generator of the X chain applied to the global piecewise energy,
/// summed in fixed reaction order. Jump targets may land in a different
/// region; the piecewise definition handles the crossing.
double drift(LatticeState x, const EnergyParams& params);

/// Named scan filters. RightTransport is SideRight u ConeRight u the right
/// interface strip (LeftTransport mirrored).
enum class ScanRegion { All, OutsideInteriorCone, InteriorCone, RightTransport, LeftTransport };

const char* to_string(ScanRegion region);
ScanRegion scan_region_from_string(const std::string& name);

bool scan_region_contains(ScanRegion region, LatticeState x, const PartitionParams& params);

struct DriftViolation {
    LatticeState state;
    double value = 0.0;
};

struct DriftReport {
    std::string region;
    std::int64_t r_lo = 0;
    std::int64_t r_hi = 0;
    double gamma = 1.0;
    EnergyParams params;
    std::int64_t points_scanned = 0;
    std::uint64_t violation_count = 0;
    std::vector<DriftViolation> violations;  // ordered by radius, then x1
    std::int64_t max_violation_radius = -1;  // -1 when no violations
    /// Least r* in the window such that no violation has norm >= r*;
    /// empty when violations reach the top of the window.
    std::optional<std::int64_t> certified_min_radius;
};

/// Scans every lattice state with r_lo <= |x|_1 <= r_hi in the given region
/// and records states where the drift exceeds -gamma. Deterministic output
/// for any worker count. max_recorded caps the stored violation list (the
/// count and max radius always cover the full scan).
DriftReport verify_drift(ScanRegion region, std::int64_t r_lo, std::int64_t r_hi, double gamma,
                         const EnergyParams& params, int jobs = 1,
                         std::size_t max_recorded = 1000000);

/// Same scan with an arbitrary state filter (used by tests and bindings).
DriftReport verify_drift(const std::function<bool(LatticeState)>& filter, std::string label,
                         std::int64_t r_lo, std::int64_t r_hi, double gamma,
                         const EnergyParams& params, int jobs = 1,
                         std::size_t max_recorded = 1000000);

struct InterfaceViolation {
    LatticeState state;
    double cone_value = 0.0;
    double side_value = 0.0;
};

struct InterfaceReport {
    std::int64_t r_lo = 0;
    std::int64_t r_hi = 0;
    EnergyParams params;
    std::int64_t points_scanned = 0;
    std::uint64_t violation_count = 0;
    std::vector<InterfaceViolation> violations;
    std::int64_t max_violation_radius = -1;
    std::optional<std::int64_t> certified_min_radius;
};

/// Checks, on the interface strips (both sides), that the cone energy is
/// below the side energy on the cone side of the ray and above it on the
/// side region. Exact coincidence on the rays is accepted up to 1e-9
/// relative.
InterfaceReport verify_interface_ordering(std::int64_t r_lo, std::int64_t r_hi,
                                          const EnergyParams& params, int jobs = 1,
                                          std::size_t max_recorded = 1000000);

struct CondConstReport {
    double eps0 = 0.0;
    double T = 0.0;
    double c_tau = 0.0;
    double lhs1 = 0.0, rhs1 = 0.0;  // eps0 + (2 + C_tau eta1)/eta1^2 < 1/eta0^2
    double lhs2 = 0.0, rhs2 = 0.0;  // eta1 e^{2T} K0 / (beta^2 sqrt(e^{5T}-1)) < eps0/4
    bool first_holds = false;
    bool second_holds = false;

    bool ok() const { return first_holds && second_holds; }
    double slack1() const { return rhs1 - lhs1; }
    double slack2() const { return rhs2 - lhs2; }
};

/// Evaluates both constant-compatibility inequalities for the cone estimate.
CondConstReport check_cond_const(double eps0, double T, const PartitionParams& params);
CondConstReport check_cond_const(double eps0, double T, const PartitionParams& params,
                                 double c_tau_value);

}  // namespace crnstab
