#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crnstab/crn.hpp"

namespace crnstab {

/// Geometry parameters of the state-space partition. The cone aperture p is
/// kept as an exact fraction so region tests on lattice points reduce to
/// integer comparisons; boundary states are never misclassified by rounding.
struct PartitionParams {
    std::int64_t p_num = 1;   ///< aperture p = p_num / p_den
    std::int64_t p_den = 30;
    double eta0 = 4.0;        ///< interior-cone width, |d| <= eta0 sqrt(r)
    double eta1 = 60.0;       ///< exit-cone width used by stopping times
    double beta = 1.0;        ///< energy regularization, cap beta sqrt(r)

    double p() const { return static_cast<double>(p_num) / static_cast<double>(p_den); }

    /// q such that the cone is left when |d| >= q r; q = (1-p)/(1+p).
    double q() const {
        return static_cast<double>(p_den - p_num) / static_cast<double>(p_den + p_num);
    }

    /// Structural validation (0 < p < 1, positive widths, eta1 > 0, beta > 0).
    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;

    /// Conditions the analysis needs on top of the structural ones
    /// (p < 1/29, eta0 > 3, eta1 > eta0). Returns one message per violated
    /// condition; experiments still run, certification is expected to fail.
    std::vector<std::string> analysis_condition_gaps() const;
};

/// Best rational approximation of v with denominator <= max_den
/// (continued fractions). Used when a config supplies p as a plain number.
std::pair<std::int64_t, std::int64_t> rationalize(double v, std::int64_t max_den = 1000000);

/// Axial coordinates (r, d) = (x1 + x2, x1 - x2).
struct AxialCoord {
    std::int64_t r = 0;
    std::int64_t d = 0;
    friend bool operator==(const AxialCoord&, const AxialCoord&) = default;
};

AxialCoord to_axial(LatticeState x);

/// Inverse of to_axial; throws std::domain_error on parity mismatch or |d| > r.
LatticeState from_axial(AxialCoord a);

enum class Region { SideRight, SideLeft, ConeCenter, ConeRight, ConeLeft };

const char* to_string(Region r);
inline bool in_cone(Region r) { return r != Region::SideRight && r != Region::SideLeft; }

/// Which side of the interface strip |x2 - p x1| <= 5 (and its mirror) a
/// state falls in.
enum class DeltaSide { None, Right, Left };

/// Region of x. Side tests are exact integer comparisons; ties at the corner
/// go to SideRight first, then SideLeft, so classification is total.
/// Inside the cone, the subzone comparison is d^2 vs eta0^2 r (no square
/// roots), exact whenever eta0^2 r is exactly representable.
Region classify(LatticeState x, const PartitionParams& params);

DeltaSide in_delta(LatticeState x, const PartitionParams& params);

inline double cone_exit_q(const PartitionParams& params) { return params.q(); }

}  // namespace crnstab
