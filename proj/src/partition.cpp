#include "crnstab/partition.hpp"

#include <cmath>
#include <stdexcept>

namespace crnstab {

void PartitionParams::validate() const {
    if (p_den <= 0 || p_num <= 0)
        throw std::invalid_argument("partition params: p must be positive (p_num, p_den > 0)");
    if (p_num >= p_den)
        throw std::invalid_argument("partition params: p must be < 1");
    if (!(eta0 > 0.0)) throw std::invalid_argument("partition params: eta0 must be > 0");
    if (!(eta1 > 0.0)) throw std::invalid_argument("partition params: eta1 must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("partition params: beta must be > 0");
}

std::vector<std::string> PartitionParams::analysis_condition_gaps() const {
    std::vector<std::string> gaps;
    if (29 * p_num >= p_den)
        gaps.push_back("p = " + std::to_string(p_num) + "/" + std::to_string(p_den) +
                       " is not < 1/29; the side estimates need p < 1/29");
    if (!(eta0 > 3.0)) gaps.push_back("eta0 = " + std::to_string(eta0) + " is not > 3");
    if (!(eta1 > eta0)) gaps.push_back("eta1 = " + std::to_string(eta1) + " is not > eta0");
    return gaps;
}

std::pair<std::int64_t, std::int64_t> rationalize(double v, std::int64_t max_den) {
    if (!(v > 0.0) || !(v < 1.0)) throw std::invalid_argument("rationalize expects v in (0,1)");
    // continued-fraction convergents
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double x = v;
    for (int iter = 0; iter < 64; ++iter) {
        const double fa = std::floor(x);
        const std::int64_t a = static_cast<std::int64_t>(fa);
        if (k1 > 0 && a > max_den) break;  // k2 would overflow the budget anyway
        const std::int64_t h2 = a * h1 + h0;
        const std::int64_t k2 = a * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1; h1 = h2;
        k0 = k1; k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - v) < 1e-15 * v) break;
        const double frac = x - fa;
        if (frac < 1e-15) break;
        x = 1.0 / frac;
    }
    return {h1, k1};
}

AxialCoord to_axial(LatticeState x) { return {x.x1 + x.x2, x.x1 - x.x2}; }

LatticeState from_axial(AxialCoord a) {
    if (a.r < 0 || std::abs(a.d) > a.r)
        throw std::domain_error("from_axial: need |d| <= r, got (r,d)=(" + std::to_string(a.r) +
                                "," + std::to_string(a.d) + ")");
    if (((a.r ^ a.d) & 1) != 0)
        throw std::domain_error("from_axial: r and d must have equal parity, got (r,d)=(" +
                                std::to_string(a.r) + "," + std::to_string(a.d) + ")");
    return {(a.r + a.d) / 2, (a.r - a.d) / 2};
}

const char* to_string(Region r) {
    switch (r) {
        case Region::SideRight: return "side_right";
        case Region::SideLeft: return "side_left";
        case Region::ConeCenter: return "cone_center";
        case Region::ConeRight: return "cone_right";
        case Region::ConeLeft: return "cone_left";
    }
    return "?";
}

Region classify(LatticeState x, const PartitionParams& params) {
    // x2 <= p x1  <=>  x2 p_den <= x1 p_num, exactly
    if (x.x2 * params.p_den <= x.x1 * params.p_num) return Region::SideRight;
    if (x.x1 * params.p_den <= x.x2 * params.p_num) return Region::SideLeft;
    const std::int64_t d = x.x1 - x.x2;
    const double d2 = static_cast<double>(d) * static_cast<double>(d);
    const double bound = params.eta0 * params.eta0 * static_cast<double>(x.norm1());
    if (d2 <= bound) return Region::ConeCenter;
    return d > 0 ? Region::ConeRight : Region::ConeLeft;
}

DeltaSide in_delta(LatticeState x, const PartitionParams& params) {
    // |x2 - p x1| <= 5  <=>  |x2 p_den - x1 p_num| <= 5 p_den
    if (std::abs(x.x2 * params.p_den - x.x1 * params.p_num) <= 5 * params.p_den)
        return DeltaSide::Right;
    if (std::abs(x.x1 * params.p_den - x.x2 * params.p_num) <= 5 * params.p_den)
        return DeltaSide::Left;
    return DeltaSide::None;
}

}  // namespace crnstab
