#include "crnstab/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "crnstab/limits.hpp"

namespace crnstab {

double c_S(double p) {
    const double q = 1.0 + p;
    return q * q * q / ((1.0 - p) * (1.0 - p) * (1.0 + 6.0 * p));
}

namespace {

inline double cone_energy(double r, double d_abs, double beta) {
    const double cap = std::max(d_abs, beta * std::sqrt(r));
    return r * r * r / (cap * cap);
}

}  // namespace

double energy(double x1, double x2, const EnergyParams& params) {
    const double p = params.partition.p();
    if (x2 <= p * x1) return params.c_s * (x1 + 6.0 * x2);
    if (x1 <= p * x2) return params.c_s * (6.0 * x1 + x2);
    const double r = x1 + x2;
    if (r <= 0.0) return 0.0;
    return cone_energy(r, std::abs(x1 - x2), params.partition.beta);
}

double energy(LatticeState x, const EnergyParams& params) {
    switch (classify(x, params.partition)) {
        case Region::SideRight:
            return params.c_s * static_cast<double>(x.x1 + 6 * x.x2);
        case Region::SideLeft:
            return params.c_s * static_cast<double>(6 * x.x1 + x.x2);
        default: {
            const double r = static_cast<double>(x.norm1());
            return cone_energy(r, static_cast<double>(std::abs(x.x1 - x.x2)), params.partition.beta);
        }
    }
}

double energy_axial(double r, double d, const EnergyParams& params) {
    return cone_energy(r, std::abs(d), params.partition.beta);
}

double drift(LatticeState x, const EnergyParams& params) {
    // Same terms and summation order as apply_generator(X, energy, x).
    double rates[5];
    ReactionSystem sys;  // X chain, unit constants
    sys.propensities_into(x, rates);
    const double vx = energy(x, params);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) {
        if (rates[i] <= 0.0) continue;
        const LatticeState target{x.x1 + kJumps[i][0], x.x2 + kJumps[i][1]};
        sum += rates[i] * (energy(target, params) - vx);
    }
    return sum;
}

const char* to_string(ScanRegion region) {
    switch (region) {
        case ScanRegion::All: return "all";
        case ScanRegion::OutsideInteriorCone: return "outside_interior_cone";
        case ScanRegion::InteriorCone: return "interior_cone";
        case ScanRegion::RightTransport: return "right_transport";
        case ScanRegion::LeftTransport: return "left_transport";
    }
    return "?";
}

ScanRegion scan_region_from_string(const std::string& name) {
    if (name == "all") return ScanRegion::All;
    if (name == "outside_interior_cone") return ScanRegion::OutsideInteriorCone;
    if (name == "interior_cone") return ScanRegion::InteriorCone;
    if (name == "right_transport") return ScanRegion::RightTransport;
    if (name == "left_transport") return ScanRegion::LeftTransport;
    throw std::invalid_argument("unknown scan region '" + name + "'");
}

bool scan_region_contains(ScanRegion region, LatticeState x, const PartitionParams& params) {
    switch (region) {
        case ScanRegion::All:
            return true;
        case ScanRegion::OutsideInteriorCone:
            return classify(x, params) != Region::ConeCenter;
        case ScanRegion::InteriorCone:
            return classify(x, params) == Region::ConeCenter;
        case ScanRegion::RightTransport: {
            const Region r = classify(x, params);
            return r == Region::SideRight || r == Region::ConeRight ||
                   in_delta(x, params) == DeltaSide::Right;
        }
        case ScanRegion::LeftTransport: {
            const Region r = classify(x, params);
            return r == Region::SideLeft || r == Region::ConeLeft ||
                   in_delta(x, params) == DeltaSide::Left;
        }
    }
    return false;
}

namespace {

// Split [r_lo, r_hi] into chunks with roughly equal point counts; run the
// worker on each chunk (threaded when jobs > 1) and merge in chunk order so
// the result does not depend on scheduling.
template <typename Chunk, typename Worker>
std::vector<Chunk> run_radius_chunks(std::int64_t r_lo, std::int64_t r_hi, int jobs,
                                     const Worker& worker) {
    std::vector<std::pair<std::int64_t, std::int64_t>> ranges;
    const int n_chunks = std::max(1, jobs);
    if (r_lo <= r_hi) {
        // cumulative points ~ (r+1); pick boundaries by equal area
        const double total = 0.5 * static_cast<double>((r_hi + r_lo + 2)) *
                             static_cast<double>(r_hi - r_lo + 1);
        std::int64_t lo = r_lo;
        double acc = 0.0;
        std::int64_t next_chunk = 1;
        for (std::int64_t r = r_lo; r <= r_hi; ++r) {
            acc += static_cast<double>(r + 1);
            if (acc >= total * static_cast<double>(next_chunk) / n_chunks || r == r_hi) {
                ranges.push_back({lo, r});
                lo = r + 1;
                ++next_chunk;
            }
        }
    }
    std::vector<Chunk> chunks(ranges.size());
    if (jobs <= 1 || ranges.size() <= 1) {
        for (std::size_t i = 0; i < ranges.size(); ++i)
            worker(ranges[i].first, ranges[i].second, chunks[i]);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(ranges.size());
        for (std::size_t i = 0; i < ranges.size(); ++i)
            threads.emplace_back([&, i] { worker(ranges[i].first, ranges[i].second, chunks[i]); });
        for (auto& t : threads) t.join();
    }
    return chunks;
}

struct DriftChunk {
    std::int64_t points = 0;
    std::uint64_t count = 0;
    std::int64_t max_radius = -1;
    std::vector<DriftViolation> violations;
};

}  // namespace

DriftReport verify_drift(const std::function<bool(LatticeState)>& filter, std::string label,
                         std::int64_t r_lo, std::int64_t r_hi, double gamma,
                         const EnergyParams& params, int jobs, std::size_t max_recorded) {
    if (r_lo > r_hi) {
        DriftReport empty;
        empty.region = std::move(label);
        empty.r_lo = r_lo;
        empty.r_hi = r_hi;
        empty.gamma = gamma;
        empty.params = params;
        return empty;
    }

    auto worker = [&](std::int64_t lo, std::int64_t hi, DriftChunk& chunk) {
        for (std::int64_t r = lo; r <= hi; ++r) {
            for (std::int64_t x1 = 0; x1 <= r; ++x1) {
                const LatticeState x{x1, r - x1};
                if (!filter(x)) continue;
                ++chunk.points;
                const double value = drift(x, params);
                if (value > -gamma) {
                    ++chunk.count;
                    chunk.max_radius = r;
                    if (chunk.violations.size() < max_recorded)
                        chunk.violations.push_back({x, value});
                }
            }
        }
    };

    const auto chunks = run_radius_chunks<DriftChunk>(r_lo, r_hi, jobs, worker);

    DriftReport report;
    report.region = std::move(label);
    report.r_lo = r_lo;
    report.r_hi = r_hi;
    report.gamma = gamma;
    report.params = params;
    for (const auto& chunk : chunks) {
        report.points_scanned += chunk.points;
        report.violation_count += chunk.count;
        report.max_violation_radius = std::max(report.max_violation_radius, chunk.max_radius);
        for (const auto& v : chunk.violations) {
            if (report.violations.size() >= max_recorded) break;
            report.violations.push_back(v);
        }
    }
    if (report.violation_count == 0)
        report.certified_min_radius = r_lo;
    else if (report.max_violation_radius < r_hi)
        report.certified_min_radius = report.max_violation_radius + 1;
    return report;
}

DriftReport verify_drift(ScanRegion region, std::int64_t r_lo, std::int64_t r_hi, double gamma,
                         const EnergyParams& params, int jobs, std::size_t max_recorded) {
    const PartitionParams& part = params.partition;
    return verify_drift(
        [region, &part](LatticeState x) { return scan_region_contains(region, x, part); },
        to_string(region), r_lo, r_hi, gamma, params, jobs, max_recorded);
}

namespace {

struct InterfaceChunk {
    std::int64_t points = 0;
    std::uint64_t count = 0;
    std::int64_t max_radius = -1;
    std::vector<InterfaceViolation> violations;
};

}  // namespace

InterfaceReport verify_interface_ordering(std::int64_t r_lo, std::int64_t r_hi,
                                          const EnergyParams& params, int jobs,
                                          std::size_t max_recorded) {
    const PartitionParams& part = params.partition;
    // Ray points have exactly equal cone and side values in exact arithmetic;
    // accept them up to rounding. Genuine violations scale with the distance
    // to the ray and are far above this tolerance.
    constexpr double kRelTol = 1e-9;

    auto worker = [&](std::int64_t lo, std::int64_t hi, InterfaceChunk& chunk) {
        for (std::int64_t r = lo; r <= hi; ++r) {
            for (std::int64_t x1 = 0; x1 <= r; ++x1) {
                const LatticeState x{x1, r - x1};
                const DeltaSide strip = in_delta(x, part);
                if (strip == DeltaSide::None) continue;
                const Region region = classify(x, part);
                const double side_value =
                    strip == DeltaSide::Right
                        ? params.c_s * static_cast<double>(x.x1 + 6 * x.x2)
                        : params.c_s * static_cast<double>(6 * x.x1 + x.x2);
                // skip corner states sitting in the opposite side region
                if ((strip == DeltaSide::Right && region == Region::SideLeft) ||
                    (strip == DeltaSide::Left && region == Region::SideRight))
                    continue;
                ++chunk.points;
                const double rr = static_cast<double>(x.norm1());
                const double cone_value =
                    cone_energy(rr, static_cast<double>(std::abs(x.x1 - x.x2)), part.beta);
                bool bad = false;
                if (in_cone(region))
                    bad = cone_value > side_value * (1.0 + kRelTol);
                else
                    bad = cone_value < side_value * (1.0 - kRelTol);
                if (bad) {
                    ++chunk.count;
                    chunk.max_radius = r;
                    if (chunk.violations.size() < max_recorded)
                        chunk.violations.push_back({x, cone_value, side_value});
                }
            }
        }
    };

    InterfaceReport report;
    report.r_lo = r_lo;
    report.r_hi = r_hi;
    report.params = params;
    if (r_lo > r_hi) return report;

    const auto chunks = run_radius_chunks<InterfaceChunk>(r_lo, r_hi, jobs, worker);
    for (const auto& chunk : chunks) {
        report.points_scanned += chunk.points;
        report.violation_count += chunk.count;
        report.max_violation_radius = std::max(report.max_violation_radius, chunk.max_radius);
        for (const auto& v : chunk.violations) {
            if (report.violations.size() >= max_recorded) break;
            report.violations.push_back(v);
        }
    }
    if (report.violation_count == 0)
        report.certified_min_radius = r_lo;
    else if (report.max_violation_radius < r_hi)
        report.certified_min_radius = report.max_violation_radius + 1;
    return report;
}

CondConstReport check_cond_const(double eps0, double T, const PartitionParams& params) {
    return check_cond_const(eps0, T, params, c_tau());
}

CondConstReport check_cond_const(double eps0, double T, const PartitionParams& params,
                                 double c_tau_value) {
    if (!(eps0 > 0.0) || !(T > 0.0))
        throw std::invalid_argument("check_cond_const: eps0 and T must be positive");
    params.validate();
    CondConstReport report;
    report.eps0 = eps0;
    report.T = T;
    report.c_tau = c_tau_value;
    const double eta0 = params.eta0;
    const double eta1 = params.eta1;
    report.lhs1 = eps0 + (2.0 + c_tau_value * eta1) / (eta1 * eta1);
    report.rhs1 = 1.0 / (eta0 * eta0);
    // e^{2T} / sqrt(e^{5T} - 1) = e^{-T/2} / sqrt(1 - e^{-5T}), stable for
    // both large and small T.
    const double ratio = std::exp(-0.5 * T) / std::sqrt(-std::expm1(-5.0 * T));
    report.lhs2 = eta1 * k0() * ratio / (params.beta * params.beta);
    report.rhs2 = eps0 / 4.0;
    report.first_holds = report.lhs1 < report.rhs1;
    report.second_holds = report.lhs2 < report.rhs2;
    return report;
}

}  // namespace crnstab
