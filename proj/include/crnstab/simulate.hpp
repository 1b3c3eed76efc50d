#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "crnstab/crn.hpp"
#include "crnstab/partition.hpp"
#include "crnstab/rng.hpp"

namespace crnstab {

enum class StopKind {
    ExitInteriorCone,  ///< post-jump |d| >= eta sqrt(r)
    ExitCone,          ///< state leaves the cone region
    NormAbove,         ///< |x|_1 >= M
    NormBelow,         ///< |x|_1 <= m
    Time,              ///< clock reaches T (no jump is committed past T)
    Events,            ///< event count reaches K
    Tcn,               ///< leaves the cone or |x|_1 drops below N/2
};

const char* to_string(StopKind kind);
StopKind stop_kind_from_string(const std::string& name);

struct StopRule {
    StopKind kind = StopKind::Time;
    double value = 0.0;
};

struct Event {
    double t = 0.0;
    LatticeState state;
    int reaction = -1;
};

struct Trajectory {
    LatticeState initial;
    std::vector<Event> events;
    LatticeState final_state;
    double final_time = 0.0;
    std::uint64_t event_count = 0;
    std::string stop_reason;
};

struct SsaOutcome {
    LatticeState final_state;
    double final_time = 0.0;
    std::uint64_t events = 0;
    std::string stop_reason;
};

/// Called after each committed jump with the new clock, new state, reaction
/// index and the raw holding time that was added to the clock.
using EventObserver = std::function<void(double t, LatticeState x, int reaction, double dt)>;

/// Exact event-driven simulation (direct method): exponential holding times
/// at the total propensity, next reaction proportional to its rate, clock
/// accumulated with compensated summation. Stops at the first satisfied
/// rule (rules are also checked once on the initial state). Identical
/// inputs produce identical trajectories.
SsaOutcome ssa_run_observed(const ReactionSystem& system, LatticeState x0,
                            const std::vector<StopRule>& stops, const PartitionParams& params,
                            RngStream& rng, const EventObserver& observer);

/// ssa_run_observed with full event recording.
Trajectory ssa_run(const ReactionSystem& system, LatticeState x0,
                   const std::vector<StopRule>& stops, const PartitionParams& params,
                   RngStream& rng);

struct CoupledResult {
    Trajectory y;
    Trajectory z;
    double sup_distance = 0.0;  ///< sup over jump times <= T ^ T_C of |Z - Y|_1
    double stop_time = 0.0;
    std::string stop_reason;    ///< "time" or "tcn"
    std::uint64_t events = 0;   ///< joint-chain events
};

/// Joint simulation of (Y, Z) from the same initial state, driven by shared
/// randomness: for each of the two shared reactions the common part
/// min(rate_Y, rate_Z) moves both chains at once and the residual moves the
/// faster marginal alone; the three extra Z reactions fire solo. Marginals
/// are exact copies of Y and Z. Runs to T or the coupling stopping time
/// (either chain leaves the cone, or either norm drops below N/2).
CoupledResult coupled_yz_run(LatticeState x0, double T, std::int64_t N,
                             const PartitionParams& params, RngStream& rng, bool record = true);

/// The clock theta(s) = int_0^s du / (Z1(u)^(2) Z2(u)^(2)) of a Z trajectory
/// and its inverse lambda. theta(lambda(t)) = t up to roundoff.
class TimeChangeMap {
public:
    explicit TimeChangeMap(const Trajectory& z_trajectory);

    double theta(double s) const;   ///< s in [0, final_time]
    double lambda(double t) const;  ///< t in [0, horizon()]
    double horizon() const { return theta_.back(); }

private:
    std::vector<double> s_;      // interval starts (jump times, leading 0)
    std::vector<double> theta_;  // clock value at each interval start + end
    std::vector<double> rate_;   // clock slope on each interval
    double final_time_ = 0.0;
};

TimeChangeMap time_change_map(const Trajectory& z_trajectory);

struct Excursion {
    double start = 0.0;
    double end = 0.0;
    double peak = 0.0;      ///< max |x|_1 while open
    double duration = 0.0;
    bool truncated = false; ///< still open at the end of the trajectory
};

/// Hysteresis scanner: an excursion opens when the norm crosses above hi and
/// closes when it next falls below lo.
class ExcursionScanner {
public:
    ExcursionScanner(double lo, double hi);

    void feed(double t, double norm);
    /// Closes the stream; an open excursion is emitted with truncated = true.
    std::vector<Excursion> finish(double t_end);

private:
    double lo_;
    double hi_;
    bool open_ = false;
    Excursion current_;
    std::vector<Excursion> out_;
};

std::vector<Excursion> excursion_scan(const Trajectory& trajectory, double lo, double hi);

}  // namespace crnstab
