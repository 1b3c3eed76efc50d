#include "crnstab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crnstab/numeric.hpp"

namespace crnstab {

const char* to_string(StopKind kind) {
    switch (kind) {
        case StopKind::ExitInteriorCone: return "exit_interior_cone";
        case StopKind::ExitCone: return "exit_cone";
        case StopKind::NormAbove: return "norm_above";
        case StopKind::NormBelow: return "norm_below";
        case StopKind::Time: return "time";
        case StopKind::Events: return "events";
        case StopKind::Tcn: return "tcn";
    }
    return "?";
}

StopKind stop_kind_from_string(const std::string& name) {
    if (name == "exit_interior_cone") return StopKind::ExitInteriorCone;
    if (name == "exit_cone") return StopKind::ExitCone;
    if (name == "norm_above") return StopKind::NormAbove;
    if (name == "norm_below") return StopKind::NormBelow;
    if (name == "time") return StopKind::Time;
    if (name == "events") return StopKind::Events;
    if (name == "tcn") return StopKind::Tcn;
    throw std::invalid_argument("unknown stop kind '" + name + "'");
}

namespace {

bool state_rule_satisfied(const StopRule& rule, LatticeState x, std::uint64_t events,
                          const PartitionParams& params) {
    switch (rule.kind) {
        case StopKind::ExitInteriorCone: {
            const std::int64_t d = x.x1 - x.x2;
            const double d2 = static_cast<double>(d) * static_cast<double>(d);
            return d2 >= rule.value * rule.value * static_cast<double>(x.norm1());
        }
        case StopKind::ExitCone:
            return !in_cone(classify(x, params));
        case StopKind::NormAbove:
            return static_cast<double>(x.norm1()) >= rule.value;
        case StopKind::NormBelow:
            return static_cast<double>(x.norm1()) <= rule.value;
        case StopKind::Events:
            return static_cast<double>(events) >= rule.value;
        case StopKind::Tcn:
            return !in_cone(classify(x, params)) ||
                   static_cast<double>(x.norm1()) < 0.5 * rule.value;
        case StopKind::Time:
            return false;  // handled on the clock, not the state
    }
    return false;
}

}  // namespace

SsaOutcome ssa_run_observed(const ReactionSystem& system, LatticeState x0,
                            const std::vector<StopRule>& stops, const PartitionParams& params,
                            RngStream& rng, const EventObserver& observer) {
    double time_budget = std::numeric_limits<double>::infinity();
    for (const auto& rule : stops)
        if (rule.kind == StopKind::Time) time_budget = std::min(time_budget, rule.value);

    SsaOutcome out;
    LatticeState x = x0;
    KahanAccumulator clock;
    std::uint64_t events = 0;

    const auto first_satisfied = [&](LatticeState state) -> const StopRule* {
        for (const auto& rule : stops)
            if (state_rule_satisfied(rule, state, events, params)) return &rule;
        return nullptr;
    };

    if (const StopRule* hit = first_satisfied(x)) {
        out.final_state = x;
        out.final_time = 0.0;
        out.events = 0;
        out.stop_reason = to_string(hit->kind);
        return out;
    }

    double rates[5];
    const int n = system.count();
    while (true) {
        system.propensities_into(x, {rates, static_cast<std::size_t>(n)});
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += rates[i];

        if (!(total > 0.0)) {
            // frozen state: ride out the time budget if there is one
            if (std::isfinite(time_budget)) {
                out.stop_reason = "time";
                out.final_time = time_budget;
            } else {
                out.stop_reason = "stalled";
                out.final_time = clock.value();
            }
            break;
        }

        const double dt = rng.exponential(total);
        if (clock.value() + dt > time_budget) {
            out.stop_reason = "time";
            out.final_time = time_budget;
            break;
        }
        clock.add(dt);

        const double u = rng.uniform() * total;
        int reaction = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += rates[i];
            if (u <= acc) {
                reaction = i;
                break;
            }
        }
        x.x1 += kJumps[static_cast<std::size_t>(reaction)][0];
        x.x2 += kJumps[static_cast<std::size_t>(reaction)][1];
        ++events;
        if (observer) observer(clock.value(), x, reaction, dt);

        if (const StopRule* hit = first_satisfied(x)) {
            out.stop_reason = to_string(hit->kind);
            out.final_time = clock.value();
            break;
        }
    }

    out.final_state = x;
    out.events = events;
    return out;
}

Trajectory ssa_run(const ReactionSystem& system, LatticeState x0,
                   const std::vector<StopRule>& stops, const PartitionParams& params,
                   RngStream& rng) {
    Trajectory traj;
    traj.initial = x0;
    const auto outcome = ssa_run_observed(
        system, x0, stops, params, rng,
        [&traj](double t, LatticeState x, int reaction, double) {
            traj.events.push_back({t, x, reaction});
        });
    traj.final_state = outcome.final_state;
    traj.final_time = outcome.final_time;
    traj.event_count = outcome.events;
    traj.stop_reason = outcome.stop_reason;
    return traj;
}

CoupledResult coupled_yz_run(LatticeState x0, double T, std::int64_t N,
                             const PartitionParams& params, RngStream& rng, bool record) {
    if (x0.norm1() != N)
        throw std::invalid_argument("coupled_yz_run: |x0|_1 must equal N");
    if (x0.x1 <= 2 || x0.x2 <= 2) throw SmallStateError(x0);
    if (classify(x0, params) != Region::ConeCenter)
        throw std::invalid_argument("coupled_yz_run: x0 must lie in the interior cone");

    CoupledResult out;
    out.y.initial = x0;
    out.z.initial = x0;

    LatticeState y = x0;
    LatticeState z = x0;
    KahanAccumulator clock;

    const auto pair_stopped = [&]() {
        return !in_cone(classify(y, params)) || !in_cone(classify(z, params)) ||
               std::min(y.norm1(), z.norm1()) < static_cast<double>(N) / 2.0;
    };

    // channels in fixed order: common 1, common 2, residual 1, residual 2,
    // z-only 3, 4, 5
    double zr[5];
    ReactionSystem z_sys{ChainKind::Z, {1, 1, 1, 1, 1}};
    while (true) {
        const double y1r = static_cast<double>(y.x1 > 2 && y.x2 >= 1 ? y.x1 - 2 : 0);
        const double y2r = static_cast<double>(y.x2 > 2 && y.x1 >= 1 ? y.x2 - 2 : 0);
        z_sys.propensities_into(z, zr);
        const double common1 = std::min(y1r, zr[0]);
        const double common2 = std::min(y2r, zr[1]);
        const double resid1 = std::abs(y1r - zr[0]);
        const double resid2 = std::abs(y2r - zr[1]);
        const double channels[7] = {common1, common2, resid1, resid2, zr[2], zr[3], zr[4]};
        double total = 0.0;
        for (double c : channels) total += c;
        if (!(total > 0.0)) {
            out.stop_reason = "time";
            out.stop_time = T;
            break;
        }

        const double dt = rng.exponential(total);
        if (clock.value() + dt > T) {
            out.stop_reason = "time";
            out.stop_time = T;
            break;
        }
        clock.add(dt);
        const double u = rng.uniform() * total;
        int channel = 6;
        double acc = 0.0;
        for (int i = 0; i < 7; ++i) {
            acc += channels[i];
            if (u <= acc) {
                channel = i;
                break;
            }
        }

        bool y_moves = false, z_moves = false;
        int reaction = -1;
        switch (channel) {
            case 0: reaction = 0; y_moves = z_moves = true; break;
            case 1: reaction = 1; y_moves = z_moves = true; break;
            case 2: reaction = 0; y_moves = y1r > zr[0]; z_moves = !y_moves; break;
            case 3: reaction = 1; y_moves = y2r > zr[1]; z_moves = !y_moves; break;
            default: reaction = channel - 2; z_moves = true; break;
        }
        const auto& jump = kJumps[static_cast<std::size_t>(reaction)];
        if (y_moves) {
            y.x1 += jump[0];
            y.x2 += jump[1];
            if (record) out.y.events.push_back({clock.value(), y, reaction});
            ++out.y.event_count;
        }
        if (z_moves) {
            z.x1 += jump[0];
            z.x2 += jump[1];
            if (record) out.z.events.push_back({clock.value(), z, reaction});
            ++out.z.event_count;
        }
        ++out.events;

        const double dist = static_cast<double>(std::abs(z.x1 - y.x1) + std::abs(z.x2 - y.x2));
        out.sup_distance = std::max(out.sup_distance, dist);

        if (pair_stopped()) {
            out.stop_reason = "tcn";
            out.stop_time = clock.value();
            break;
        }
    }

    out.y.final_state = y;
    out.z.final_state = z;
    out.y.final_time = out.stop_time;
    out.z.final_time = out.stop_time;
    out.y.stop_reason = out.stop_reason;
    out.z.stop_reason = out.stop_reason;
    return out;
}

TimeChangeMap::TimeChangeMap(const Trajectory& z_trajectory) {
    const auto clock_rate = [](LatticeState x) {
        if (x.x1 <= 2 || x.x2 <= 2) throw SmallStateError(x);
        return 1.0 / (falling_factorial_d(x.x1, 2) * falling_factorial_d(x.x2, 2));
    };

    final_time_ = z_trajectory.final_time;
    s_.reserve(z_trajectory.events.size() + 1);
    rate_.reserve(z_trajectory.events.size() + 1);
    theta_.reserve(z_trajectory.events.size() + 2);

    s_.push_back(0.0);
    rate_.push_back(clock_rate(z_trajectory.initial));
    for (const auto& event : z_trajectory.events) {
        s_.push_back(event.t);
        rate_.push_back(clock_rate(event.state));
    }

    KahanAccumulator acc;
    theta_.push_back(0.0);
    for (std::size_t k = 0; k + 1 < s_.size(); ++k) {
        acc.add(rate_[k] * (s_[k + 1] - s_[k]));
        theta_.push_back(acc.value());
    }
    acc.add(rate_.back() * (final_time_ - s_.back()));
    theta_.push_back(acc.value());
}

double TimeChangeMap::theta(double s) const {
    if (s < 0.0 || s > final_time_)
        throw std::out_of_range("TimeChangeMap::theta: s outside the trajectory horizon");
    const auto it = std::upper_bound(s_.begin(), s_.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - s_.begin()) - 1;
    return theta_[k] + rate_[k] * (s - s_[k]);
}

double TimeChangeMap::lambda(double t) const {
    if (t < 0.0 || t > theta_.back())
        throw std::out_of_range("TimeChangeMap::lambda: t outside the trajectory horizon");
    // theta_ has one entry per interval start plus the horizon
    const auto it = std::upper_bound(theta_.begin(), theta_.end() - 1, t);
    const std::size_t k = static_cast<std::size_t>(it - theta_.begin()) - 1;
    return s_[k] + (t - theta_[k]) / rate_[k];
}

TimeChangeMap time_change_map(const Trajectory& z_trajectory) {
    return TimeChangeMap(z_trajectory);
}

ExcursionScanner::ExcursionScanner(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo < hi)) throw std::invalid_argument("ExcursionScanner: need lo < hi");
}

void ExcursionScanner::feed(double t, double norm) {
    if (!open_) {
        if (norm > hi_) {
            open_ = true;
            current_ = Excursion{};
            current_.start = t;
            current_.peak = norm;
        }
    } else {
        current_.peak = std::max(current_.peak, norm);
        if (norm < lo_) {
            current_.end = t;
            current_.duration = t - current_.start;
            out_.push_back(current_);
            open_ = false;
        }
    }
}

std::vector<Excursion> ExcursionScanner::finish(double t_end) {
    if (open_) {
        current_.end = t_end;
        current_.duration = t_end - current_.start;
        current_.truncated = true;
        out_.push_back(current_);
        open_ = false;
    }
    return std::move(out_);
}

std::vector<Excursion> excursion_scan(const Trajectory& trajectory, double lo, double hi) {
    ExcursionScanner scanner(lo, hi);
    scanner.feed(0.0, static_cast<double>(trajectory.initial.norm1()));
    for (const auto& event : trajectory.events)
        scanner.feed(event.t, static_cast<double>(event.state.norm1()));
    return scanner.finish(trajectory.final_time);
}

}  // namespace crnstab
