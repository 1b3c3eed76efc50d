#include "crnstab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "crnstab/numeric.hpp"
#include "crnstab/stats.hpp"

namespace crnstab {

double k0() {
    static const double value = 2.0 * std::sqrt(5.0) / (3.0 * std::sqrt(2.0 * 3.14159265358979323846));
    return value;
}

double hitting_tail_bound(double s, double eta1) {
    if (!(s > 0.0)) throw std::invalid_argument("hitting_tail_bound: s must be > 0");
    if (!(eta1 > 0.0)) throw std::invalid_argument("hitting_tail_bound: eta1 must be > 0");
    const double bound = eta1 * k0() / std::sqrt(std::expm1(5.0 * s));
    return std::clamp(bound, 0.0, 1.0);
}

double c_tau() {
    // K0 int_2^inf du / sqrt(u^{5/2} - 1); u = 2 v^{-4} turns the integral
    // into int_0^1 8 dv / sqrt(2^{5/2} - v^{10}), smooth and bounded.
    static const double value = [] {
        const double integral = adaptive_simpson(
            [](double v) {
                const double v5 = v * v * v * v * v;
                return 8.0 / std::sqrt(std::pow(2.0, 2.5) - v5 * v5);
            },
            0.0, 1.0, 1e-11);
        return k0() * integral;
    }();
    return value;
}

double ou_transition_sample(double d0, double t, RngStream& rng) {
    if (!(t >= 0.0)) throw std::invalid_argument("ou_transition_sample: t must be >= 0");
    const double mean = d0 * std::exp(2.5 * t);
    const double var = 1.8 * std::expm1(5.0 * t);
    return mean + std::sqrt(var) * rng.normal();
}

double OuHittingResult::survival(double s) const {
    std::uint64_t above = censored;  // censored paths exceed max_time >= s
    for (double t : tau)
        if (t > s) ++above;
    const std::uint64_t total = tau.size() + censored;
    return total == 0 ? 0.0 : static_cast<double>(above) / static_cast<double>(total);
}

OuHittingResult ou_hitting_mc(const OuHittingOptions& options, const RngLayout& rng, int jobs) {
    if (!(std::abs(options.d0) < options.eta1))
        throw std::invalid_argument("ou_hitting_mc: need |d0| < eta1");
    if (!(options.dt > 0.0) || options.dt > 1e-3)
        throw std::invalid_argument("ou_hitting_mc: need 0 < dt <= 1e-3");
    if (options.replicas == 0) throw std::invalid_argument("ou_hitting_mc: replicas must be >= 1");

    const double eta = options.eta1;
    const double dt = options.dt;
    const double growth = std::exp(2.5 * dt);
    const double step_sd = std::sqrt(1.8 * std::expm1(5.0 * dt));
    const double bridge_scale = 2.0 / (9.0 * dt);

    std::vector<double> tau(options.replicas, -1.0);  // -1 marks censored

    auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            RngStream stream = rng.at(i);
            double level = options.d0;
            double t = 0.0;
            while (t < options.max_time) {
                const double prev = level;
                level = prev * growth + step_sd * stream.normal();
                t += dt;
                if (std::abs(level) >= eta) {
                    tau[i] = t;
                    break;
                }
                if (options.bridge_correction) {
                    const double p_up = std::exp(-bridge_scale * (eta - prev) * (eta - level));
                    const double p_dn = std::exp(-bridge_scale * (eta + prev) * (eta + level));
                    const double u_up = stream.uniform();
                    const double u_dn = stream.uniform();
                    if (u_up < p_up || u_dn < p_dn) {
                        tau[i] = t;
                        break;
                    }
                }
            }
        }
    };

    const int n_jobs = std::max(1, jobs);
    if (n_jobs == 1) {
        worker(0, options.replicas);
    } else {
        std::vector<std::thread> threads;
        const std::uint64_t chunk = (options.replicas + n_jobs - 1) / n_jobs;
        for (int j = 0; j < n_jobs; ++j) {
            const std::uint64_t lo = static_cast<std::uint64_t>(j) * chunk;
            const std::uint64_t hi = std::min<std::uint64_t>(options.replicas, lo + chunk);
            if (lo < hi) threads.emplace_back(worker, lo, hi);
        }
        for (auto& t : threads) t.join();
    }

    OuHittingResult result;
    result.options = options;
    std::vector<double> moments;
    for (double t : tau) {
        if (t < 0.0) {
            ++result.censored;
        } else {
            result.tau.push_back(t);
            moments.push_back(std::exp(2.0 * t));
        }
    }
    if (!moments.empty()) {
        double sum = 0.0;
        for (double m : moments) sum += m;
        result.exp_moment = sum / static_cast<double>(moments.size());
        result.exp_moment_se = jackknife_se(moments);
    }
    result.bias_warning =
        static_cast<double>(result.censored) > 0.001 * static_cast<double>(options.replicas);
    return result;
}

namespace {

struct YReplicaOutcome {
    double sup_dev = 0.0;
    std::vector<double> checkpoint_l;  // one entry per checkpoint
    double r_at_T = 0.0;
    double tau = -1.0;  // -1 censored
};

YReplicaOutcome run_y_replica(const ScalingOptions& options, RngStream& rng) {
    YReplicaOutcome out;
    out.checkpoint_l.assign(options.checkpoints.size(), 0.0);

    LatticeState y = from_axial({options.N, options.d_N});
    const double n_scale = static_cast<double>(options.N);
    const double T = options.T;
    const double cap = std::max(options.tau_time_cap, T);
    const double eta1 = options.eta1;

    KahanAccumulator clock;
    std::size_t next_ck = 0;
    bool moment_done = false;
    bool tau_done = false;

    // checkpoint at t = 0
    while (next_ck < options.checkpoints.size() && options.checkpoints[next_ck] <= 0.0) {
        out.checkpoint_l[next_ck] =
            static_cast<double>(y.x1 - y.x2) / std::sqrt(static_cast<double>(y.norm1()));
        ++next_ck;
    }

    while (true) {
        const double r1 = static_cast<double>(y.x1 > 2 && y.x2 >= 1 ? y.x1 - 2 : 0);
        const double r2 = static_cast<double>(y.x2 > 2 && y.x1 >= 1 ? y.x2 - 2 : 0);
        const double total = r1 + r2;
        if (!(total > 0.0)) break;  // frozen; unreachable at the scales used

        const double t = clock.value();
        const double dt = rng.exponential(total);
        const double t_next = t + dt;

        if (t < T) {
            // R is constant on [t, t_next); e^t is monotone, so the sup of
            // |R/N - e^t| over the interval is attained at an endpoint
            const double rn = static_cast<double>(y.norm1()) / n_scale;
            out.sup_dev = std::max(out.sup_dev, std::abs(rn - std::exp(t)));
            out.sup_dev = std::max(out.sup_dev, std::abs(rn - std::exp(std::min(t_next, T))));
        }
        while (next_ck < options.checkpoints.size() && options.checkpoints[next_ck] < t_next) {
            out.checkpoint_l[next_ck] =
                static_cast<double>(y.x1 - y.x2) / std::sqrt(static_cast<double>(y.norm1()));
            ++next_ck;
        }
        if (!moment_done && T < t_next) {
            out.r_at_T = static_cast<double>(y.norm1()) / n_scale;
            moment_done = true;
        }
        if (t_next > cap) break;

        clock.add(dt);
        const double u = rng.uniform() * total;
        if (u <= r1) {
            y.x1 += 2;
            y.x2 -= 1;
        } else {
            y.x1 -= 1;
            y.x2 += 2;
        }

        if (!tau_done) {
            const double d = static_cast<double>(y.x1 - y.x2);
            if (d * d >= eta1 * eta1 * static_cast<double>(y.norm1())) {
                out.tau = clock.value();
                tau_done = true;
            }
        }
        if (tau_done && moment_done && next_ck >= options.checkpoints.size() &&
            clock.value() >= T)
            break;
    }
    return out;
}

}  // namespace

ScalingReport scaling_experiment(const ScalingOptions& options, const RngLayout& rng, int jobs) {
    if (options.replicas < 1) throw std::invalid_argument("scaling_experiment: replicas >= 1");
    if (!(options.T > 0.0)) throw std::invalid_argument("scaling_experiment: T must be > 0");
    if (options.tau_time_cap < options.T)
        throw std::invalid_argument("scaling_experiment: tau_time_cap must be >= T");
    for (double c : options.checkpoints)
        if (!(c >= 0.0) || c > options.T)
            throw std::invalid_argument("scaling_experiment: checkpoints must lie in [0, T]");
    from_axial({options.N, options.d_N});  // validates parity and |d| <= r

    ScalingReport report;
    report.options = options;

    std::vector<YReplicaOutcome> outcomes(static_cast<std::size_t>(options.replicas));
    auto worker = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            RngStream stream = rng.at(static_cast<std::uint64_t>(i));
            outcomes[static_cast<std::size_t>(i)] = run_y_replica(options, stream);
        }
    };
    const int n_jobs = std::max(1, jobs);
    if (n_jobs == 1) {
        worker(0, options.replicas);
    } else {
        std::vector<std::thread> threads;
        const int chunk = (options.replicas + n_jobs - 1) / n_jobs;
        for (int j = 0; j < n_jobs; ++j) {
            const int lo = j * chunk;
            const int hi = std::min(options.replicas, lo + chunk);
            if (lo < hi) threads.emplace_back(worker, lo, hi);
        }
        for (auto& t : threads) t.join();
    }

    MeanVar sup_stat;
    MeanVar m1, m2;
    std::vector<MeanVar> ck_stats(options.checkpoints.size());
    for (const auto& o : outcomes) {
        sup_stat.add(o.sup_dev);
        m1.add(o.r_at_T);
        m2.add(o.r_at_T * o.r_at_T);
        for (std::size_t c = 0; c < options.checkpoints.size(); ++c)
            ck_stats[c].add(o.checkpoint_l[c]);
        if (o.tau >= 0.0)
            report.tau_y.push_back(o.tau);
        else
            ++report.tau_censored;
    }
    report.mean_sup_dev = sup_stat.mean();
    report.moment1_mean = m1.mean();
    report.moment2_mean = m2.mean();
    report.moment1_target = std::exp(options.T);
    report.moment2_target = std::exp(2.0 * options.T);

    const double d0 = static_cast<double>(options.d_N) / std::sqrt(static_cast<double>(options.N));
    for (std::size_t c = 0; c < options.checkpoints.size(); ++c) {
        CheckpointStat stat;
        stat.t = options.checkpoints[c];
        stat.samples = static_cast<int>(ck_stats[c].n);
        stat.mean = ck_stats[c].mean();
        stat.var = ck_stats[c].var();
        stat.ou_mean = d0 * std::exp(2.5 * stat.t);
        stat.ou_var = 1.8 * std::expm1(5.0 * stat.t);
        report.checkpoints.push_back(stat);
    }

    // OU reference sample for the tau comparison, on fresh streams
    if (!report.tau_y.empty()) {
        OuHittingOptions ou;
        ou.d0 = d0;
        ou.eta1 = options.eta1;
        ou.replicas = static_cast<std::uint64_t>(options.replicas);
        ou.dt = options.tau_mc_dt;
        ou.max_time = options.tau_time_cap;
        const RngLayout ou_rng{rng.seed, rng.base + static_cast<std::uint64_t>(options.replicas)};
        const auto ou_result = ou_hitting_mc(ou, ou_rng, jobs);
        if (ou_result.tau.size() >= 50 && report.tau_y.size() >= 50)
            report.tau_ks_distance = ks_two_sample(report.tau_y, ou_result.tau);
    }
    return report;
}

MonotoneChainResult monotone_chain_run(std::int64_t N, std::int64_t d_start, double alpha,
                                       double eta1, std::uint64_t max_steps, RngStream& rng) {
    if (N < 1) throw std::invalid_argument("monotone_chain_run: N must be >= 1");
    if (d_start < 0) throw std::invalid_argument("monotone_chain_run: d_start must be >= 0");
    if (!(alpha > 0.0)) throw std::invalid_argument("monotone_chain_run: alpha must be > 0");

    MonotoneChainResult result;
    std::int64_t a = d_start;
    std::int64_t b = (d_start % 2 == 0) ? 0 : 1;

    const auto zeta = [&](std::int64_t x, double r, double u) -> std::int64_t {
        if (x == 0) return 1;  // reflection at the axis
        const double p_up = std::min(1.0, (r + alpha * static_cast<double>(x)) / (2.0 * r));
        return u <= p_up ? 1 : -1;
    };

    for (std::uint64_t i = 0; i <= max_steps; ++i) {
        const double r = static_cast<double>(N) + static_cast<double>(i);
        result.upper.push_back(a);
        result.lower.push_back(b);
        if (!result.upper_hit && static_cast<double>(a) >= eta1 * std::sqrt(r))
            result.upper_hit = i;
        if (!result.lower_hit && static_cast<double>(b) >= eta1 * std::sqrt(r))
            result.lower_hit = i;

        const double u = rng.uniform();
        const double holding = rng.exponential(r);
        if (!result.upper_hit || *result.upper_hit == i) result.upper_time += holding;
        if (!result.lower_hit || *result.lower_hit == i) result.lower_time += holding;
        if (result.upper_hit && result.lower_hit) break;

        a += zeta(a, r, u);
        b += zeta(b, r, u);
    }
    return result;
}

}  // namespace crnstab
