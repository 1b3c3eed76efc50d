#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crnstab/partition.hpp"
#include "crnstab/rng.hpp"

namespace crnstab {

/// K0 = 2 sqrt(5) / (3 sqrt(2 pi)).
double k0();

/// Upper bound on P(tau_L > s) for the divergent OU process started in
/// [-eta1, eta1]: eta1 K0 / sqrt(e^{5s} - 1), clipped to [0,1].
double hitting_tail_bound(double s, double eta1);

/// C_tau = K0 * int_2^inf du / sqrt(u^{5/2} - 1), by quadrature (cached).
/// E(e^{2 tau_L}) <= 2 + C_tau eta1.
double c_tau();

/// One exact transition of the divergent OU process dL = (5/2) L dt + 3 dB:
/// Gaussian with mean d0 e^{5t/2} and variance (9/5)(e^{5t} - 1).
double ou_transition_sample(double d0, double t, RngStream& rng);

struct OuHittingOptions {
    double d0 = 0.0;
    double eta1 = 5.0;
    std::uint64_t replicas = 10000;
    double dt = 1e-3;
    double max_time = 12.0;
    bool bridge_correction = true;
};

struct OuHittingResult {
    OuHittingOptions options;
    std::vector<double> tau;     ///< hitting times of |L| >= eta1, completed paths only
    std::uint64_t censored = 0;  ///< paths that exhausted max_time
    double exp_moment = 0.0;     ///< mean of e^{2 tau}
    double exp_moment_se = 0.0;  ///< delete-1 jackknife standard error
    bool bias_warning = false;   ///< censored fraction above 0.1%

    /// Empirical P(tau > s).
    double survival(double s) const;
};

/// Simulates L on a dt grid with exact transitions until |L| >= eta1; a
/// Brownian-bridge correction catches crossings between grid points.
OuHittingResult ou_hitting_mc(const OuHittingOptions& options, const RngLayout& rng, int jobs = 1);

struct ScalingOptions {
    std::int64_t N = 10000;
    std::int64_t d_N = 0;       ///< initial axial offset; parity must match N
    double T = 1.0;
    int replicas = 500;
    double eta1 = 5.0;          ///< barrier for the tau_Y comparison
    std::vector<double> checkpoints{0.5};
    double tau_time_cap = 2.5;  ///< horizon for tau_Y detection (>= T)
    double tau_mc_dt = 1e-3;    ///< grid for the OU reference sample
};

struct CheckpointStat {
    double t = 0.0;
    int samples = 0;
    double mean = 0.0;
    double var = 0.0;
    double ou_mean = 0.0;  ///< d0 e^{5t/2} with d0 = d_N / sqrt(N)
    double ou_var = 0.0;   ///< (9/5)(e^{5t} - 1)
};

struct ScalingReport {
    ScalingOptions options;
    double mean_sup_dev = 0.0;  ///< E sup_{t<=T} |R/N - e^t|
    std::vector<CheckpointStat> checkpoints;
    double moment1_mean = 0.0;  ///< sample mean of R(T)/N
    double moment2_mean = 0.0;  ///< sample mean of (R(T)/N)^2
    double moment1_target = 0.0;
    double moment2_target = 0.0;
    std::vector<double> tau_y;  ///< uncensored tau_Y samples
    std::uint64_t tau_censored = 0;
    double tau_ks_distance = -1.0;  ///< two-sample KS vs the OU tau reference
    std::uint64_t total_events = 0;
};

/// Runs Y-chain replicas from the axial initial state (N, d_N) and compares
/// the normalized radius and transversal coordinate with their limits.
ScalingReport scaling_experiment(const ScalingOptions& options, const RngLayout& rng,
                                 int jobs = 1);

struct MonotoneChainResult {
    std::vector<std::int64_t> upper;  ///< embedded path started at d_start
    std::vector<std::int64_t> lower;  ///< coupled path started at 0 (1 if d_start odd)
    std::optional<std::uint64_t> upper_hit;  ///< first i with upper[i] >= eta1 sqrt(N+i)
    std::optional<std::uint64_t> lower_hit;
    double upper_time = 0.0;  ///< hitting times accumulated from shared exponentials
    double lower_time = 0.0;
};

/// Builds the two embedded chains from one shared uniform sequence (with
/// reflection at 0), so the path started higher dominates the other pathwise
/// and their difference keeps the parity of the start difference.
MonotoneChainResult monotone_chain_run(std::int64_t N, std::int64_t d_start, double alpha,
                                       double eta1, std::uint64_t max_steps, RngStream& rng);

}  // namespace crnstab
