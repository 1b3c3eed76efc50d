#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace crnstab {

/// Streaming mean/variance (Welford).
struct MeanVar {
    std::uint64_t n = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n);
        m2_ += d * (x - mean_);
    }

    double mean() const { return mean_; }
    double var() const { return n > 1 ? m2_ / static_cast<double>(n - 1) : 0.0; }
    double sd() const { return std::sqrt(var()); }
    double se() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0; }
};

/// Two-sample Kolmogorov-Smirnov statistic (sorts copies internally).
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Asymptotic Kolmogorov survival function Q(lambda) with the usual
/// finite-sample correction; n_eff = n for one sample, nm/(n+m) for two.
double ks_pvalue(double d, double n_eff);

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);

/// One-sample KS statistic against U(0,1).
double ks_uniform(std::vector<double> u);

/// Exact parameter-free test that gaps are iid exponential: conditioned on
/// their sum, the normalized partial sums are uniform order statistics;
/// returns the KS p-value of that comparison. Needs at least 3 gaps.
double exponentiality_pvalue(const std::vector<double>& gaps);

/// Delete-1 jackknife standard error of the sample mean.
double jackknife_se(const std::vector<double>& xs);

}  // namespace crnstab
