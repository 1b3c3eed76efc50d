#include "crnstab/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace crnstab {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double d, double n_eff) {
    if (d <= 0.0) return 1.0;
    const double sn = std::sqrt(n_eff);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * lambda * lambda * k * k);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-12) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double d = ks_two_sample(std::move(a), std::move(b));
    return ks_pvalue(d, na * nb / (na + nb));
}

double ks_uniform(std::vector<double> u) {
    if (u.empty()) throw std::invalid_argument("ks_uniform: empty sample");
    std::sort(u.begin(), u.end());
    const double n = static_cast<double>(u.size());
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, u[i] - lo, hi - u[i]});
    }
    return d;
}

double exponentiality_pvalue(const std::vector<double>& gaps) {
    if (gaps.size() < 3) throw std::invalid_argument("exponentiality_pvalue: need at least 3 gaps");
    double total = 0.0;
    for (double g : gaps) {
        if (!(g > 0.0)) throw std::invalid_argument("exponentiality_pvalue: gaps must be positive");
        total += g;
    }
    std::vector<double> u;
    u.reserve(gaps.size() - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        acc += gaps[i];
        u.push_back(acc / total);
    }
    const double d = ks_uniform(std::move(u));
    return ks_pvalue(d, static_cast<double>(gaps.size() - 1));
}

double jackknife_se(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    // leave-one-out means are (sum - x_i)/(n-1); their spread gives the SE
    const double nm1 = static_cast<double>(n - 1);
    double mean_loo = 0.0;
    for (double x : xs) mean_loo += (sum - x) / nm1;
    mean_loo /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : xs) {
        const double loo = (sum - x) / nm1;
        ss += (loo - mean_loo) * (loo - mean_loo);
    }
    return std::sqrt(nm1 / static_cast<double>(n) * ss);
}

}  // namespace crnstab
