#include "csdm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csdm {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Series expansion of P(a, x), valid for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued-fraction expansion of Q(a, x), valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_q: requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double x, double dof) {
    if (dof <= 0.0) throw std::domain_error("chi2_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * x);
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_sorted(const std::vector<double>& cdf_at_sorted) {
    const auto n = cdf_at_sorted.size();
    if (n == 0) throw std::invalid_argument("ks_test_sorted: empty sample");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max({d, cdf_at_sorted[i] - lo, hi - cdf_at_sorted[i]});
    }
    const double sq = std::sqrt(static_cast<double>(n));
    // Finite-sample correction due to Stephens.
    const double lambda = (sq + 0.12 + 0.11 / sq) * d;
    return {d, kolmogorov_tail(lambda)};
}

KsResult ks_test_normal(std::vector<double> sample, double mu, double stddev) {
    if (stddev <= 0.0) throw std::domain_error("ks_test_normal: stddev must be positive");
    std::sort(sample.begin(), sample.end());
    std::vector<double> cdf(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) cdf[i] = normal_cdf((sample[i] - mu) / stddev);
    return ks_test_sorted(cdf);
}

Chi2Result chi2_test(const std::vector<double>& observed, const std::vector<double>& expected_prob) {
    if (observed.size() != expected_prob.size() || observed.size() < 2)
        throw std::invalid_argument("chi2_test: need >= 2 matching bins");
    const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double exp_count = total * expected_prob[i];
        if (exp_count <= 0.0) throw std::invalid_argument("chi2_test: expected bin mass must be positive");
        const double diff = observed[i] - exp_count;
        stat += diff * diff / exp_count;
    }
    return {stat, chi2_sf(stat, static_cast<double>(observed.size() - 1))};
}

double mean(const Eigen::ArrayXd& v) { return v.mean(); }

double variance(const Eigen::ArrayXd& v) {
    if (v.size() < 2) throw std::invalid_argument("variance: need >= 2 values");
    const double m = v.mean();
    return (v - m).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace csdm
