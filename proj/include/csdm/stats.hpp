#ifndef CSDM_STATS_HPP
#define CSDM_STATS_HPP

#include <vector>

#include <Eigen/Core>

namespace csdm {

/// Standard normal CDF.
double normal_cdf(double x);

/// Regularized upper incomplete gamma Q(a, x); Q(a, 0) = 1.
double gamma_q(double a, double x);

/// Survival function of the chi-squared distribution with k degrees of freedom.
double chi2_sf(double x, double dof);

/// Kolmogorov distribution tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda);

struct KsResult {
    double statistic;
    double p_value;
};

/// One-sample Kolmogorov-Smirnov test of `sample` against the CDF values
/// `cdf_at_sorted`, which must hold the hypothesized CDF evaluated at the
/// sorted sample points.
KsResult ks_test_sorted(const std::vector<double>& cdf_at_sorted);

/// Convenience: KS test of a sample against N(mean, std^2).
KsResult ks_test_normal(std::vector<double> sample, double mean, double stddev);

struct Chi2Result {
    double statistic;
    double p_value;
};

/// Pearson chi-squared goodness-of-fit test; `expected` are probabilities
/// summing to ~1 over the same bins as `observed` counts.
Chi2Result chi2_test(const std::vector<double>& observed, const std::vector<double>& expected_prob);

double mean(const Eigen::ArrayXd& v);
double variance(const Eigen::ArrayXd& v);  // unbiased

}  // namespace csdm

#endif  // CSDM_STATS_HPP
