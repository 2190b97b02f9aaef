#ifndef CSDM_TESTS_ORACLES_HPP
#define CSDM_TESTS_ORACLES_HPP

// Reference implementations used only by tests. Everything here is written
// directly from first principles (scalar recurrences, plain-domain densities,
// finite differences) so it exercises none of the library code paths it is
// used to check.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Core>

namespace oracles {

/// Scalar second-order sampler: slope (x - D(x, sigma)) / sigma, Euler
/// predictor plus trapezoidal corrector, corrector skipped at t = 0.
/// Appends the state after every step to `states` when given.
inline Eigen::VectorXd scalar_heun(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& denoise,
    Eigen::VectorXd x, const std::vector<double>& grid,
    std::vector<Eigen::VectorXd>* states = nullptr) {
    for (std::size_t i = grid.size() - 1; i > 0; --i) {
        const double t = grid[i];
        const double t_next = grid[i - 1];
        const Eigen::VectorXd d = (x - denoise(x, t)) / t;
        Eigen::VectorXd x_next = x + (t_next - t) * d;
        if (t_next != 0.0) {
            const Eigen::VectorXd d2 = (x_next - denoise(x_next, t_next)) / t_next;
            x_next = x + (t_next - t) * 0.5 * (d + d2);
        }
        x = x_next;
        if (states) states->push_back(x);
    }
    return x;
}

/// Plain-domain log of the weighted Gaussian mixture
/// sum_i w_i N(x; mu_i, diag(sigma)), including the Gaussian normalizer.
inline double log_weighted_mixture(const Eigen::MatrixXd& points,
                                   const std::vector<double>& weights,
                                   const Eigen::VectorXd& x, const Eigen::ArrayXd& sigma) {
    double total = 0.0;
    const double norm =
        std::exp(-0.5 * (2.0 * std::numbers::pi * sigma).log().sum());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const Eigen::ArrayXd diff = (x - points.row(i).transpose()).array();
        total += weights[static_cast<std::size_t>(i)] * norm *
                 std::exp(-0.5 * (diff.square() / sigma).sum());
    }
    return std::log(total);
}

/// Central finite-difference gradient of a scalar field.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        g[k] = (f(xp) - f(xm)) / (2.0 * step);
    }
    return g;
}

/// Direct minimizer of sum_i w_i N(x~; mu_i, sigma) ||D - mu_i||^2 over D:
/// quadratic in D, solved by accumulating plain-domain density weights.
inline Eigen::VectorXd quadratic_argmin(const Eigen::MatrixXd& points,
                                        const std::vector<double>& weights,
                                        const Eigen::VectorXd& x_tilde,
                                        const Eigen::ArrayXd& sigma) {
    double denom = 0.0;
    Eigen::VectorXd numer = Eigen::VectorXd::Zero(points.cols());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const Eigen::ArrayXd diff = (x_tilde - points.row(i).transpose()).array();
        const double dens = weights[static_cast<std::size_t>(i)] *
                            std::exp(-0.5 * (diff.square() / sigma).sum());
        denom += dens;
        numer += dens * points.row(i).transpose();
    }
    return numer / denom;
}

/// Value of the weighted quadratic at a candidate D (for argmin spot checks).
inline double quadratic_value(const Eigen::MatrixXd& points, const std::vector<double>& weights,
                              const Eigen::VectorXd& x_tilde, const Eigen::ArrayXd& sigma,
                              const Eigen::VectorXd& candidate) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const Eigen::ArrayXd diff = (x_tilde - points.row(i).transpose()).array();
        const double dens = weights[static_cast<std::size_t>(i)] *
                            std::exp(-0.5 * (diff.square() / sigma).sum());
        total += dens * (candidate - points.row(i).transpose()).squaredNorm();
    }
    return total;
}

/// Exact terminal state of the probability-flow dynamics for Gaussian data
/// N(mean, s^2 I) under the diagonal covariance family with sigma(t) = t:
/// per dimension, x(t) - m scales by sqrt(V(t)/V(t_from)) with
/// V(t) = s^2 + t^2 + lambda h~ t.
inline Eigen::VectorXd gaussian_flow_solution(const Eigen::VectorXd& x_from, double t_from,
                                              double t_to, const Eigen::VectorXd& mean,
                                              double data_std, const Eigen::ArrayXd& h_tilde,
                                              double lambda_y) {
    const Eigen::ArrayXd v_from =
        data_std * data_std + t_from * t_from + lambda_y * h_tilde * t_from;
    const Eigen::ArrayXd v_to = data_std * data_std + t_to * t_to + lambda_y * h_tilde * t_to;
    return mean + ((v_to / v_from).sqrt() * (x_from - mean).array()).matrix();
}

}  // namespace oracles

#endif  // CSDM_TESTS_ORACLES_HPP
