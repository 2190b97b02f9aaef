#ifndef CSDM_COVARIANCE_HPP
#define CSDM_COVARIANCE_HPP

#include <Eigen/Core>

namespace csdm {

/// Diagonal covariance, stored as its length-d vector of diagonal entries.
/// All noise covariances in this library are diagonal by construction, so
/// matrix products, inverses and square roots are entrywise operations.
using DiagCov = Eigen::ArrayXd;

enum class EmbeddingKind { Constant, AffineInY, SinusoidalInY };

/// Deterministic parametric stand-in for a learned label-to-covariance
/// embedding. Evaluates to a non-negative per-dimension vector h(y):
///   Constant:      h_i = a_i
///   AffineInY:     h_i = a_i + b_i * y
///   SinusoidalInY: h_i = a_i + b_i * (1 + sin(w_i * y)) / 2
/// Parameter arrays may have size d (per dimension), size 1 (broadcast), or
/// size 0 (all zeros).
struct EmbeddingSpec {
    EmbeddingKind kind = EmbeddingKind::Constant;
    Eigen::ArrayXd offset;     // a_i >= 0
    Eigen::ArrayXd slope;      // b_i
    Eigen::ArrayXd frequency;  // w_i
};

struct CovParams {
    double lambda_y = 0.0;    // condition-strength weight, >= 0
    double sigma_data = 0.5;  // scalar data standard deviation, > 0
    EmbeddingSpec embedding;
};

/// Evaluates the label embedding h(y). Throws std::invalid_argument if the
/// spec is malformed or produces a negative entry.
Eigen::ArrayXd embed_label(double y, const EmbeddingSpec& spec, Eigen::Index dim);

/// Checks that the spec stays non-negative over [label_min, label_max].
/// For the affine kind the extrema are at the interval endpoints; the
/// sinusoidal kind is bounded by its parameters.
void validate_embedding(const EmbeddingSpec& spec, Eigen::Index dim, double label_min,
                        double label_max);

/// Elementwise squashing h -> exp(-h), mapping [0, inf) into (0, 1].
template <typename Derived>
auto squash_embedding(const Eigen::ArrayBase<Derived>& h) {
    return (-h).exp();
}

/// Evaluates exp(-h(y)), the squashed embedding entering every covariance.
Eigen::ArrayXd squashed_embedding(double y, const CovParams& p, Eigen::Index dim);

/// Diagonal of Sigma(sigma, y): entries sigma^2 + lambda_y * h~_i * sigma.
/// Requires sigma > 0.
DiagCov noise_cov(double sigma, const Eigen::ArrayXd& h_tilde, double lambda_y);
DiagCov noise_cov(double sigma, double y, const CovParams& p, Eigen::Index dim);

/// Diagonal of dSigma/dt: entries 2*sigma_dot*sigma + lambda_y * h~_i * sigma_dot.
/// Accepts sigma = 0 (the formula is defined there); negative sigma is rejected.
DiagCov noise_cov_dot(double sigma, double sigma_dot, const Eigen::ArrayXd& h_tilde,
                      double lambda_y);
DiagCov noise_cov_dot(double sigma, double sigma_dot, double y, const CovParams& p,
                      Eigen::Index dim);

/// Diagonal diffusion coefficient G = sqrt(dSigma/dt), entrywise.
/// Throws std::domain_error on a negative radicand (invalid sigma_dot sign).
DiagCov diffusion_coeff(double sigma, double sigma_dot, const Eigen::ArrayXd& h_tilde,
                        double lambda_y);
DiagCov diffusion_coeff(double sigma, double sigma_dot, double y, const CovParams& p,
                        Eigen::Index dim);

/// Entrywise square root of a diagonal covariance; rejects negative entries.
DiagCov cov_sqrt(const DiagCov& s);

/// Entrywise inverse; rejects entries below 1e-300 (the zero-noise boundary
/// Sigma(0, y) = 0 must never be inverted).
DiagCov cov_inverse(const DiagCov& s);

}  // namespace csdm

#endif  // CSDM_COVARIANCE_HPP
