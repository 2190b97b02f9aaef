#include "csdm/covariance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace csdm {

namespace {

// Broadcast a parameter array to length dim: size d as-is, size 1 repeated,
// size 0 as zeros.
Eigen::ArrayXd broadcast_param(const Eigen::ArrayXd& p, Eigen::Index dim, const char* name) {
    if (p.size() == dim) return p;
    if (p.size() == 1) return Eigen::ArrayXd::Constant(dim, p[0]);
    if (p.size() == 0) return Eigen::ArrayXd::Zero(dim);
    throw std::invalid_argument(std::string("EmbeddingSpec: parameter '") + name +
                                "' must have size 0, 1, or d");
}

}  // namespace

Eigen::ArrayXd embed_label(double y, const EmbeddingSpec& spec, Eigen::Index dim) {
    if (dim < 1) throw std::invalid_argument("embed_label: dim must be >= 1");
    const Eigen::ArrayXd a = broadcast_param(spec.offset, dim, "offset");
    Eigen::ArrayXd h;
    switch (spec.kind) {
        case EmbeddingKind::Constant:
            h = a;
            break;
        case EmbeddingKind::AffineInY: {
            const Eigen::ArrayXd b = broadcast_param(spec.slope, dim, "slope");
            h = a + b * y;
            break;
        }
        case EmbeddingKind::SinusoidalInY: {
            const Eigen::ArrayXd b = broadcast_param(spec.slope, dim, "slope");
            const Eigen::ArrayXd w = broadcast_param(spec.frequency, dim, "frequency");
            h = a + b * 0.5 * (1.0 + (w * y).sin());
            break;
        }
    }
    if ((h < 0.0).any())
        throw std::invalid_argument("embed_label: embedding produced a negative entry");
    return h;
}

void validate_embedding(const EmbeddingSpec& spec, Eigen::Index dim, double label_min,
                        double label_max) {
    if (!(label_min <= label_max))
        throw std::invalid_argument("validate_embedding: empty label range");
    switch (spec.kind) {
        case EmbeddingKind::Constant:
            embed_label(label_min, spec, dim);
            break;
        case EmbeddingKind::AffineInY:
            // Affine in y: extrema at the endpoints.
            embed_label(label_min, spec, dim);
            embed_label(label_max, spec, dim);
            break;
        case EmbeddingKind::SinusoidalInY: {
            const Eigen::ArrayXd b = broadcast_param(spec.slope, dim, "slope");
            if ((b < 0.0).any())
                throw std::invalid_argument(
                    "validate_embedding: sinusoidal slope must be non-negative");
            embed_label(label_min, spec, dim);
            break;
        }
    }
}

Eigen::ArrayXd squashed_embedding(double y, const CovParams& p, Eigen::Index dim) {
    return squash_embedding(embed_label(y, p.embedding, dim));
}

DiagCov noise_cov(double sigma, const Eigen::ArrayXd& h_tilde, double lambda_y) {
    if (!(sigma > 0.0)) throw std::domain_error("noise_cov: sigma must be positive");
    return sigma * sigma + lambda_y * h_tilde * sigma;
}

DiagCov noise_cov(double sigma, double y, const CovParams& p, Eigen::Index dim) {
    return noise_cov(sigma, squashed_embedding(y, p, dim), p.lambda_y);
}

DiagCov noise_cov_dot(double sigma, double sigma_dot, const Eigen::ArrayXd& h_tilde,
                      double lambda_y) {
    if (sigma < 0.0) throw std::domain_error("noise_cov_dot: sigma must be non-negative");
    return 2.0 * sigma_dot * sigma + lambda_y * h_tilde * sigma_dot;
}

DiagCov noise_cov_dot(double sigma, double sigma_dot, double y, const CovParams& p,
                      Eigen::Index dim) {
    return noise_cov_dot(sigma, sigma_dot, squashed_embedding(y, p, dim), p.lambda_y);
}

DiagCov diffusion_coeff(double sigma, double sigma_dot, const Eigen::ArrayXd& h_tilde,
                        double lambda_y) {
    const DiagCov radicand = noise_cov_dot(sigma, sigma_dot, h_tilde, lambda_y);
    if ((radicand < 0.0).any())
        throw std::domain_error("diffusion_coeff: negative radicand (check sigma_dot sign)");
    return radicand.sqrt();
}

DiagCov diffusion_coeff(double sigma, double sigma_dot, double y, const CovParams& p,
                        Eigen::Index dim) {
    return diffusion_coeff(sigma, sigma_dot, squashed_embedding(y, p, dim), p.lambda_y);
}

DiagCov cov_sqrt(const DiagCov& s) {
    if ((s < 0.0).any()) throw std::domain_error("cov_sqrt: negative entry");
    return s.sqrt();
}

DiagCov cov_inverse(const DiagCov& s) {
    if ((s < 1e-300).any())
        throw std::domain_error("cov_inverse: entry below 1e-300 (zero-noise covariance)");
    return s.inverse();
}

}  // namespace csdm
