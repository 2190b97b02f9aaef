#ifndef CSDM_SAMPLER_HPP
#define CSDM_SAMPLER_HPP

#include <vector>

#include <Eigen/Core>

#include "csdm/covariance.hpp"
#include "csdm/denoiser.hpp"
#include "csdm/rng.hpp"

namespace csdm {

struct SamplerConfig {
    int n_steps = 32;          // solver iterations N; grid has N+1 points
    double sigma_min = 0.002;
    double sigma_max = 80.0;
    double rho = 7.0;          // grid warping exponent
    double s_churn = 80.0;
    double s_tmin = 0.05;
    double s_tmax = 50.0;
    double s_noise = 1.003;
    double cfg_gamma = 1.5;    // guidance scale, >= 1; 1 disables guidance
};

void validate(const SamplerConfig& cfg);

/// Time grid 0 = t_0 < t_1 < ... < t_N = sigma_max with
/// t_i = (sigma_max^(1/rho) + (N-i)/(N-1) * (sigma_min^(1/rho) - sigma_max^(1/rho)))^rho
/// for i = 1..N, so t_1 = sigma_min exactly.
std::vector<double> time_grid(const SamplerConfig& cfg);

/// Per-step churn factor gamma_i = min(s_churn/N, sqrt(2)-1) * 1{t in [s_tmin, s_tmax]}.
double churn_gamma(const SamplerConfig& cfg, double t);

/// Guided output D_u + gamma * (D_c - D_u); gamma = 1 returns the
/// conditional output exactly (no unconditional evaluation).
Eigen::VectorXd cfg_denoise(const Denoiser& denoiser, const Eigen::VectorXd& x_tilde, double y,
                            const DiagCov& sigma, double gamma);

struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
};

/// Deterministic probability-flow sampler (Heun's second-order scheme).
/// Starts from x ~ N(0, Sigma(t_N, y)); each step follows the slope
/// (1/2) dSigma/dt * Sigma^{-1} * (x - D) with an Euler predictor and a
/// trapezoidal corrector, the corrector skipped on the final step to t = 0.
Eigen::VectorXd heun_sample(const Denoiser& denoiser, double y, const CovParams& cov,
                            const SamplerConfig& cfg, Rng& rng, Trajectory* trajectory = nullptr);

/// Same solver from a caller-supplied initial state (used to share the
/// initial draw between samplers under comparison).
Eigen::VectorXd heun_sample_from(const Denoiser& denoiser, double y, const CovParams& cov,
                                 const SamplerConfig& cfg, const Eigen::VectorXd& x_init,
                                 Trajectory* trajectory = nullptr);

/// Stochastic sampler: per step, noise is re-injected to raise the level from
/// t_i to t_i * (1 + gamma_i) before the same Heun step. The per-step
/// Gaussian draw happens even when gamma_i = 0 so RNG streams stay aligned
/// between churned and non-churned runs; with s_churn = 0 the output is
/// bit-identical to the deterministic sampler given the same initial state.
Eigen::VectorXd stochastic_sample(const Denoiser& denoiser, double y, const CovParams& cov,
                                  const SamplerConfig& cfg, Rng& rng,
                                  Trajectory* trajectory = nullptr);

Eigen::VectorXd stochastic_sample_from(const Denoiser& denoiser, double y, const CovParams& cov,
                                       const SamplerConfig& cfg, const Eigen::VectorXd& x_init,
                                       Rng& rng, Trajectory* trajectory = nullptr);

/// Euler-Maruyama simulation of the forward noising SDE
/// dX = G(t, y) dB with sigma(t) = t, from x0 over [0, t_end].
Eigen::VectorXd forward_simulate(const Eigen::VectorXd& x0, double y, const CovParams& cov,
                                 double t_end, int n_substeps, Rng& rng);

/// One-shot perturbation x0 + Sigma(sigma, y)^{1/2} eps, eps ~ N(0, I).
Eigen::VectorXd direct_perturb(const Eigen::VectorXd& x0, double y, double sigma,
                               const CovParams& cov, Rng& rng);

/// Deterministic variant with caller-supplied eps.
Eigen::VectorXd direct_perturb_with(const Eigen::VectorXd& x0, double y, double sigma,
                                    const CovParams& cov, const Eigen::VectorXd& eps);

}  // namespace csdm

#endif  // CSDM_SAMPLER_HPP
