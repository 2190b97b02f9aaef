#include "csdm/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace csdm {

void validate(const SamplerConfig& cfg) {
    if (cfg.n_steps < 2) throw std::invalid_argument("SamplerConfig: n_steps must be >= 2");
    if (!(cfg.sigma_min > 0.0) || !(cfg.sigma_min < cfg.sigma_max))
        throw std::invalid_argument("SamplerConfig: need 0 < sigma_min < sigma_max");
    if (!(cfg.rho > 0.0)) throw std::invalid_argument("SamplerConfig: rho must be positive");
    if (!(cfg.s_noise > 0.0)) throw std::invalid_argument("SamplerConfig: s_noise must be positive");
    if (cfg.s_churn < 0.0) throw std::invalid_argument("SamplerConfig: s_churn must be >= 0");
    if (!(cfg.s_tmin < cfg.s_tmax))
        throw std::invalid_argument("SamplerConfig: need s_tmin < s_tmax");
    if (!(cfg.cfg_gamma >= 1.0)) throw std::invalid_argument("SamplerConfig: cfg_gamma must be >= 1");
}

std::vector<double> time_grid(const SamplerConfig& cfg) {
    validate(cfg);
    const int n = cfg.n_steps;
    const double inv_rho = 1.0 / cfg.rho;
    const double hi = std::pow(cfg.sigma_max, inv_rho);
    const double lo = std::pow(cfg.sigma_min, inv_rho);
    std::vector<double> t(static_cast<std::size_t>(n) + 1);
    t[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double frac = static_cast<double>(n - i) / static_cast<double>(n - 1);
        t[static_cast<std::size_t>(i)] = std::pow(hi + frac * (lo - hi), cfg.rho);
    }
    t[1] = cfg.sigma_min;                        // exact boundaries
    t[static_cast<std::size_t>(n)] = cfg.sigma_max;
    return t;
}

double churn_gamma(const SamplerConfig& cfg, double t) {
    if (t < cfg.s_tmin || t > cfg.s_tmax) return 0.0;
    return std::min(cfg.s_churn / static_cast<double>(cfg.n_steps), std::sqrt(2.0) - 1.0);
}

Eigen::VectorXd cfg_denoise(const Denoiser& denoiser, const Eigen::VectorXd& x_tilde, double y,
                            const DiagCov& sigma, double gamma) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("cfg_denoise: gamma must be >= 1");
    const Eigen::VectorXd cond = denoiser.denoise(x_tilde, y, sigma);
    if (gamma == 1.0) return cond;
    const Eigen::VectorXd uncond = denoiser.denoise_unconditional(x_tilde, sigma);
    return uncond + gamma * (cond - uncond);
}

namespace {

void record(Trajectory* trajectory, double t, const Eigen::VectorXd& x) {
    if (!trajectory) return;
    trajectory->times.push_back(t);
    trajectory->states.push_back(x);
}

void check_finite(const Eigen::VectorXd& x, int step_index) {
    if (!x.allFinite())
        throw std::runtime_error("sampler: non-finite state at step " +
                                 std::to_string(step_index));
}

// (1/2) dSigma/dt * Sigma^{-1} at time t with sigma(t) = t.
DiagCov slope_coeff(double t, const Eigen::ArrayXd& h_tilde, double lambda_y) {
    return 0.5 * noise_cov_dot(t, 1.0, h_tilde, lambda_y) *
           cov_inverse(noise_cov(t, h_tilde, lambda_y));
}

// One Heun step from (x, t_cur) to t_next; the trapezoidal corrector is
// skipped when t_next = 0, where the slope is undefined.
Eigen::VectorXd heun_step(const Denoiser& denoiser, const Eigen::VectorXd& x, double y,
                          const Eigen::ArrayXd& h_tilde, double lambda_y, double t_cur,
                          double t_next, double gamma) {
    const DiagCov sigma_cur = noise_cov(t_cur, h_tilde, lambda_y);
    const Eigen::VectorXd denoised = cfg_denoise(denoiser, x, y, sigma_cur, gamma);
    const Eigen::VectorXd d =
        (slope_coeff(t_cur, h_tilde, lambda_y) * (x - denoised).array()).matrix();
    const double dt = t_next - t_cur;
    Eigen::VectorXd x_next = x + dt * d;
    if (t_next != 0.0) {
        const DiagCov sigma_next = noise_cov(t_next, h_tilde, lambda_y);
        const Eigen::VectorXd denoised2 = cfg_denoise(denoiser, x_next, y, sigma_next, gamma);
        const Eigen::VectorXd d2 =
            (slope_coeff(t_next, h_tilde, lambda_y) * (x_next - denoised2).array()).matrix();
        x_next = x + dt * (0.5 * d + 0.5 * d2);
    }
    return x_next;
}

}  // namespace

Eigen::VectorXd heun_sample_from(const Denoiser& denoiser, double y, const CovParams& cov,
                                 const SamplerConfig& cfg, const Eigen::VectorXd& x_init,
                                 Trajectory* trajectory) {
    const std::vector<double> t = time_grid(cfg);
    const Eigen::ArrayXd h_tilde = squashed_embedding(y, cov, denoiser.dim());

    Eigen::VectorXd x = x_init;
    record(trajectory, t.back(), x);
    for (int i = cfg.n_steps; i > 0; --i) {
        x = heun_step(denoiser, x, y, h_tilde, cov.lambda_y, t[static_cast<std::size_t>(i)],
                      t[static_cast<std::size_t>(i - 1)], cfg.cfg_gamma);
        check_finite(x, i);
        record(trajectory, t[static_cast<std::size_t>(i - 1)], x);
    }
    return x;
}

Eigen::VectorXd heun_sample(const Denoiser& denoiser, double y, const CovParams& cov,
                            const SamplerConfig& cfg, Rng& rng, Trajectory* trajectory) {
    const std::vector<double> t = time_grid(cfg);
    const Eigen::ArrayXd h_tilde = squashed_embedding(y, cov, denoiser.dim());
    const Eigen::VectorXd x_init =
        (cov_sqrt(noise_cov(t.back(), h_tilde, cov.lambda_y)) *
         rng.normal_array(denoiser.dim()))
            .matrix();
    return heun_sample_from(denoiser, y, cov, cfg, x_init, trajectory);
}

Eigen::VectorXd stochastic_sample_from(const Denoiser& denoiser, double y, const CovParams& cov,
                                       const SamplerConfig& cfg, const Eigen::VectorXd& x_init,
                                       Rng& rng, Trajectory* trajectory) {
    const std::vector<double> t = time_grid(cfg);
    const Eigen::ArrayXd h_tilde = squashed_embedding(y, cov, denoiser.dim());

    Eigen::VectorXd x = x_init;
    record(trajectory, t.back(), x);
    for (int i = cfg.n_steps; i > 0; --i) {
        const double t_cur = t[static_cast<std::size_t>(i)];
        // Drawn unconditionally to keep streams aligned across churn settings.
        const Eigen::ArrayXd eps = cfg.s_noise * rng.normal_array(denoiser.dim());
        const double gamma_i = churn_gamma(cfg, t_cur);
        const double t_hat = t_cur + gamma_i * t_cur;
        const DiagCov delta = noise_cov(t_hat, h_tilde, cov.lambda_y) -
                              noise_cov(t_cur, h_tilde, cov.lambda_y);
        if ((delta < 0.0).any())
            throw std::domain_error("stochastic_sample: covariance not monotone in t");
        const Eigen::VectorXd x_hat = x + (cov_sqrt(delta) * eps).matrix();

        x = heun_step(denoiser, x_hat, y, h_tilde, cov.lambda_y, t_hat,
                      t[static_cast<std::size_t>(i - 1)], cfg.cfg_gamma);
        check_finite(x, i);
        record(trajectory, t[static_cast<std::size_t>(i - 1)], x);
    }
    return x;
}

Eigen::VectorXd stochastic_sample(const Denoiser& denoiser, double y, const CovParams& cov,
                                  const SamplerConfig& cfg, Rng& rng, Trajectory* trajectory) {
    const std::vector<double> t = time_grid(cfg);
    const Eigen::ArrayXd h_tilde = squashed_embedding(y, cov, denoiser.dim());
    const Eigen::VectorXd x_init =
        (cov_sqrt(noise_cov(t.back(), h_tilde, cov.lambda_y)) *
         rng.normal_array(denoiser.dim()))
            .matrix();
    return stochastic_sample_from(denoiser, y, cov, cfg, x_init, rng, trajectory);
}

Eigen::VectorXd forward_simulate(const Eigen::VectorXd& x0, double y, const CovParams& cov,
                                 double t_end, int n_substeps, Rng& rng) {
    if (!(t_end > 0.0)) throw std::invalid_argument("forward_simulate: t_end must be positive");
    if (n_substeps < 1)
        throw std::invalid_argument("forward_simulate: n_substeps must be >= 1");
    const Eigen::ArrayXd h_tilde = squashed_embedding(y, cov, x0.size());
    const double dt = t_end / static_cast<double>(n_substeps);
    const double sqrt_dt = std::sqrt(dt);

    Eigen::VectorXd x = x0;
    for (int k = 0; k < n_substeps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const DiagCov g = diffusion_coeff(t, 1.0, h_tilde, cov.lambda_y);
        x += (g * (sqrt_dt * rng.normal_array(x0.size()))).matrix();
    }
    return x;
}

Eigen::VectorXd direct_perturb_with(const Eigen::VectorXd& x0, double y, double sigma,
                                    const CovParams& cov, const Eigen::VectorXd& eps) {
    const DiagCov s = noise_cov(sigma, y, cov, x0.size());
    return x0 + (cov_sqrt(s) * eps.array()).matrix();
}

Eigen::VectorXd direct_perturb(const Eigen::VectorXd& x0, double y, double sigma,
                               const CovParams& cov, Rng& rng) {
    return direct_perturb_with(x0, y, sigma, cov, rng.normal_vector(x0.size()));
}

}  // namespace csdm
