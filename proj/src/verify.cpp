#include "csdm/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <vector>

#include "csdm/covariance.hpp"
#include "csdm/denoiser.hpp"
#include "csdm/rng.hpp"
#include "csdm/sampler.hpp"
#include "csdm/stats.hpp"
#include "csdm/synthdata.hpp"
#include "csdm/vicinity.hpp"

namespace csdm {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, v);
    return buf;
}

double rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
    const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-12);
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

// Reference scalar sampler: Heun steps of slope (x - D(x, sigma)) / sigma on
// the same grid, written without any of the matrix-form machinery.
Eigen::VectorXd scalar_reference_heun(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>& denoise,
    Eigen::VectorXd x, const std::vector<double>& t, std::vector<Eigen::VectorXd>* states) {
    for (std::size_t i = t.size() - 1; i > 0; --i) {
        const double t_cur = t[i];
        const double t_next = t[i - 1];
        const Eigen::VectorXd d = (x - denoise(x, t_cur)) / t_cur;
        Eigen::VectorXd x_next = x + (t_next - t_cur) * d;
        if (t_next != 0.0) {
            const Eigen::VectorXd d2 = (x_next - denoise(x_next, t_next)) / t_next;
            x_next = x + (t_next - t_cur) * 0.5 * (d + d2);
        }
        x = x_next;
        if (states) states->push_back(x);
    }
    return x;
}

CovParams test_cov_params(double lambda_y) {
    CovParams p;
    p.lambda_y = lambda_y;
    p.sigma_data = 0.5;
    p.embedding.kind = EmbeddingKind::SinusoidalInY;
    p.embedding.offset = Eigen::ArrayXd::Constant(1, 0.2);
    p.embedding.slope = Eigen::ArrayXd::Constant(1, 1.0);
    p.embedding.frequency = Eigen::ArrayXd::Constant(1, 3.0);
    return p;
}

CheckResult check_edm_reduction() {
    CheckResult r{"edm-reduction", false, 0.0, ""};

    // lambda_y = 0 collapses the covariance family to scalar form, exactly.
    const Eigen::ArrayXd h_tilde = Eigen::ArrayXd::Constant(4, 0.37);
    for (double sigma : {0.01, 0.5, 3.0, 80.0}) {
        const DiagCov s = noise_cov(sigma, h_tilde, 0.0);
        const DiagCov g = diffusion_coeff(sigma, 1.0, h_tilde, 0.0);
        if ((s != sigma * sigma).any() || (g != std::sqrt(2.0 * sigma)).any()) {
            r.detail = "covariance did not reduce exactly at sigma=" + fmt("%g", sigma);
            return r;
        }
    }

    // Full trajectory against the scalar reference, shared initial state.
    DatasetSpec spec;
    spec.kind = DatasetKind::GaussianShift;
    spec.n_samples = 64;
    spec.dim = 1;
    spec.noise_std = 0.25;
    Rng rng(2024);
    const LabeledDataset data = generate_dataset(spec, rng);
    const ClosedFormDenoiser denoiser(data, VicinityConfig::hard_fixed(
                                                std::numeric_limits<double>::infinity()));

    SamplerConfig cfg;
    cfg.cfg_gamma = 1.0;
    const std::vector<double> grid = time_grid(cfg);
    const Eigen::VectorXd x_init =
        grid.back() * rng.normal_vector(1);  // N(0, sigma_max^2) at lambda_y = 0

    CovParams cov = test_cov_params(0.0);
    Trajectory traj;
    heun_sample_from(denoiser, 0.5, cov, cfg, x_init, &traj);

    std::vector<Eigen::VectorXd> ref_states;
    scalar_reference_heun(
        [&](const Eigen::VectorXd& x, double sigma) {
            return denoiser.denoise(x, 0.5, DiagCov::Constant(1, sigma * sigma));
        },
        x_init, grid, &ref_states);

    double worst = 0.0;
    for (std::size_t k = 0; k < ref_states.size(); ++k)
        worst = std::max(worst, rel_err(traj.states[k + 1], ref_states[k]));
    r.passed = worst <= 1e-12;
    r.detail = "max per-step relative deviation " + fmt("%.2e", worst);
    return r;
}

CheckResult check_churn_collapse() {
    CheckResult r{"churn-collapse", false, 0.0, ""};
    DatasetSpec spec;
    spec.n_samples = 48;
    spec.dim = 2;
    Rng rng(7);
    const LabeledDataset data = generate_dataset(spec, rng);
    const ClosedFormDenoiser denoiser(data, VicinityConfig::hard_adaptive(8));

    SamplerConfig cfg;
    cfg.s_churn = 0.0;
    cfg.cfg_gamma = 1.0;
    const CovParams cov = test_cov_params(0.4);
    const Eigen::ArrayXd h_tilde = squashed_embedding(0.5, cov, 2);
    const Eigen::VectorXd x_init =
        (cov_sqrt(noise_cov(cfg.sigma_max, h_tilde, cov.lambda_y)) * rng.normal_array(2))
            .matrix();

    const Eigen::VectorXd ode = heun_sample_from(denoiser, 0.5, cov, cfg, x_init);
    Rng churn_rng(99);
    const Eigen::VectorXd sde =
        stochastic_sample_from(denoiser, 0.5, cov, cfg, x_init, churn_rng);
    const double dev = rel_err(sde, ode);
    r.passed = dev <= 1e-12;
    r.detail = "relative deviation " + fmt("%.2e", dev);
    return r;
}

CheckResult check_lambda_normalization() {
    CheckResult r{"lambda-normalization", false, 0.0, ""};
    Rng rng(11);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double sigma_data = 0.1 + 2.0 * rng.uniform();
        const DiagCov sigma = (rng.normal_array(3) * 1.5).exp();
        const DiagCov lambda = noise_weight(sigma, sigma_data);
        const DiagCov c_out = precond_coeffs(sigma, sigma_data).c_out;
        worst = std::max(worst, (lambda * c_out.square() - 1.0).abs().maxCoeff());
    }
    r.passed = worst <= 1e-12;
    r.detail = "max |weight * c_out^2 - 1| = " + fmt("%.2e", worst);
    return r;
}

CheckResult check_precond_passthrough() {
    CheckResult r{"precond-passthrough", false, 0.0, ""};
    Rng rng(13);
    // All-zero network: output must equal the skip path exactly.
    const Eigen::VectorXd theta =
        Eigen::VectorXd::Zero(TrainableDenoiser::param_count(3, 8));
    const TrainableDenoiser zeroed(3, 8, 0.5, theta);
    const Eigen::VectorXd x = rng.normal_vector(3);
    const DiagCov sigma = rng.normal_array(3).exp();
    const Eigen::VectorXd got = zeroed.denoise(x, 0.3, sigma);
    const Eigen::VectorXd want = (precond_coeffs(sigma, 0.5).c_skip * x.array()).matrix();
    r.passed = (got.array() == want.array()).all();
    r.detail = r.passed ? "skip path exact" : "skip path deviates";
    return r;
}

CheckResult check_dstar_optimality() {
    CheckResult r{"dstar-optimality", false, 0.0, ""};
    Rng rng(17);
    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.uniform_index(7));
        const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.uniform_index(4));
        Eigen::MatrixXd pts(n, d);
        for (Eigen::Index i = 0; i < n; ++i) pts.row(i) = rng.normal_vector(d).transpose();
        Eigen::ArrayXd labels = Eigen::ArrayXd::Zero(n);
        const LabeledDataset data = make_dataset(pts, labels, -1.0, 1.0);
        const ClosedFormDenoiser denoiser(
            data, VicinityConfig::hard_fixed(std::numeric_limits<double>::infinity()));

        const DiagCov sigma = 0.3 + (rng.normal_array(d) * 0.5).exp();
        const Eigen::VectorXd x_tilde = rng.normal_vector(d);

        // Direct quadratic minimization in the plain density domain.
        double denom = 0.0;
        Eigen::VectorXd numer = Eigen::VectorXd::Zero(d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::ArrayXd diff = (x_tilde - pts.row(i).transpose()).array();
            const double dens = std::exp(-0.5 * (diff.square() / sigma).sum());
            denom += dens;
            numer += dens * pts.row(i).transpose();
        }
        const Eigen::VectorXd direct = numer / denom;
        const Eigen::VectorXd got = denoiser.denoise(x_tilde, 0.0, sigma);
        worst = std::max(worst, (got - direct).cwiseAbs().maxCoeff());
    }
    r.passed = worst <= 1e-8;
    r.detail = "max |closed form - direct argmin| = " + fmt("%.2e", worst);
    return r;
}

CheckResult check_score_finite_difference() {
    CheckResult r{"score-finite-difference", false, 0.0, ""};
    Rng rng(23);
    DatasetSpec spec;
    spec.n_samples = 20;
    spec.dim = 2;
    const LabeledDataset data = generate_dataset(spec, rng);
    const VicinityConfig vicinity = VicinityConfig::hard_adaptive(6);
    const ClosedFormDenoiser denoiser(data, vicinity);

    // Log of the weighted Gaussian mixture, evaluated directly.
    auto log_density = [&](const Eigen::VectorXd& x, double y, const DiagCov& sigma) {
        const auto idx = vicinal_indices(data.labels, y, vicinity);
        Eigen::ArrayXd exps(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const Eigen::ArrayXd diff = (x - data.samples.row(idx[k]).transpose()).array();
            exps[static_cast<Eigen::Index>(k)] = -0.5 * (diff.square() / sigma).sum();
        }
        const double peak = exps.maxCoeff();
        return peak + std::log((exps - peak).exp().sum());
    };

    double worst = 0.0;
    const double step = 1e-5;
    for (int probe = 0; probe < 100; ++probe) {
        const double y = 0.1 + 0.8 * rng.uniform();
        const double sigma_scalar = 0.3 + 1.5 * rng.uniform();
        const DiagCov sigma = noise_cov(sigma_scalar, squashed_embedding(y, test_cov_params(0.6), 2), 0.6);
        const Eigen::Index pick = static_cast<Eigen::Index>(rng.uniform_index(
            static_cast<std::size_t>(data.size())));
        const Eigen::VectorXd x =
            data.samples.row(pick).transpose() + (cov_sqrt(sigma) * rng.normal_array(2)).matrix();

        const Eigen::VectorXd analytic = vicinal_score(denoiser, x, y, sigma);
        Eigen::VectorXd fd(2);
        for (Eigen::Index k = 0; k < 2; ++k) {
            Eigen::VectorXd xp = x, xm = x;
            xp[k] += step;
            xm[k] -= step;
            fd[k] = (log_density(xp, y, sigma) - log_density(xm, y, sigma)) / (2.0 * step);
        }
        worst = std::max(worst, (analytic - fd).cwiseAbs().maxCoeff() /
                                    std::max(analytic.cwiseAbs().maxCoeff(), 1e-8));
    }
    r.passed = worst <= 1e-5;
    r.detail = "max relative deviation " + fmt("%.2e", worst);
    return r;
}

CheckResult check_grid_boundaries() {
    CheckResult r{"grid-boundaries", false, 0.0, ""};
    SamplerConfig cfg;
    const auto t = time_grid(cfg);
    bool ok = t.front() == 0.0 && t[1] == cfg.sigma_min && t.back() == cfg.sigma_max;
    for (std::size_t i = 1; i < t.size(); ++i) ok = ok && t[i] > t[i - 1];
    r.passed = ok;
    r.detail = ok ? "boundaries and monotonicity hold" : "grid boundary violation";
    return r;
}

CheckResult check_heun_order() {
    CheckResult r{"heun-convergence-order", false, 0.0, ""};
    DatasetSpec spec;
    spec.dim = 2;
    spec.noise_std = 0.5;
    const AnalyticDenoiser denoiser(spec);
    CovParams cov = test_cov_params(0.5);
    cov.embedding.offset = Eigen::ArrayXd::Constant(2, 0.2);
    cov.embedding.slope = Eigen::ArrayXd::Constant(2, 1.0);
    cov.embedding.frequency.resize(2);
    cov.embedding.frequency << 3.0, 5.0;

    const double y = 0.7;
    const Eigen::ArrayXd h_tilde = squashed_embedding(y, cov, 2);
    const Eigen::VectorXd mean_y = gaussian_mean(spec, y);

    SamplerConfig base;
    base.sigma_min = 1e-4;
    base.cfg_gamma = 1.0;
    Rng rng(31);
    const Eigen::VectorXd x_init =
        (cov_sqrt(noise_cov(base.sigma_max, h_tilde, cov.lambda_y)) * rng.normal_array(2))
            .matrix();

    // Exact solution of the linear probability-flow dynamics per dimension:
    // x(t) - m scales by sqrt(V(t) / V(T)) with V(t) = s^2 + t^2 + lambda h~ t.
    auto v_of = [&](double t) {
        return (spec.noise_std * spec.noise_std + t * t + cov.lambda_y * h_tilde * t).eval();
    };
    const Eigen::ArrayXd contraction = (v_of(0.0) / v_of(base.sigma_max)).sqrt();
    const Eigen::VectorXd exact =
        mean_y + (contraction * (x_init - mean_y).array()).matrix();

    std::vector<double> errors;
    for (int n : {16, 32, 64, 128}) {
        SamplerConfig cfg = base;
        cfg.n_steps = n;
        const Eigen::VectorXd got = heun_sample_from(denoiser, y, cov, cfg, x_init);
        errors.push_back((got - exact).norm());
    }
    bool ok = true;
    std::string ratios;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double ratio = errors[i] / errors[i + 1];
        ratios += (i ? ", " : "") + fmt("%.2f", ratio);
        ok = ok && ratio >= 3.0 && ratio <= 5.0;
    }
    r.passed = ok;
    r.detail = "halving ratios [" + ratios + "]";
    return r;
}

CheckResult check_theorem1_monte_carlo() {
    CheckResult r{"forward-sde-marginals", false, 0.0, ""};
    const CovParams cov = [] {
        CovParams p = test_cov_params(0.8);
        p.embedding.offset = Eigen::ArrayXd::Constant(2, 0.2);
        p.embedding.slope.resize(2);
        p.embedding.slope << 0.5, 2.0;
        p.embedding.frequency.resize(2);
        p.embedding.frequency << 3.0, 5.0;
        return p;
    }();
    const double y = 0.4;
    const double t_end = 1.0;
    const int paths = 10000;
    const int substeps = 200;
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
    const DiagCov target = noise_cov(t_end, y, cov, 2);

    Rng rng(41);
    Eigen::MatrixXd increments(paths, 2);
    for (int p = 0; p < paths; ++p)
        increments.row(p) = (forward_simulate(x0, y, cov, t_end, substeps, rng) - x0).transpose();

    bool ok = true;
    std::string detail;
    for (Eigen::Index k = 0; k < 2; ++k) {
        const Eigen::ArrayXd col = increments.col(k).array();
        const double var = variance(col);
        const double mu = col.mean();
        const double se = std::sqrt(var / paths);
        const auto ks = ks_test_normal(std::vector<double>(col.data(), col.data() + col.size()),
                                       0.0, std::sqrt(target[k]));
        const bool var_ok = std::abs(var - target[k]) <= 0.05 * target[k];
        const bool mean_ok = std::abs(mu) <= 3.0 * se;
        const bool ks_ok = ks.p_value > 0.001;
        ok = ok && var_ok && mean_ok && ks_ok;
        detail += (k ? "; " : "") + std::string("dim") + std::to_string(k) + " var " +
                  fmt("%.4f", var) + "/" + fmt("%.4f", target[k]) + " ks-p " +
                  fmt("%.3f", ks.p_value);
    }
    r.passed = ok;
    r.detail = detail;
    return r;
}

CheckResult check_vicinal_uniformity() {
    CheckResult r{"vicinal-uniformity", false, 0.0, ""};
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(5, 1);
    Eigen::ArrayXd labels(5);
    labels << 1, 2, 3, 4, 5;
    const LabeledDataset data = make_dataset(pts, labels, 1.0, 5.0);
    const VicinityConfig vicinity = VicinityConfig::hard_adaptive(3);

    Rng rng(59);
    std::vector<double> counts(3, 0.0);
    for (int k = 0; k < 10000; ++k) {
        const auto idx = sample_vicinal_index(data, 3.0, vicinity, rng);
        counts[static_cast<std::size_t>(*idx - 1)] += 1.0;
    }
    const auto chi = chi2_test(counts, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    r.passed = chi.p_value > 0.001;
    r.detail = "chi2 p = " + fmt("%.4f", chi.p_value);
    return r;
}

CheckResult timed(CheckResult (*fn)()) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r = fn();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace

std::vector<CheckResult> run_verification(VerifyLevel level) {
    std::vector<CheckResult> results;
    results.push_back(timed(check_grid_boundaries));
    results.push_back(timed(check_edm_reduction));
    results.push_back(timed(check_churn_collapse));
    results.push_back(timed(check_lambda_normalization));
    results.push_back(timed(check_precond_passthrough));
    results.push_back(timed(check_dstar_optimality));
    results.push_back(timed(check_score_finite_difference));
    results.push_back(timed(check_heun_order));
    if (level == VerifyLevel::Full) {
        results.push_back(timed(check_theorem1_monte_carlo));
        results.push_back(timed(check_vicinal_uniformity));
    }
    return results;
}

}  // namespace csdm
