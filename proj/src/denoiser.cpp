#include "csdm/denoiser.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace csdm {

ClosedFormDenoiser::ClosedFormDenoiser(LabeledDataset dataset, VicinityConfig vicinity)
    : data_(std::move(dataset)), vicinity_(vicinity) {
    if (data_.size() < 1) throw std::invalid_argument("ClosedFormDenoiser: empty dataset");
}

Eigen::VectorXd ClosedFormDenoiser::posterior_mean(const Eigen::VectorXd& x_tilde,
                                                   const DiagCov& sigma,
                                                   const std::vector<Eigen::Index>& idx) const {
    if (idx.empty()) throw std::domain_error("ClosedFormDenoiser: empty vicinity");
    if (x_tilde.size() != data_.dim() || sigma.size() != data_.dim())
        throw std::invalid_argument("ClosedFormDenoiser: dimension mismatch");
    const DiagCov inv = cov_inverse(sigma);

    // Log responsibilities up to the shared Gaussian normalizer; max
    // subtraction keeps the softmax finite at small covariances.
    Eigen::ArrayXd log_resp(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const Eigen::ArrayXd diff = (x_tilde - data_.samples.row(idx[k]).transpose()).array();
        log_resp[static_cast<Eigen::Index>(k)] = -0.5 * (diff.square() * inv).sum();
    }
    const double peak = log_resp.maxCoeff();
    const Eigen::ArrayXd w = (log_resp - peak).exp();

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(data_.dim());
    for (std::size_t k = 0; k < idx.size(); ++k)
        acc += w[static_cast<Eigen::Index>(k)] * data_.samples.row(idx[k]).transpose();
    return acc / w.sum();
}

Eigen::VectorXd ClosedFormDenoiser::denoise(const Eigen::VectorXd& x_tilde, double y,
                                            const DiagCov& sigma) const {
    return posterior_mean(x_tilde, sigma, vicinal_indices(data_.labels, y, vicinity_));
}

Eigen::VectorXd ClosedFormDenoiser::denoise_unconditional(const Eigen::VectorXd& x_tilde,
                                                          const DiagCov& sigma) const {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(data_.size()));
    for (Eigen::Index i = 0; i < data_.size(); ++i) all[static_cast<std::size_t>(i)] = i;
    return posterior_mean(x_tilde, sigma, all);
}

Eigen::VectorXd vicinal_score(const Denoiser& denoiser, const Eigen::VectorXd& x_tilde, double y,
                              const DiagCov& sigma) {
    const Eigen::VectorXd denoised = denoiser.denoise(x_tilde, y, sigma);
    return (cov_inverse(sigma) * (denoised - x_tilde).array()).matrix();
}

PrecondCoeffs precond_coeffs(const DiagCov& sigma, double sigma_data) {
    if (!(sigma_data > 0.0)) throw std::domain_error("precond_coeffs: sigma_data must be positive");
    if ((sigma <= 0.0).any())
        throw std::domain_error("precond_coeffs: covariance entries must be positive");
    const DiagCov total = sigma_data * sigma_data + sigma;
    PrecondCoeffs pc;
    pc.c_in = total.rsqrt();
    pc.c_skip = sigma_data * sigma_data / total;
    pc.c_out = sigma_data * sigma.sqrt() * total.rsqrt();
    pc.c_noise = 0.25 * sigma.log();
    return pc;
}

DiagCov noise_weight(const DiagCov& sigma, double sigma_data) {
    if (!(sigma_data > 0.0)) throw std::domain_error("noise_weight: sigma_data must be positive");
    if ((sigma <= 0.0).any())
        throw std::domain_error("noise_weight: covariance entries must be positive");
    return (sigma + sigma_data * sigma_data) / (sigma_data * sigma_data * sigma);
}

double sample_sigma(const LossConfig& cfg, Rng& rng) {
    if (!(cfg.p_std > 0.0)) throw std::invalid_argument("sample_sigma: p_std must be positive");
    return std::exp(cfg.p_mean + cfg.p_std * rng.normal());
}

namespace {

// Flat parameter layout of the three-hidden-layer network.
struct Layout {
    Eigen::Index in;     // input feature count
    Eigen::Index w;      // hidden width
    Eigen::Index out;    // output dimension
    Eigen::Index w1, b1, w2, b2, w3, b3, w4, b4, null_tok, total;

    Layout(Eigen::Index dim, int width)
        : in(dim + TrainableDenoiser::kLabelFeatures + TrainableDenoiser::kNoiseFeatures),
          w(width),
          out(dim) {
        w1 = 0;
        b1 = w1 + w * in;
        w2 = b1 + w;
        b2 = w2 + w * w;
        w3 = b2 + w;
        b3 = w3 + w * w;
        w4 = b3 + w;
        b4 = w4 + out * w;
        null_tok = b4 + out;
        total = null_tok + TrainableDenoiser::kLabelFeatures;
    }
};

using ConstMat = Eigen::Map<const Eigen::MatrixXd>;
using ConstVec = Eigen::Map<const Eigen::VectorXd>;
using MutMat = Eigen::Map<Eigen::MatrixXd>;
using MutVec = Eigen::Map<Eigen::VectorXd>;

struct ForwardCache {
    Eigen::VectorXd u, h1, h2, h3, f;
    PrecondCoeffs pc;
};

ForwardCache forward_pass(const Layout& ly, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& x_tilde, double y, const DiagCov& sigma,
                          double sigma_data, bool conditional) {
    ForwardCache c;
    c.pc = precond_coeffs(sigma, sigma_data);

    c.u.resize(ly.in);
    c.u.head(ly.out) = (c.pc.c_in * x_tilde.array()).matrix();
    if (conditional) {
        c.u.segment(ly.out, TrainableDenoiser::kLabelFeatures) =
            TrainableDenoiser::label_features(y).matrix();
    } else {
        c.u.segment(ly.out, TrainableDenoiser::kLabelFeatures) =
            theta.segment(ly.null_tok, TrainableDenoiser::kLabelFeatures);
    }
    c.u.tail(TrainableDenoiser::kNoiseFeatures) =
        TrainableDenoiser::noise_features(c.pc.c_noise).matrix();

    const ConstMat W1(theta.data() + ly.w1, ly.w, ly.in);
    const ConstVec B1(theta.data() + ly.b1, ly.w);
    const ConstMat W2(theta.data() + ly.w2, ly.w, ly.w);
    const ConstVec B2(theta.data() + ly.b2, ly.w);
    const ConstMat W3(theta.data() + ly.w3, ly.w, ly.w);
    const ConstVec B3(theta.data() + ly.b3, ly.w);
    const ConstMat W4(theta.data() + ly.w4, ly.out, ly.w);
    const ConstVec B4(theta.data() + ly.b4, ly.out);

    c.h1 = ((W1 * c.u + B1).array().tanh()).matrix();
    c.h2 = ((W2 * c.h1 + B2).array().tanh()).matrix();
    c.h3 = ((W3 * c.h2 + B3).array().tanh()).matrix();
    c.f = W4 * c.h3 + B4;
    return c;
}

}  // namespace

TrainableDenoiser::TrainableDenoiser(Eigen::Index dim, int width, double sigma_data,
                                     Rng& init_rng)
    : dim_(dim), width_(width), sigma_data_(sigma_data) {
    if (dim < 1 || width < 1) throw std::invalid_argument("TrainableDenoiser: bad shape");
    if (!(sigma_data > 0.0))
        throw std::invalid_argument("TrainableDenoiser: sigma_data must be positive");
    const Layout ly(dim_, width_);
    theta_ = Eigen::VectorXd::Zero(ly.total);

    auto init_matrix = [&](Eigen::Index offset, Eigen::Index rows, Eigen::Index cols) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
        for (Eigen::Index k = 0; k < rows * cols; ++k) theta_[offset + k] = scale * init_rng.normal();
    };
    init_matrix(ly.w1, ly.w, ly.in);
    init_matrix(ly.w2, ly.w, ly.w);
    init_matrix(ly.w3, ly.w, ly.w);
    init_matrix(ly.w4, ly.out, ly.w);
    for (Eigen::Index k = 0; k < kLabelFeatures; ++k)
        theta_[ly.null_tok + k] = 0.1 * init_rng.normal();
}

TrainableDenoiser::TrainableDenoiser(Eigen::Index dim, int width, double sigma_data,
                                     Eigen::VectorXd theta)
    : dim_(dim), width_(width), sigma_data_(sigma_data), theta_(std::move(theta)) {
    if (theta_.size() != param_count(dim, width))
        throw std::invalid_argument("TrainableDenoiser: parameter vector has wrong size");
    if (!theta_.allFinite())
        throw std::invalid_argument("TrainableDenoiser: parameters must be finite");
}

Eigen::Index TrainableDenoiser::param_count(Eigen::Index dim, int width) {
    return Layout(dim, width).total;
}

Eigen::ArrayXd TrainableDenoiser::label_features(double y) {
    Eigen::ArrayXd feat(kLabelFeatures);
    for (int k = 0; k < kLabelFeatures / 2; ++k) {
        const double omega = 2.0 * std::numbers::pi * static_cast<double>(1 << k);
        feat[2 * k] = std::sin(omega * y);
        feat[2 * k + 1] = std::cos(omega * y);
    }
    return feat;
}

Eigen::ArrayXd TrainableDenoiser::noise_features(const Eigen::ArrayXd& c_noise) {
    const double m = c_noise.mean();
    Eigen::ArrayXd feat(kNoiseFeatures);
    feat << m, std::sin(m), std::cos(m), std::sin(2.0 * m), std::cos(2.0 * m);
    return feat;
}

Eigen::VectorXd TrainableDenoiser::denoise_with(const Eigen::VectorXd& x_tilde, double y,
                                                const DiagCov& sigma, bool conditional) const {
    if (x_tilde.size() != dim_ || sigma.size() != dim_)
        throw std::invalid_argument("TrainableDenoiser: dimension mismatch");
    const Layout ly(dim_, width_);
    const ForwardCache c = forward_pass(ly, theta_, x_tilde, y, sigma, sigma_data_, conditional);
    Eigen::VectorXd out =
        (c.pc.c_skip * x_tilde.array() + c.pc.c_out * c.f.array()).matrix();
    if (!out.allFinite()) throw std::runtime_error("TrainableDenoiser: non-finite output");
    return out;
}

Eigen::VectorXd TrainableDenoiser::denoise(const Eigen::VectorXd& x_tilde, double y,
                                           const DiagCov& sigma) const {
    return denoise_with(x_tilde, y, sigma, true);
}

Eigen::VectorXd TrainableDenoiser::denoise_unconditional(const Eigen::VectorXd& x_tilde,
                                                         const DiagCov& sigma) const {
    return denoise_with(x_tilde, 0.0, sigma, false);
}

VicinalBatch draw_vicinal_batch(const LabeledDataset& data, const VicinityConfig& vicinity,
                                const KdeConfig& kde, const CovParams& cov_params,
                                const LossConfig& loss_cfg, Rng& rng) {
    if (loss_cfg.batch_size < 1)
        throw std::invalid_argument("draw_vicinal_batch: batch_size must be >= 1");
    constexpr int kMaxLabelRetries = 100;

    VicinalBatch batch;
    batch.reserve(static_cast<std::size_t>(loss_cfg.batch_size));
    const Eigen::Index d = data.dim();
    for (int b = 0; b < loss_cfg.batch_size; ++b) {
        VicinalBatchElement e;
        e.sigma = sample_sigma(loss_cfg, rng);

        std::optional<Eigen::Index> pick;
        for (int attempt = 0; attempt < kMaxLabelRetries && !pick; ++attempt) {
            e.y = sample_target_label(data.labels, kde, rng);
            pick = sample_vicinal_index(data, e.y, vicinity, rng);
        }
        if (!pick)
            throw std::runtime_error(
                "draw_vicinal_batch: vicinity stayed empty after 100 label draws; widen kappa");

        e.x_ref = data.samples.row(*pick).transpose();
        e.cov = noise_cov(e.sigma, e.y, cov_params, d);
        e.x_tilde = e.x_ref + (cov_sqrt(e.cov) * rng.normal_array(d)).matrix();
        e.conditional = !(rng.uniform() < loss_cfg.label_drop_prob);
        batch.push_back(std::move(e));
    }
    return batch;
}

double batch_loss(const DenoiseFn& denoise, const VicinalBatch& batch, double sigma_data) {
    if (batch.empty()) throw std::invalid_argument("batch_loss: empty batch");
    double total = 0.0;
    for (const auto& e : batch) {
        const DiagCov lambda = noise_weight(e.cov, sigma_data);
        const Eigen::ArrayXd r = (denoise(e.x_tilde, e.y, e.cov, e.conditional) - e.x_ref).array();
        total += (lambda * r.square()).sum();
    }
    return total / static_cast<double>(batch.size());
}

LossGrad batch_loss_grad(const TrainableDenoiser& model, const VicinalBatch& batch) {
    if (batch.empty()) throw std::invalid_argument("batch_loss_grad: empty batch");
    const Layout ly(model.dim(), model.width());
    const Eigen::VectorXd& theta = model.params();

    LossGrad out;
    out.grad = Eigen::VectorXd::Zero(ly.total);

    const ConstMat W1(theta.data() + ly.w1, ly.w, ly.in);
    const ConstMat W2(theta.data() + ly.w2, ly.w, ly.w);
    const ConstMat W3(theta.data() + ly.w3, ly.w, ly.w);
    const ConstMat W4(theta.data() + ly.w4, ly.out, ly.w);

    MutMat gW1(out.grad.data() + ly.w1, ly.w, ly.in);
    MutVec gB1(out.grad.data() + ly.b1, ly.w);
    MutMat gW2(out.grad.data() + ly.w2, ly.w, ly.w);
    MutVec gB2(out.grad.data() + ly.b2, ly.w);
    MutMat gW3(out.grad.data() + ly.w3, ly.w, ly.w);
    MutVec gB3(out.grad.data() + ly.b3, ly.w);
    MutMat gW4(out.grad.data() + ly.w4, ly.out, ly.w);
    MutVec gB4(out.grad.data() + ly.b4, ly.out);
    MutVec gNull(out.grad.data() + ly.null_tok, TrainableDenoiser::kLabelFeatures);

    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    for (const auto& e : batch) {
        const ForwardCache c = forward_pass(ly, theta, e.x_tilde, e.y, e.cov,
                                            model.sigma_data(), e.conditional);
        const Eigen::ArrayXd denoised = c.pc.c_skip * e.x_tilde.array() + c.pc.c_out * c.f.array();
        const Eigen::ArrayXd residual = denoised - e.x_ref.array();
        const DiagCov lambda = noise_weight(e.cov, model.sigma_data());
        out.loss += inv_batch * (lambda * residual.square()).sum();

        const Eigen::VectorXd gF =
            (2.0 * inv_batch * lambda * residual * c.pc.c_out).matrix();

        gW4 += gF * c.h3.transpose();
        gB4 += gF;
        const Eigen::VectorXd g3 =
            ((W4.transpose() * gF).array() * (1.0 - c.h3.array().square())).matrix();
        gW3 += g3 * c.h2.transpose();
        gB3 += g3;
        const Eigen::VectorXd g2 =
            ((W3.transpose() * g3).array() * (1.0 - c.h2.array().square())).matrix();
        gW2 += g2 * c.h1.transpose();
        gB2 += g2;
        const Eigen::VectorXd g1 =
            ((W2.transpose() * g2).array() * (1.0 - c.h1.array().square())).matrix();
        gW1 += g1 * c.u.transpose();
        gB1 += g1;
        if (!e.conditional) {
            gNull += (W1.transpose() * g1).segment(ly.out, TrainableDenoiser::kLabelFeatures);
        }
    }
    return out;
}

LossGrad vicinal_loss_batch(const TrainableDenoiser& model, const LabeledDataset& data,
                            const VicinityConfig& vicinity, const KdeConfig& kde,
                            const CovParams& cov_params, const LossConfig& loss_cfg, Rng& rng) {
    const VicinalBatch batch =
        draw_vicinal_batch(data, vicinity, kde, cov_params, loss_cfg, rng);
    return batch_loss_grad(model, batch);
}

TrainingDivergence::TrainingDivergence(int at_step, double bad_loss,
                                       std::vector<double> trace)
    : std::runtime_error("training diverged at step " + std::to_string(at_step)),
      step(at_step),
      loss(bad_loss),
      partial_trace(std::move(trace)) {}

std::vector<double> train_denoiser(TrainableDenoiser& model, const LabeledDataset& data,
                                   const VicinityConfig& vicinity, const KdeConfig& kde,
                                   const CovParams& cov_params, const LossConfig& loss_cfg,
                                   const TrainOptions& options, Rng& rng) {
    if (options.steps < 0) throw std::invalid_argument("train_denoiser: steps must be >= 0");
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(options.steps));
    for (int step = 0; step < options.steps; ++step) {
        const LossGrad lg =
            vicinal_loss_batch(model, data, vicinity, kde, cov_params, loss_cfg, rng);
        if (!std::isfinite(lg.loss) || !lg.grad.allFinite())
            throw TrainingDivergence(step, lg.loss, std::move(trace));
        model.params() -= options.learning_rate * lg.grad;
        trace.push_back(lg.loss);
    }
    return trace;
}

}  // namespace csdm
