#ifndef CSDM_DENOISER_HPP
#define CSDM_DENOISER_HPP

#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "csdm/covariance.hpp"
#include "csdm/rng.hpp"
#include "csdm/vicinity.hpp"

namespace csdm {

/// A denoiser maps (noisy sample, label, diagonal noise covariance) to an
/// estimate of the clean sample. The unconditional variant backs
/// classifier-free guidance; the covariance passed to it is the same
/// label-dependent one used for the conditional call.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual Eigen::VectorXd denoise(const Eigen::VectorXd& x_tilde, double y,
                                    const DiagCov& sigma) const = 0;
    virtual Eigen::Index dim() const = 0;
    virtual bool has_unconditional() const { return false; }
    virtual Eigen::VectorXd denoise_unconditional(const Eigen::VectorXd& x_tilde,
                                                  const DiagCov& sigma) const {
        (void)x_tilde;
        (void)sigma;
        throw std::logic_error("Denoiser: unconditional output not supported");
    }
};

/// Optimal denoiser for the vicinal empirical distribution: the Gaussian-
/// responsibility weighted average of in-vicinity training samples.
/// Responsibilities are computed in the log domain with max subtraction so
/// small covariances never produce NaN.
class ClosedFormDenoiser final : public Denoiser {
public:
    ClosedFormDenoiser(LabeledDataset dataset, VicinityConfig vicinity);

    Eigen::VectorXd denoise(const Eigen::VectorXd& x_tilde, double y,
                            const DiagCov& sigma) const override;
    Eigen::Index dim() const override { return data_.dim(); }
    bool has_unconditional() const override { return true; }
    /// Same posterior mean with every training point in the vicinity.
    Eigen::VectorXd denoise_unconditional(const Eigen::VectorXd& x_tilde,
                                          const DiagCov& sigma) const override;

    const LabeledDataset& dataset() const { return data_; }
    const VicinityConfig& vicinity() const { return vicinity_; }

private:
    Eigen::VectorXd posterior_mean(const Eigen::VectorXd& x_tilde, const DiagCov& sigma,
                                   const std::vector<Eigen::Index>& idx) const;

    LabeledDataset data_;
    VicinityConfig vicinity_;
};

/// Conditional score estimate Sigma^{-1} (D(x~, y, Sigma) - x~); the gradient
/// of the log vicinal mixture density when D is the closed-form denoiser.
Eigen::VectorXd vicinal_score(const Denoiser& denoiser, const Eigen::VectorXd& x_tilde,
                              double y, const DiagCov& sigma);

/// Input/output/skip/noise scalings that keep network signal magnitudes
/// stable across noise levels:
///   c_in   = (sigma_data^2 + S)^{-1/2}
///   c_skip = sigma_data^2 / (sigma_data^2 + S)
///   c_out  = sigma_data * S^{1/2} / (sigma_data^2 + S)^{1/2}
///   c_noise = (1/4) log S          (entrywise, S = diagonal of Sigma)
struct PrecondCoeffs {
    DiagCov c_in;
    DiagCov c_skip;
    DiagCov c_out;
    Eigen::ArrayXd c_noise;
};

PrecondCoeffs precond_coeffs(const DiagCov& sigma, double sigma_data);

/// Per-dimension loss weighting (S + sigma_data^2) / (sigma_data^2 * S);
/// satisfies weight * c_out^2 = 1 entrywise.
DiagCov noise_weight(const DiagCov& sigma, double sigma_data);

struct LossConfig {
    double p_mean = -1.2;          // log-normal location of training sigma
    double p_std = 1.2;            // log-normal scale, > 0
    double sigma_data = 0.5;
    int batch_size = 32;
    double label_drop_prob = 0.1;  // probability of the unconditional branch
};

/// Draws sigma with log(sigma) ~ N(p_mean, p_std^2).
double sample_sigma(const LossConfig& cfg, Rng& rng);

/// Small fully connected regressor wrapped in preconditioning. Three tanh
/// hidden layers of equal width; inputs are the preconditioned sample, a
/// sinusoidal feature of the label (or a learned null token on the
/// unconditional branch) and Fourier features of the mean log noise level.
/// Gradients are computed by hand-written backpropagation.
class TrainableDenoiser final : public Denoiser {
public:
    static constexpr int kLabelFeatures = 8;
    static constexpr int kNoiseFeatures = 5;
    static constexpr int kHiddenLayers = 3;

    TrainableDenoiser(Eigen::Index dim, int width, double sigma_data, Rng& init_rng);
    TrainableDenoiser(Eigen::Index dim, int width, double sigma_data, Eigen::VectorXd theta);

    Eigen::VectorXd denoise(const Eigen::VectorXd& x_tilde, double y,
                            const DiagCov& sigma) const override;
    Eigen::Index dim() const override { return dim_; }
    bool has_unconditional() const override { return true; }
    Eigen::VectorXd denoise_unconditional(const Eigen::VectorXd& x_tilde,
                                          const DiagCov& sigma) const override;

    /// Conditional or null-token forward pass.
    Eigen::VectorXd denoise_with(const Eigen::VectorXd& x_tilde, double y, const DiagCov& sigma,
                                 bool conditional) const;

    int width() const { return width_; }
    double sigma_data() const { return sigma_data_; }
    Eigen::VectorXd& params() { return theta_; }
    const Eigen::VectorXd& params() const { return theta_; }
    static Eigen::Index param_count(Eigen::Index dim, int width);

    static Eigen::ArrayXd label_features(double y);
    static Eigen::ArrayXd noise_features(const Eigen::ArrayXd& c_noise);

private:
    friend struct BatchGradWorkspace;
    Eigen::Index input_dim() const { return dim_ + kLabelFeatures + kNoiseFeatures; }

    Eigen::Index dim_;
    int width_;
    double sigma_data_;
    Eigen::VectorXd theta_;
};

/// One training example: a clean sample, the perturbed input and everything
/// needed to evaluate the weighted denoising residual.
struct VicinalBatchElement {
    Eigen::VectorXd x_ref;    // clean sample x_i
    double y = 0.0;           // jittered target label
    double sigma = 0.0;       // drawn noise level
    DiagCov cov;              // Sigma(sigma, y)
    Eigen::VectorXd x_tilde;  // x_ref + Sigma^{1/2} eps
    bool conditional = true;  // false when the label was dropped
};
using VicinalBatch = std::vector<VicinalBatchElement>;

/// Samples a batch: per element sigma ~ log-normal, y from the label KDE,
/// a uniform in-vicinity sample index (resampling y when a fixed vicinity
/// comes up empty, bounded retries), Gaussian perturbation, label-drop coin.
VicinalBatch draw_vicinal_batch(const LabeledDataset& data, const VicinityConfig& vicinity,
                                const KdeConfig& kde, const CovParams& cov_params,
                                const LossConfig& loss_cfg, Rng& rng);

/// Mean over the batch of || Lambda^{1/2} (D(x~, y, Sigma) - x_ref) ||^2 for
/// an arbitrary denoising callable (x~, y, Sigma, conditional) -> x^.
using DenoiseFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, double, const DiagCov&, bool)>;
double batch_loss(const DenoiseFn& denoise, const VicinalBatch& batch, double sigma_data);

struct LossGrad {
    double loss = 0.0;
    Eigen::VectorXd grad;
};

/// Loss plus analytic parameter gradient for a fixed batch. The batch-element
/// reduction order is fixed, so repeated evaluation is bit-reproducible.
LossGrad batch_loss_grad(const TrainableDenoiser& model, const VicinalBatch& batch);

/// Draws a fresh batch and evaluates loss + gradient.
LossGrad vicinal_loss_batch(const TrainableDenoiser& model, const LabeledDataset& data,
                            const VicinityConfig& vicinity, const KdeConfig& kde,
                            const CovParams& cov_params, const LossConfig& loss_cfg, Rng& rng);

struct TrainingDivergence : std::runtime_error {
    TrainingDivergence(int step, double loss, std::vector<double> partial_trace);
    int step;
    double loss;
    std::vector<double> partial_trace;  // losses up to the failing step
};

struct TrainOptions {
    int steps = 1000;
    double learning_rate = 1e-3;
};

/// Plain stochastic gradient descent on the vicinal loss; returns the
/// per-step loss trace. Throws TrainingDivergence on a non-finite loss.
std::vector<double> train_denoiser(TrainableDenoiser& model, const LabeledDataset& data,
                                   const VicinityConfig& vicinity, const KdeConfig& kde,
                                   const CovParams& cov_params, const LossConfig& loss_cfg,
                                   const TrainOptions& options, Rng& rng);

}  // namespace csdm

#endif  // CSDM_DENOISER_HPP
