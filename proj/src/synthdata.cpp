#include "csdm/synthdata.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace csdm {

void validate(const DatasetSpec& spec) {
    if (spec.n_samples < 1) throw std::invalid_argument("DatasetSpec: n_samples must be >= 1");
    if (spec.dim < 1) throw std::invalid_argument("DatasetSpec: dim must be >= 1");
    if (!(spec.label_min < spec.label_max))
        throw std::invalid_argument("DatasetSpec: need label_min < label_max");
    if (!(spec.noise_std > 0.0)) throw std::invalid_argument("DatasetSpec: noise_std must be positive");
    if (spec.kind == DatasetKind::Ring) {
        if (spec.dim != 2) throw std::invalid_argument("DatasetSpec: Ring requires dim = 2");
        if (!(spec.radius > 0.0)) throw std::invalid_argument("DatasetSpec: radius must be positive");
    }
}

Eigen::VectorXd shift_direction(Eigen::Index dim) {
    return Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
}

Eigen::VectorXd gaussian_mean(const DatasetSpec& spec, double y) {
    return y * shift_direction(spec.dim);
}

double ring_angle(const DatasetSpec& spec, double y) {
    const double frac = (y - spec.label_min) / (spec.label_max - spec.label_min);
    return frac * 0.5 * std::numbers::pi;
}

namespace {

double draw_imbalanced_label(const DatasetSpec& spec, Rng& rng) {
    const double span = spec.label_max - spec.label_min;
    const double center = 0.5 * (spec.label_min + spec.label_max);
    const double core_std = kImbalanceCoreRelStd * span;
    if (rng.uniform() < kImbalanceCoreFraction) {
        // Central component, redrawn until it lands inside the range.
        for (;;) {
            const double y = center + core_std * rng.normal();
            if (y >= spec.label_min && y <= spec.label_max) return y;
        }
    }
    return spec.label_min + span * rng.uniform();
}

}  // namespace

LabeledDataset generate_dataset(const DatasetSpec& spec, Rng& rng) {
    validate(spec);
    const Eigen::Index n = spec.n_samples;
    const Eigen::Index d = spec.dim;
    Eigen::MatrixXd samples(n, d);
    Eigen::ArrayXd labels(n);

    const double span = spec.label_max - spec.label_min;
    for (Eigen::Index i = 0; i < n; ++i) {
        double y;
        if (spec.kind == DatasetKind::ImbalancedShift) {
            y = draw_imbalanced_label(spec, rng);
        } else {
            y = spec.label_min + span * rng.uniform();
        }
        labels[i] = y;

        switch (spec.kind) {
            case DatasetKind::GaussianShift:
            case DatasetKind::ImbalancedShift:
                samples.row(i) =
                    (gaussian_mean(spec, y) + spec.noise_std * rng.normal_vector(d)).transpose();
                break;
            case DatasetKind::Ring: {
                const double theta = ring_angle(spec, y);
                Eigen::VectorXd point(2);
                point << spec.radius * std::cos(theta), spec.radius * std::sin(theta);
                samples.row(i) = (point + spec.noise_std * rng.normal_vector(2)).transpose();
                break;
            }
        }
    }
    return make_dataset(std::move(samples), std::move(labels), spec.label_min, spec.label_max);
}

AnalyticOracle::AnalyticOracle(DatasetSpec spec) : spec_(std::move(spec)) {
    validate(spec_);
    if (spec_.kind == DatasetKind::Ring)
        throw std::invalid_argument("AnalyticOracle: defined only for the Gaussian families");
}

Eigen::VectorXd analytic_score(const AnalyticOracle& oracle, const Eigen::VectorXd& x_tilde,
                               double y, const DiagCov& sigma) {
    const DatasetSpec& spec = oracle.spec();
    if (x_tilde.size() != spec.dim || sigma.size() != spec.dim)
        throw std::invalid_argument("analytic_score: dimension mismatch");
    if ((sigma <= 0.0).any())
        throw std::domain_error("analytic_score: covariance entries must be positive");
    const DiagCov total = spec.noise_std * spec.noise_std + sigma;
    return (-(x_tilde - gaussian_mean(spec, y)).array() / total).matrix();
}

Eigen::VectorXd analytic_denoiser(const AnalyticOracle& oracle, const Eigen::VectorXd& x_tilde,
                                  double y, const DiagCov& sigma) {
    return x_tilde + (sigma * analytic_score(oracle, x_tilde, y, sigma).array()).matrix();
}

}  // namespace csdm
